#pragma once

#include <cmath>
#include <map>
#include <numeric>

#include "potts/mp.hpp"

namespace potts {

struct AberthRoot {
  MpComplex value;
  MpFloat radius;      // a-posteriori inclusion radius
  int cluster = -1;    // cluster id (shared radius groups), -1 = simple
};

struct RootSet {
  std::uint64_t poly_hash = 0;
  int degree = 0;
  std::vector<AberthRoot> roots;  // degree entries, deterministic order
  int iterations = 0;
  unsigned final_precision_bits = 0;
  bool converged = false;  // all radii <= target
  std::string diagnostic;
};

struct SolveOptions {
  double target_radius = 1e-20;
  unsigned start_precision_bits = 128;
  unsigned max_precision_bits = 1 << 14;
  int max_sweeps_per_precision = 160;
  std::uint64_t seed = 1;
};

namespace roots_detail {

/// Lift a value to the current working precision.
inline MpFloat mp_lift(const MpFloat& x, unsigned bits) {
  MpFloat y = x;
  y.precision(bits_to_digits10(bits));
  return y;
}

/// Bini-style initial placement: root moduli from the upper convex hull of
/// (i, log2 |a_i|), angles spread with a seed-fixed phase.
inline std::vector<std::complex<double>> initial_guesses(const QPoly& p, std::uint64_t seed) {
  const int d = p.degree();
  std::vector<double> lg(d + 1, -1e300);
  for (int i = 0; i <= d; ++i) {
    if (p.coeff(i) == 0) continue;
    // log2 |a_i| via mpz sizes, good to ~1e-2 which is plenty for a guess
    const Rat& c = p.coeff(i);
    double ln = mpz_sizeinbase(c.get_num().get_mpz_t(), 2);
    double ld = mpz_sizeinbase(c.get_den().get_mpz_t(), 2);
    lg[i] = ln - ld;
  }
  // upper convex hull from i=0 to i=d
  std::vector<int> hull;
  for (int i = 0; i <= d; ++i) {
    if (lg[i] < -1e299) continue;
    while (hull.size() >= 2) {
      int a = hull[hull.size() - 2], b = hull[hull.size() - 1];
      // keep hull upper-convex: slope(a,b) must exceed slope(b,i)
      if ((lg[b] - lg[a]) * (i - b) <= (lg[i] - lg[b]) * (b - a)) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  SplitMix64 rng(seed);
  double phase = 2.0 * M_PI * (double(rng.next() >> 11) / 9007199254740992.0);
  std::vector<std::complex<double>> z;
  z.reserve(d);
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    int i1 = hull[h], i2 = hull[h + 1];
    double r = std::exp2((lg[i1] - lg[i2]) / double(i2 - i1));
    r = std::min(std::max(r, 1e-12), 1e12);
    for (int j = 0; j < i2 - i1; ++j) {
      double th = 2.0 * M_PI * (double(z.size()) + 0.5) / double(d) + phase + 0.4;
      z.emplace_back(r * std::cos(th), r * std::sin(th));
    }
  }
  while (static_cast<int>(z.size()) < d) {
    double th = 2.0 * M_PI * (double(z.size()) + 0.5) / double(d) + phase;
    z.emplace_back(std::cos(th), std::sin(th));
  }
  return z;
}

}  // namespace roots_detail

/// Aberth-Ehrlich simultaneous iteration in arbitrary-precision floating
/// point (Jacobi-style parallel updates within a sweep). Exact zero roots
/// are deflated first; precision doubles until every root's residual-based
/// radius meets the target. Multiple roots come back as clusters sharing a
/// radius.
inline RootSet solve_roots(const QPoly& p, const SolveOptions& opts = {}) {
  if (p.is_zero()) throw invalid_input_error("solve_roots: zero polynomial");
  if (p.degree() < 1) throw invalid_input_error("solve_roots: degree must be >= 1");
  RootSet rs;
  {
    std::uint64_t h = 1469598103934665603ULL;
    for (int i = 0; i <= p.degree(); ++i) h = fnv1a(rat_to_string(p.coeff(i)), h);
    rs.poly_hash = h;
  }
  rs.degree = p.degree();

  // deflate x = 0 roots
  int zero_mult = 0;
  while (zero_mult <= p.degree() && p.coeff(zero_mult) == 0) ++zero_mult;
  std::vector<Rat> defl(p.coeffs().begin() + zero_mult, p.coeffs().end());
  QPoly q(std::move(defl));
  const int d = q.degree();

  std::vector<std::complex<double>> seed_z;
  if (d >= 1) seed_z = roots_detail::initial_guesses(q, opts.seed);

  std::vector<MpComplex> z;
  std::vector<MpFloat> radius;
  unsigned bits = opts.start_precision_bits;
  bool done = (d == 0);
  if (d == 0) rs.converged = true;

  while (!done) {
    set_mp_precision_bits(bits);
    QPoly dq = q.derivative();
    std::vector<MpComplex> coeffs, dcoeffs;
    for (int i = 0; i <= q.degree(); ++i) coeffs.emplace_back(mp_from_rat(q.coeff(i)));
    for (int i = 0; i <= dq.degree(); ++i) dcoeffs.emplace_back(mp_from_rat(dq.coeff(i)));
    // (re)seed or lift current iterates to the new precision
    std::vector<MpComplex> zn(d);
    if (z.empty()) {
      for (int i = 0; i < d; ++i) zn[i] = MpComplex(seed_z[i]);
    } else {
      for (int i = 0; i < d; ++i)
        zn[i] = MpComplex(roots_detail::mp_lift(z[i].re, bits),
                          roots_detail::mp_lift(z[i].im, bits));
    }
    z = std::move(zn);
    radius.assign(d, MpFloat(1e300));

    MpFloat eps = ldexp(MpFloat(1), -int(bits / 2));
    bool stagnated = false;
    int sweep = 0;
    for (; sweep < opts.max_sweeps_per_precision; ++sweep) {
      MpFloat max_move = 0;
      std::vector<MpComplex> w(d);
      std::vector<char> skip(d, 0);
      for (int i = 0; i < d; ++i) {
        MpFloat perr, derr;
        MpComplex pv = mp_horner(coeffs, z[i], bits, &perr);
        MpComplex dv = mp_horner(dcoeffs, z[i], bits, &derr);
        MpFloat pabs = mp_abs(pv), dabs = mp_abs(dv);
        // residual radius: deg * (|p| + err) / (|p'| - err'), guarded
        MpFloat denom = dabs - derr;
        if (denom > 0) radius[i] = MpFloat(d) * (pabs + perr) / denom;
        else radius[i] = MpFloat(1e300);
        if (pabs <= perr) {  // at the noise floor: converged at this precision
          skip[i] = 1;
          continue;
        }
        if (dabs == 0) {  // derivative vanished exactly: nudge
          w[i] = MpComplex(MpFloat(1e-3), MpFloat(1e-3));
          continue;
        }
        MpComplex N = pv / dv;
        MpComplex S(MpFloat(0));
        for (int j = 0; j < d; ++j) {
          if (j == i) continue;
          MpComplex dz = z[i] - z[j];
          if (mp_norm(dz) == 0) {  // coincident iterates: tiny split
            dz = MpComplex(ldexp(MpFloat(1), -int(bits) / 3), MpFloat(0));
          }
          S += MpComplex(MpFloat(1)) / dz;
        }
        MpComplex corr = MpComplex(MpFloat(1)) - N * S;
        w[i] = (mp_norm(corr) == 0) ? N : N / corr;
      }
      for (int i = 0; i < d; ++i)
        if (!skip[i]) {
          z[i] -= w[i];
          MpFloat mv = mp_abs(w[i]) / (mp_abs(z[i]) + MpFloat(1));
          if (mv > max_move) max_move = mv;
        }
      rs.iterations++;
      // stagnation: moves below 2^(-bits/2) while radii still too large
      if (max_move < eps) {
        stagnated = true;
        break;
      }
    }
    // final radii at this precision
    bool all_ok = true;
    for (int i = 0; i < d; ++i) {
      MpFloat perr, derr;
      MpComplex pv = mp_horner(coeffs, z[i], bits, &perr);
      MpComplex dv = mp_horner(dcoeffs, z[i], bits, &derr);
      MpFloat denom = mp_abs(dv) - derr;
      radius[i] = denom > 0 ? MpFloat(d) * (mp_abs(pv) + perr) / denom : MpFloat(1e300);
      if (!(radius[i] <= MpFloat(opts.target_radius))) all_ok = false;
    }
    rs.final_precision_bits = bits;
    if (all_ok) {
      done = true;
      rs.converged = true;
    } else if (bits >= opts.max_precision_bits) {
      done = true;
      rs.converged = false;
      rs.diagnostic = "precision cap reached with oversized radii";
    } else {
      bits *= 2;  // double on stagnation or sweep exhaustion
      (void)stagnated;
    }
  }

  // assemble: zero roots first, then solved roots sorted deterministically
  set_mp_precision_bits(std::max(rs.final_precision_bits, opts.start_precision_bits));
  for (int i = 0; i < zero_mult; ++i)
    rs.roots.push_back({MpComplex(MpFloat(0)), MpFloat(0), zero_mult > 1 ? 0 : -1});
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (z[a].re != z[b].re) return z[a].re < z[b].re;
    return z[a].im < z[b].im;
  });
  for (int t = 0; t < d; ++t) rs.roots.push_back({z[order[t]], radius[order[t]], -1});

  // cluster overlapping disks (multiple roots share one radius)
  const int n = static_cast<int>(rs.roots.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      MpFloat dist = mp_abs(rs.roots[i].value - rs.roots[j].value);
      if (dist <= rs.roots[i].radius + rs.roots[j].radius) parent[find(i)] = find(j);
    }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  int cid = 0;
  for (auto& [root, members] : groups) {
    if (members.size() < 2) continue;
    MpFloat shared(0);
    for (std::size_t a = 0; a < members.size(); ++a) {
      if (rs.roots[members[a]].radius > shared) shared = rs.roots[members[a]].radius;
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        MpFloat dd = mp_abs(rs.roots[members[a]].value - rs.roots[members[b]].value);
        if (dd > shared) shared = dd;
      }
    }
    for (int m : members) {
      rs.roots[m].cluster = cid;
      rs.roots[m].radius = shared;
    }
    ++cid;
  }
  return rs;
}

struct VietaReport {
  bool sum_ok = false, product_ok = false;
  double sum_error = 0, product_error = 0;
  double sum_tolerance = 0, product_tolerance = 0;
};

/// Compares sum and product of the computed roots against the coefficient
/// ratios, within the accumulated inclusion radii.
inline VietaReport vieta_check(const QPoly& p, const RootSet& rs) {
  unsigned bits = std::max(rs.final_precision_bits, 128u);
  set_mp_precision_bits(bits);
  const int d = p.degree();
  MpComplex sum(MpFloat(0)), prod(MpFloat(1));
  MpFloat sum_tol(0), prod_rel_tol(0);
  for (auto& r : rs.roots) {
    sum += r.value;
    prod = prod * r.value;
    sum_tol += r.radius;
    MpFloat av = mp_abs(r.value);
    prod_rel_tol += (av > 0 ? r.radius / av : MpFloat(1));
  }
  MpComplex lead(mp_from_rat(p.coeff(d)));
  Rat c1 = p.coeff(d - 1);
  Rat c0 = p.coeff(0);
  if (d % 2) c0 = -c0;
  MpComplex want_sum = MpComplex(mp_from_rat(-c1)) / lead;
  MpComplex want_prod = MpComplex(mp_from_rat(c0)) / lead;
  VietaReport rep;
  MpFloat se = mp_abs(sum - want_sum);
  rep.sum_error = se.convert_to<double>();
  rep.sum_tolerance = (sum_tol + MpFloat(1e-25)).convert_to<double>();
  rep.sum_ok = se <= sum_tol + MpFloat(1e-25);
  MpFloat pe = mp_abs(prod - want_prod);
  MpFloat pscale = mp_abs(want_prod) + MpFloat(1);
  rep.product_error = (pe / pscale).convert_to<double>();
  rep.product_tolerance = (prod_rel_tol + MpFloat(1e-25)).convert_to<double>();
  rep.product_ok = pe <= (prod_rel_tol + MpFloat(1e-25)) * pscale;
  return rep;
}

}  // namespace potts
