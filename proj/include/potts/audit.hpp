#pragma once

#include "potts/graphs.hpp"
#include "potts/transfer.hpp"

namespace potts {

// ---------------------------------------------------------------------------
// Integer-Q eigenvalue-cancellation audit (Q = N)
// ---------------------------------------------------------------------------
// At integer Q the sectors of the complete decomposition develop exact
// eigenvalue coincidences, and the partition function collapses onto a few
// surviving "characters". The audit detects the coincidence classes
// exactly -- per rational sample point v = t the sector characteristic
// polynomials are computed exactly and refined into a squarefree,
// pairwise-coprime basis over Q[x], so a basis factor of degree g is a
// bundle of g eigenvalue classes sharing one sector-multiplicity signature.
// Everything downstream (net amplitudes, survivor counts, the sum rule) is
// integer arithmetic on these signatures, cross-checked over three sample
// points and validated end-to-end against the spin-representation oracle.

namespace audit_detail {

/// Yun's squarefree decomposition: f = prod_i out[i]^(i+1) with the out[i]
/// squarefree and pairwise coprime (monic).
inline std::vector<QPoly> squarefree_decomposition(QPoly f) {
  std::vector<QPoly> out;
  if (f.degree() < 1) return out;
  Rat inv = Rat(1) / f.leading();
  f = f * inv;
  QPoly fp = f.derivative();
  QPoly a = qpoly_gcd_certified(f, fp);
  QPoly b, c, d;
  f.divmod(a, &b, nullptr);
  fp.divmod(a, &c, nullptr);
  d = c - b.derivative();
  while (b.degree() > 0) {
    QPoly g = qpoly_gcd_certified(b, d);
    out.push_back(g);
    QPoly b2, c2;
    b.divmod(g, &b2, nullptr);
    d.divmod(g, &c2, nullptr);
    b = b2;
    d = c2 - b.derivative();
  }
  return out;
}

/// Pairwise-coprime squarefree basis of a set of squarefree polys.
inline std::vector<QPoly> gcd_free_basis(std::vector<QPoly> in) {
  std::vector<QPoly> basis;
  for (QPoly g : in) {
    if (g.degree() < 1) continue;
    std::vector<QPoly> next;
    for (std::size_t bi = 0; bi < basis.size() && g.degree() > 0; ++bi) {
      QPoly& b = basis[bi];
      QPoly h = qpoly_gcd_certified(g, b);
      if (h.degree() < 1) continue;
      QPoly brest, grest;
      b.divmod(h, &brest, nullptr);
      g.divmod(h, &grest, nullptr);
      b = brest;  // may become constant; filtered later
      next.push_back(h);
      g = grest;
    }
    for (auto& h : next) basis.push_back(h);
    if (g.degree() > 0) basis.push_back(g);
    basis.erase(std::remove_if(basis.begin(), basis.end(),
                               [](const QPoly& p) { return p.degree() < 1; }),
                basis.end());
  }
  return basis;
}

/// Multiplicity of b in f (number of exact divisions).
inline int multiplicity_of(const QPoly& f, const QPoly& b) {
  int m = 0;
  QPoly cur = f;
  while (cur.degree() >= b.degree()) {
    QPoly q, r;
    cur.divmod(b, &q, &r);
    if (!r.is_zero()) break;
    cur = q;
    ++m;
  }
  return m;
}

/// Multiplicity of the linear root x = r in f.
inline int linear_multiplicity(QPoly f, const Rat& r) {
  int m = 0;
  while (f.degree() >= 1) {
    Rat rem;
    QPoly q = f.divide_linear(r, &rem);
    if (rem != 0) break;
    f = q;
    ++m;
  }
  return m;
}

/// Dense matrix of v-polynomials (a block specialized at Q = N).
struct VPolyMatrix {
  int n = 0;
  std::vector<QPoly> a;  // row-major
  const QPoly& at(int i, int j) const { return a[std::size_t(i) * n + j]; }
};

inline QPoly dot_trace(const VPolyMatrix& A, const VPolyMatrix& B) {
  QPoly t;
  for (int i = 0; i < A.n; ++i)
    for (int j = 0; j < A.n; ++j)
      if (!A.at(i, j).is_zero() && !B.at(j, i).is_zero()) t += A.at(i, j) * B.at(j, i);
  return t;
}

inline VPolyMatrix vmat_mult(const VPolyMatrix& A, const VPolyMatrix& B, int threads = 0) {
  VPolyMatrix C;
  C.n = A.n;
  C.a.assign(std::size_t(A.n) * A.n, QPoly());
  parallel_for(
      A.n,
      [&](std::size_t i) {
        for (int t = 0; t < A.n; ++t) {
          const QPoly& x = A.at(int(i), t);
          if (x.is_zero()) continue;
          for (int j = 0; j < A.n; ++j)
            if (!B.at(t, j).is_zero()) C.a[i * A.n + j] += x * B.at(t, j);
        }
      },
      threads);
  return C;
}

/// tr(M^n) for small n without forming the full power when avoidable.
inline QPoly trace_power(const VPolyMatrix& M, int n, int threads = 0) {
  if (n == 1) {
    QPoly t;
    for (int i = 0; i < M.n; ++i) t += M.at(i, i);
    return t;
  }
  if (n == 2) return dot_trace(M, M);
  if (n == 3) return dot_trace(vmat_mult(M, M, threads), M);
  if (n == 4) {
    VPolyMatrix M2 = vmat_mult(M, M, threads);
    return dot_trace(M2, M2);
  }
  VPolyMatrix P = vmat_mult(M, M, threads);
  for (int i = 3; i < n; ++i) P = vmat_mult(P, M, threads);
  return dot_trace(P, M);
}

}  // namespace audit_detail

struct CancellationReport {
  int k = 0, N = 0;

  struct Sector {
    std::string name;  // "l=2 (1,1)", "l=k reduced", "trivial"
    int ell = 0;
    YoungDiagram lambda;
    bool is_reduced = false, is_trivial = false;
    Rat weight;      // alpha(N), beta_k(N) or gamma_{k+1}(N)
    int nt_dim = 0;  // generic nontrivial dimension
    int became_trivial = 0;  // nontrivial-at-generic-Q eigenvalues equal to v^2k at Q=N
  };
  std::vector<Sector> sectors;

  struct Bundle {
    int size = 0;                // number of eigenvalue classes in the bundle
    std::vector<int> mult;       // per-sector multiplicity signature
    Rat net_weight;              // sum weight_s * mult_s
  };
  std::vector<Bundle> bundles;   // canonical order (sorted signatures)

  Rat rho;                       // net coefficient of the trivial v^{2kn}
  Int survivor_count;            // classes with nonzero net weight (nontrivial)
  std::vector<Int> contributing; // N-tilde per sector (aligned with sectors)
  bool single_sector_survivors = true;

  bool consistent_across_points = false;
  bool sum_rule_ok = false;
  Int sum_rule_lhs, sum_rule_rhs;
  bool reconstruction_ok = false;  // Z(N,v) == spin oracle for the checked n
  std::vector<int> reconstruction_n;
  std::vector<std::string> notes;
};

struct AuditOptions {
  std::vector<long> sample_points = {19, 31, 43};  // v = t samples
  std::vector<int> reconstruction_n = {2};
  int spin_dim_cap = 4096;
  int threads = 0;
};

/// Full integer-Q audit at Q = N for a Petersen decomposition.
inline CancellationReport integer_q_audit(const TransferDecomposition& deco, int N,
                                          const AuditOptions& opts = {}) {
  using namespace audit_detail;
  if (deco.family != "petersen")
    throw invalid_input_error("integer_q_audit expects a Petersen decomposition");
  if (N < 0) throw invalid_input_error("integer_q_audit requires N >= 0");
  const int k = deco.k;
  const int texp = deco.trivial_exponent;
  const Rat qN = make_rat(N);

  CancellationReport rep;
  rep.k = k;
  rep.N = N;

  // sector inventory of the complete decomposition
  struct Work {
    const TransferBlock* block;  // null for the trivial sector
    int strip_trivial = 0;       // generic trivial copies to divide out
  };
  std::vector<Work> work;
  for (auto& b : deco.blocks) {
    if (b.ell >= k) continue;
    if (b.nontrivial_dim() == 0) continue;
    CancellationReport::Sector s;
    s.ell = b.ell;
    s.lambda = b.lambda;
    s.name = "l=" + std::to_string(b.ell) + " " + b.lambda.to_string();
    s.weight = amplitude(b.ell, b.lambda).eval(qN);
    s.nt_dim = b.nontrivial_dim();
    rep.sectors.push_back(s);
    work.push_back({&b, b.trivial_mult});
  }
  {
    const TransferBlock& sym = deco.reduced_source();
    CancellationReport::Sector s;
    s.ell = k;
    s.is_reduced = true;
    s.name = "l=k reduced";
    s.weight = deco.beta_k.eval(qN);
    s.nt_dim = deco.reduced_dim();
    rep.sectors.push_back(s);
    work.push_back({&sym, sym.trivial_mult});
  }
  {
    CancellationReport::Sector s;
    s.ell = deco.width;
    s.is_trivial = true;
    s.name = "trivial";
    s.weight = deco.gamma_kp1.eval(qN);
    s.nt_dim = 1;
    rep.sectors.push_back(s);
    work.push_back({nullptr, 0});
  }
  const int S = static_cast<int>(rep.sectors.size());

  // per sample point: exact char polys, trivial part, class bundles
  struct PointData {
    std::vector<int> became_trivial;
    Rat rho;
    std::vector<CancellationReport::Bundle> bundles;
  };
  std::vector<PointData> per_point;

  for (long t : opts.sample_points) {
    PointData pd;
    pd.became_trivial.assign(S, 0);
    Rat vt = make_rat(t);
    Rat mu = rat_pow(vt, texp);
    std::vector<QPoly> polys(S);
    for (int s = 0; s < S; ++s) {
      if (rep.sectors[s].is_trivial) {
        polys[s] = QPoly{std::vector<Rat>{-mu, Rat(1)}};
        continue;
      }
      const TransferBlock& b = *work[s].block;
      QPoly chi = charpoly_exact(b.matrix.eval(qN, vt), opts.threads);
      for (int i = 0; i < work[s].strip_trivial; ++i) {
        Rat rem;
        QPoly q2 = chi.divide_linear(mu, &rem);
        if (rem != 0)
          throw numeric_error("generic trivial multiplicity failed to divide at Q=N");
        chi = q2;
      }
      polys[s] = chi;
    }
    // split off the trivial root from each sector exactly
    Rat rho(0);
    for (int s = 0; s < S; ++s) {
      int m = linear_multiplicity(polys[s], mu);
      if (!rep.sectors[s].is_trivial) pd.became_trivial[s] = m;
      rho += rep.sectors[s].weight * Rat(m);
      for (int i = 0; i < m; ++i) {
        Rat rem;
        polys[s] = polys[s].divide_linear(mu, &rem);
      }
    }
    pd.rho = rho;
    // squarefree refinement into bundles
    std::vector<std::vector<QPoly>> sqf(S);
    std::vector<QPoly> all;
    for (int s = 0; s < S; ++s) {
      sqf[s] = squarefree_decomposition(polys[s]);
      for (auto& g : sqf[s]) all.push_back(g);
    }
    std::vector<QPoly> basis = gcd_free_basis(all);
    for (auto& b : basis) {
      CancellationReport::Bundle bun;
      bun.size = b.degree();
      bun.mult.assign(S, 0);
      for (int s = 0; s < S; ++s) {
        int m = 0;
        for (std::size_t level = 0; level < sqf[s].size(); ++level) {
          QPoly g = qpoly_gcd_certified(sqf[s][level], b);
          if (g.degree() == b.degree()) m = static_cast<int>(level) + 1;
          else if (g.degree() > 0)
            throw numeric_error("gcd-free basis failed to separate a bundle");
        }
        bun.mult[s] = m;
        bun.net_weight += rep.sectors[s].weight * Rat(m);
      }
      pd.bundles.push_back(std::move(bun));
    }
    std::sort(pd.bundles.begin(), pd.bundles.end(), [](const auto& a, const auto& b) {
      if (a.size != b.size) return a.size < b.size;
      if (a.mult != b.mult) return a.mult < b.mult;
      return a.net_weight < b.net_weight;
    });
    per_point.push_back(std::move(pd));
  }

  // cross-point consistency
  rep.consistent_across_points = true;
  for (std::size_t p = 1; p < per_point.size(); ++p) {
    if (per_point[p].rho != per_point[0].rho ||
        per_point[p].became_trivial != per_point[0].became_trivial)
      rep.consistent_across_points = false;
    if (per_point[p].bundles.size() != per_point[0].bundles.size()) {
      rep.consistent_across_points = false;
      continue;
    }
    for (std::size_t i = 0; i < per_point[p].bundles.size(); ++i) {
      const auto& a = per_point[p].bundles[i];
      const auto& b = per_point[0].bundles[i];
      if (a.size != b.size || a.mult != b.mult || !(a.net_weight == b.net_weight))
        rep.consistent_across_points = false;
    }
  }
  if (!rep.consistent_across_points)
    rep.notes.push_back("class structure differs across sample points (unresolved classes)");

  rep.bundles = per_point[0].bundles;
  rep.rho = per_point[0].rho;
  for (int s = 0; s < S; ++s) rep.sectors[s].became_trivial = per_point[0].became_trivial[s];

  // survivors, per-sector contributing counts, the sum rule
  rep.survivor_count = 0;
  rep.contributing.assign(S, Int(0));
  Int lhs = 0;
  for (auto& b : rep.bundles) {
    if (b.net_weight == 0) continue;
    rep.survivor_count += b.size;
    int sectors_present = 0;
    for (int s = 0; s < S; ++s)
      if (b.mult[s] > 0) {
        rep.contributing[s] += Int(b.mult[s]) * b.size;
        ++sectors_present;
      }
    if (sectors_present > 1) rep.single_sector_survivors = false;
    Rat w = b.net_weight * Rat(b.size);
    if (!rat_is_integer(w))
      rep.notes.push_back("non-integer net bundle weight (unexpected)");
    lhs += w.get_num();
  }
  {
    Rat w = rep.rho;
    if (!rat_is_integer(w)) rep.notes.push_back("non-integer rho (unexpected)");
    lhs += w.get_num();
  }
  rep.sum_rule_lhs = lhs;
  rep.sum_rule_rhs = int_pow(Int(N), static_cast<unsigned long>(k + 1));
  rep.sum_rule_ok = (rep.sum_rule_lhs == rep.sum_rule_rhs);

  // end-to-end reconstruction: Z(N,v) from the reduced decomposition versus
  // the spin transfer oracle, as exact polynomials in v
  rep.reconstruction_ok = true;
  for (int n : opts.reconstruction_n) {
    rep.reconstruction_n.push_back(n);
    QPoly z;
    for (int s = 0; s < S; ++s) {
      if (rep.sectors[s].is_trivial) {
        QPoly tpow;
        tpow.set_coeff(std::size_t(texp) * n, Rat(1));
        z += tpow * rep.sectors[s].weight;
        continue;
      }
      const TransferBlock& b = *work[s].block;
      VPolyMatrix M;
      M.n = b.dim();
      M.a = b.matrix.eval_at_Q(qN);
      QPoly tr = trace_power(M, n, opts.threads);
      if (work[s].strip_trivial > 0) {
        QPoly tpow;
        tpow.set_coeff(std::size_t(texp) * n, Rat(work[s].strip_trivial));
        tr -= tpow;
      }
      z += tr * rep.sectors[s].weight;
    }
    double dim_est = std::pow(double(N), k + 1);
    if (dim_est <= double(opts.spin_dim_cap)) {
      QPoly zspin;
      if (N > 0) {
        std::vector<QPoly> T = spin_transfer_matrix(k, N, opts.spin_dim_cap);
        VPolyMatrix M;
        M.n = static_cast<int>(std::lround(dim_est));
        M.a = std::move(T);
        zspin = trace_power(M, n, opts.threads);
      }
      if (!(z == zspin)) {
        rep.reconstruction_ok = false;
        rep.notes.push_back("Z reconstruction mismatch vs spin oracle at n=" + std::to_string(n));
      }
    } else {
      rep.notes.push_back("spin oracle skipped at n=" + std::to_string(n) +
                          " (dimension over cap)");
    }
  }
  return rep;
}

}  // namespace potts
