#pragma once

#include <cmath>
#include <mutex>
#include <vector>

#include "potts/dense_poly.hpp"
#include "potts/qlinalg.hpp"

namespace potts {

// Characteristic polynomials of exact rational matrices via multimodular
// Hessenberg reduction + CRT. This is the workhorse behind eigenvalue
// distinctness certificates and the integer-Q audits, where matrices reach
// dimension ~150 and direct fraction arithmetic would blow up.

namespace modular_detail {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>(u128(a) * b % p); }

inline u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

inline u64 invmod(u64 a, u64 p) { return powmod(a % p, p - 2, p); }

/// Deterministic pool of 61-bit primes, grown on demand.
inline std::vector<u64> prime_pool(std::size_t need) {
  static std::mutex mu;
  static std::vector<u64> primes;
  static u64 candidate = (u64(1) << 61) - 1;
  std::lock_guard<std::mutex> lock(mu);
  while (primes.size() < need) {
    mpz_class c(static_cast<unsigned long>(candidate));
    if (mpz_probab_prime_p(c.get_mpz_t(), 30) > 0) primes.push_back(candidate);
    candidate -= 2;
  }
  return std::vector<u64>(primes.begin(), primes.begin() + need);
}

inline u64 mpz_mod_u64(const mpz_class& z, u64 p) {
  return static_cast<u64>(mpz_fdiv_ui(z.get_mpz_t(), static_cast<unsigned long>(p)));
}

inline u64 rat_mod_u64(const Rat& q, u64 p) {
  u64 num = mpz_mod_u64(q.get_num(), p);
  u64 den = mpz_mod_u64(q.get_den(), p);
  if (den == 0) throw numeric_error("modular image of rational hit a bad prime");
  return mulmod(num, invmod(den, p), p);
}

inline Int u64_to_mpz(u64 x) { return Int(static_cast<unsigned long>(x)); }

/// Char poly of an n x n matrix over Z_p via similarity reduction to upper
/// Hessenberg form, then the standard leading-minor recurrence.
/// Input row-major with entries already reduced; coefficients ascending.
inline std::vector<u64> charpoly_mod_p(std::vector<u64> a, int n, u64 p) {
  auto at = [&](int i, int j) -> u64& { return a[std::size_t(i) * n + j]; };
  for (int col = 0; col + 2 < n; ++col) {
    int piv = -1;
    for (int i = col + 1; i < n; ++i)
      if (at(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != col + 1) {
      for (int j = 0; j < n; ++j) std::swap(at(piv, j), at(col + 1, j));
      for (int i = 0; i < n; ++i) std::swap(at(i, piv), at(i, col + 1));
    }
    u64 inv = invmod(at(col + 1, col), p);
    for (int i = col + 2; i < n; ++i) {
      u64 f = mulmod(at(i, col), inv, p);
      if (!f) continue;
      u64 nf = p - f;
      for (int j = col; j < n; ++j) at(i, j) = (at(i, j) + mulmod(nf, at(col + 1, j), p)) % p;
      // compensating column operation keeps the matrix similar
      for (int j = 0; j < n; ++j) at(j, col + 1) = (at(j, col + 1) + mulmod(f, at(j, i), p)) % p;
    }
  }
  std::vector<std::vector<u64>> c(n + 1);
  c[0] = {1};
  for (int m = 1; m <= n; ++m) {
    std::vector<u64> cm(m + 1, 0);
    const std::vector<u64>& prev = c[m - 1];
    u64 d = at(m - 1, m - 1);
    for (int t = 0; t < m; ++t) {
      cm[t + 1] = (cm[t + 1] + prev[t]) % p;
      cm[t] = (cm[t] + p - mulmod(d, prev[t], p)) % p;
    }
    u64 sub = 1;
    for (int i = 1; i <= m - 1; ++i) {
      sub = mulmod(sub, at(m - i, m - i - 1), p);
      if (!sub) break;
      u64 f = mulmod(sub, at(m - 1 - i, m - 1), p);
      if (!f) continue;
      const std::vector<u64>& ci = c[m - 1 - i];
      for (int t = 0; t <= m - 1 - i; ++t) cm[t] = (cm[t] + p - mulmod(f, ci[t], p)) % p;
    }
    c[m] = std::move(cm);
  }
  return c[n];
}

inline bool reduce_qpoly_mod(const QPoly& f, u64 p, std::vector<u64>* out) {
  if (f.is_zero()) return false;
  out->assign(f.degree() + 1, 0);
  for (int i = 0; i <= f.degree(); ++i) (*out)[i] = rat_mod_u64(f.coeff(i), p);
  return out->back() != 0;  // leading coefficient must survive
}

/// Monic gcd mod p; empty result only if both inputs are zero.
inline std::vector<u64> gcd_mod_p(std::vector<u64> fa, std::vector<u64> fb, u64 p) {
  while (!fb.empty()) {
    u64 inv = invmod(fb.back(), p);
    while (fa.size() >= fb.size()) {
      u64 f = mulmod(fa.back(), inv, p);
      std::size_t off = fa.size() - fb.size();
      for (std::size_t i = 0; i < fb.size(); ++i)
        fa[off + i] = (fa[off + i] + p - mulmod(f, fb[i], p)) % p;
      while (!fa.empty() && fa.back() == 0) fa.pop_back();
      if (fa.empty()) break;
    }
    std::swap(fa, fb);
  }
  if (!fa.empty()) {
    u64 inv = invmod(fa.back(), p);
    for (auto& cc : fa) cc = mulmod(cc, inv, p);
  }
  return fa;
}

// Wang rational reconstruction of r mod m with |num|, den <= sqrt(m/2).
inline bool rational_reconstruct(const Int& r, const Int& m, Rat* out) {
  Int a = m, b = r % m;
  if (b < 0) b += m;
  Int x0 = 0, x1 = 1;
  Int bound;
  mpz_sqrt(bound.get_mpz_t(), mpz_class(m / 2).get_mpz_t());
  while (b > bound) {
    if (b == 0) return false;
    Int q = a / b;
    Int t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
  }
  if (x1 == 0) return false;
  if (x1 < 0) {
    x1 = -x1;
    b = -b;
  }
  if (x1 > bound) return false;
  Rat q(b, x1);
  q.canonicalize();
  *out = q;
  return true;
}

}  // namespace modular_detail

/// Exact characteristic polynomial of a rational matrix (row-major, n x n),
/// via CRT over 61-bit primes under a Hadamard-style coefficient bound.
inline QPoly charpoly_exact(const std::vector<Rat>& m, int n, int threads = 0) {
  using namespace modular_detail;
  if (n == 0) return QPoly::constant(Rat(1));
  // clear denominators: M = Mhat / d, so char_M(x) = d^{-n} char_Mhat(d x)
  Int d = 1;
  for (auto& q : m) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), q.get_den().get_mpz_t());
  std::vector<Int> hat(m.size());
  double log2norm = 1;
  for (int i = 0; i < n; ++i) {
    double emax = 0;
    for (int j = 0; j < n; ++j) {
      Rat q = m[std::size_t(i) * n + j] * Rat(d);
      hat[std::size_t(i) * n + j] = q.get_num();
      if (q != 0)
        emax = std::max(
            emax, double(mpz_sizeinbase(hat[std::size_t(i) * n + j].get_mpz_t(), 2)));
    }
    log2norm = std::max(log2norm, emax + 0.5 * std::log2(double(n)) + 1.0);
  }
  double bits = double(n) * (log2norm + 1.0) + n + 64;
  std::size_t nprimes = static_cast<std::size_t>(bits / 60.0) + 2;
  const auto primes = prime_pool(nprimes);

  std::vector<std::vector<u64>> residues(nprimes);
  parallel_for(
      nprimes,
      [&](std::size_t pi) {
        u64 p = primes[pi];
        std::vector<u64> mp(hat.size());
        for (std::size_t i = 0; i < hat.size(); ++i) mp[i] = mpz_mod_u64(hat[i], p);
        residues[pi] = charpoly_mod_p(std::move(mp), n, p);
      },
      threads);

  Int modulus = 1;
  std::vector<Int> coeff(n + 1, Int(0));
  for (std::size_t pi = 0; pi < nprimes; ++pi) {
    Int p = u64_to_mpz(primes[pi]);
    if (pi == 0) {
      for (int t = 0; t <= n; ++t) coeff[t] = u64_to_mpz(residues[pi][t]);
      modulus = p;
      continue;
    }
    Int inv;
    mpz_invert(inv.get_mpz_t(), modulus.get_mpz_t(), p.get_mpz_t());
    for (int t = 0; t <= n; ++t) {
      Int r = u64_to_mpz(residues[pi][t]);
      Int delta = ((r - coeff[t] % p) % p + p) % p;
      coeff[t] += modulus * ((delta * inv) % p);
    }
    modulus *= p;
  }
  Int half = modulus / 2;
  std::vector<Rat> out(n + 1);
  for (int t = 0; t <= n; ++t) {
    if (coeff[t] > half) coeff[t] -= modulus;
    Rat q(coeff[t]);
    if (d != 1) q /= Rat(int_pow(d, static_cast<unsigned long>(n - t)));
    out[t] = q;
  }
  return QPoly(std::move(out));
}

inline QPoly charpoly_exact(const QMatrix& m, int threads = 0) {
  std::vector<Rat> a(std::size_t(m.rows()) * m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) a[std::size_t(i) * m.cols() + j] = m.at(i, j);
  return charpoly_exact(a, m.rows(), threads);
}

/// Sound one-sided coprimality certificate: a constant gcd mod one good
/// prime implies gcd = 1 over Q. Returns true when certified coprime,
/// false when inconclusive (never "certified non-coprime").
inline bool certify_coprime_mod(const QPoly& a, const QPoly& b, int attempts = 6) {
  using namespace modular_detail;
  if (a.is_zero() || b.is_zero()) return false;
  if (a.degree() == 0 || b.degree() == 0) return true;
  const auto primes = prime_pool(attempts);
  for (int t = 0; t < attempts; ++t) {
    u64 p = primes[t];
    std::vector<u64> fa, fb;
    try {
      if (!reduce_qpoly_mod(a, p, &fa) || !reduce_qpoly_mod(b, p, &fb)) continue;
    } catch (const numeric_error&) {
      continue;
    }
    std::vector<u64> g = gcd_mod_p(std::move(fa), std::move(fb), p);
    if (g.size() == 1) return true;
  }
  return false;
}

/// Squarefreeness certificate via gcd(p, p') = 1 mod a good prime.
inline bool certify_squarefree_mod(const QPoly& p, int attempts = 6) {
  if (p.degree() <= 1) return true;
  return certify_coprime_mod(p, p.derivative(), attempts);
}

/// Exact monic gcd over Q[x] by modular images + CRT + rational
/// reconstruction, certified by exact trial division of both inputs.
inline QPoly qpoly_gcd_certified(const QPoly& a, const QPoly& b) {
  using namespace modular_detail;
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.degree() <= 12 && b.degree() <= 12) return qpoly_gcd(a, b);

  const std::size_t kMaxPrimes = 800;
  const auto primes = prime_pool(kMaxPrimes);
  int expected_deg = -1;
  std::vector<Int> num;
  Int modulus = 1;
  std::size_t used = 0;
  for (std::size_t pi = 0; pi < kMaxPrimes; ++pi) {
    u64 p = primes[pi];
    std::vector<u64> fa, fb;
    try {
      if (!reduce_qpoly_mod(a, p, &fa) || !reduce_qpoly_mod(b, p, &fb)) continue;
    } catch (const numeric_error&) {
      continue;
    }
    std::vector<u64> g = gcd_mod_p(std::move(fa), std::move(fb), p);
    int dg = static_cast<int>(g.size()) - 1;
    if (dg == 0) return QPoly::constant(Rat(1));
    if (expected_deg < 0 || dg < expected_deg) {
      expected_deg = dg;
      num.assign(dg + 1, Int(0));
      modulus = 1;
      used = 0;
    } else if (dg > expected_deg) {
      continue;  // unlucky prime
    }
    Int P = u64_to_mpz(p);
    if (used == 0) {
      for (int t = 0; t <= dg; ++t) num[t] = u64_to_mpz(g[t]);
      modulus = P;
    } else {
      Int inv;
      mpz_invert(inv.get_mpz_t(), modulus.get_mpz_t(), P.get_mpz_t());
      for (int t = 0; t <= dg; ++t) {
        Int r = u64_to_mpz(g[t]);
        Int delta = ((r - num[t] % P) % P + P) % P;
        num[t] += modulus * ((delta * inv) % P);
      }
      modulus *= P;
    }
    ++used;
    if (used % 2 == 0 || expected_deg == 0) {
      std::vector<Rat> cand(expected_deg + 1);
      bool ok = true;
      for (int t = 0; t <= expected_deg && ok; ++t)
        ok = rational_reconstruct(num[t], modulus, &cand[t]);
      if (!ok) continue;
      QPoly g_cand{std::vector<Rat>(cand)};
      if (g_cand.degree() != expected_deg) continue;
      QPoly r1, r2;
      a.divmod(g_cand, nullptr, &r1);
      if (!r1.is_zero()) continue;
      b.divmod(g_cand, nullptr, &r2);
      if (r2.is_zero()) return g_cand;
    }
  }
  throw numeric_error("modular gcd failed to stabilize");
}

}  // namespace potts
