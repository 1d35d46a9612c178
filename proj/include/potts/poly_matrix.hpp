#pragma once

#include <complex>

#include "potts/bivar_poly.hpp"
#include "potts/modular.hpp"
#include "potts/qlinalg.hpp"

namespace potts {

/// Rectangular matrix of exact bivariate polynomials.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(int rows, int cols) : r_(rows), c_(cols), a_(std::size_t(rows) * cols) {}

  int rows() const { return r_; }
  int cols() const { return c_; }
  bool empty() const { return r_ == 0 || c_ == 0; }
  BivarPoly& at(int i, int j) { return a_[std::size_t(i) * c_ + j]; }
  const BivarPoly& at(int i, int j) const { return a_[std::size_t(i) * c_ + j]; }

  static PolyMatrix identity(int n) {
    PolyMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = BivarPoly(1);
    return m;
  }

  bool operator==(const PolyMatrix& o) const { return r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }

  std::size_t total_terms() const {
    std::size_t t = 0;
    for (auto& p : a_) t += p.term_count();
    return t;
  }

  PolyMatrix multiply(const PolyMatrix& o, int threads = 0) const {
    if (c_ != o.r_) throw invalid_input_error("PolyMatrix shape mismatch");
    PolyMatrix m(r_, o.c_);
    parallel_for(
        r_,
        [&](std::size_t i) {
          for (int k = 0; k < c_; ++k) {
            const BivarPoly& x = at(int(i), k);
            if (x.is_zero()) continue;
            for (int j = 0; j < o.c_; ++j) {
              const BivarPoly& y = o.at(k, j);
              if (!y.is_zero()) m.at(int(i), j) += x * y;
            }
          }
        },
        threads);
    return m;
  }
  PolyMatrix operator*(const PolyMatrix& o) const { return multiply(o); }

  BivarPoly trace() const {
    if (r_ != c_) throw invalid_input_error("trace of non-square matrix");
    BivarPoly t;
    for (int i = 0; i < r_; ++i) t += at(i, i);
    return t;
  }

  QMatrix eval(const Rat& q, const Rat& v) const {
    QMatrix m(r_, c_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) m.at(i, j) = at(i, j).eval(q, v);
    return m;
  }

  /// Row-major complex evaluation (consumed by the dense eigensolver).
  std::vector<std::complex<double>> eval_complex(std::complex<double> q,
                                                 std::complex<double> v) const {
    std::vector<std::complex<double>> m(a_.size());
    for (std::size_t i = 0; i < a_.size(); ++i) m[i] = a_[i].eval(q, v);
    return m;
  }

  /// Entry-wise specialization Q = N, keeping v symbolic, as dense v-polys.
  std::vector<QPoly> eval_at_Q(const Rat& q) const {
    std::vector<QPoly> m(a_.size());
    for (std::size_t i = 0; i < a_.size(); ++i) {
      const BivarPoly& p = a_[i];
      std::vector<Rat> c(std::max(p.deg_v() + 1, 0), Rat(0));
      for (auto& [k, coef] : p.terms()) c[k.second] += coef * rat_pow(q, k.first);
      m[i] = QPoly(std::move(c));
    }
    return m;
  }

  nlohmann::json to_json() const {
    nlohmann::json entries = nlohmann::json::array();
    for (auto& p : a_) entries.push_back(p.to_json()["terms"]);
    return {{"rows", r_}, {"cols", c_}, {"entries", entries}};
  }
  static PolyMatrix from_json(const nlohmann::json& j) {
    PolyMatrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
    auto& entries = j.at("entries");
    for (std::size_t i = 0; i < m.a_.size(); ++i)
      m.a_[i] = BivarPoly::from_json({{"terms", entries.at(i)}});
    return m;
  }

  std::uint64_t content_hash() const {
    std::uint64_t h = fnv1a(&r_, sizeof r_);
    h = fnv1a(&c_, sizeof c_, h);
    for (auto& p : a_) {
      std::uint64_t ph = p.content_hash();
      h = fnv1a(&ph, sizeof ph, h);
    }
    return h;
  }

 private:
  int r_ = 0, c_ = 0;
  std::vector<BivarPoly> a_;
};

/// tr(M^n), binary powering with an intermediate-size cap; falls back to
/// sequential products (lower peak memory) when the cap is exceeded.
inline BivarPoly trace_of_power(const PolyMatrix& m, int n, std::size_t term_cap = 80'000'000,
                                int threads = 0) {
  if (m.rows() != m.cols()) throw invalid_input_error("trace_of_power needs a square matrix");
  if (n < 1) throw invalid_input_error("trace_of_power needs n >= 1");
  if (m.rows() == 0) return BivarPoly();
  if (n == 1) return m.trace();

  auto dot_trace = [&](const PolyMatrix& a, const PolyMatrix& b) {
    BivarPoly t;
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j)
        if (!a.at(i, j).is_zero() && !b.at(j, i).is_zero()) t += a.at(i, j) * b.at(j, i);
    return t;
  };

  // tr(M^n) = sum_ij (M^floor(n/2))_ij (M^ceil(n/2))_ji
  int half = n / 2;
  bool overflowed = false;
  PolyMatrix p;  // M^half by binary powering
  {
    PolyMatrix base = m, acc;
    bool have = false;
    int e = half;
    while (e) {
      if (e & 1) {
        acc = have ? acc.multiply(base, threads) : base;
        have = true;
        if (acc.total_terms() > term_cap) {
          overflowed = true;
          break;
        }
      }
      e >>= 1;
      if (e) {
        base = base.multiply(base, threads);
        if (base.total_terms() > term_cap) {
          overflowed = true;
          break;
        }
      }
    }
    if (!overflowed) p = acc;
  }
  if (overflowed) {
    // sequential: keep one running power only
    PolyMatrix acc = m;
    for (int i = 2; i <= n - 1; ++i) {
      acc = acc.multiply(m, threads);
      if (acc.total_terms() > term_cap)
        throw resource_limit_error("trace_of_power exceeded the term cap");
    }
    return dot_trace(acc, m);
  }
  if (n % 2 == 0) return dot_trace(p, p);
  return dot_trace(p, p.multiply(m, threads));
}

/// Exact characteristic polynomial over the ring of bivariate polynomials
/// (Faddeev-LeVerrier; exact integer divisions only).
inline DensePoly<BivarPoly> char_poly(const PolyMatrix& m, int dim_cap = 40) {
  if (m.rows() != m.cols()) throw invalid_input_error("char_poly needs a square matrix");
  if (m.rows() > dim_cap)
    throw resource_limit_error("char_poly dimension " + std::to_string(m.rows()) +
                               " exceeds cap " + std::to_string(dim_cap));
  int n = m.rows();
  std::vector<BivarPoly> a(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[std::size_t(i) * n + j] = m.at(i, j);
  return char_poly_faddeev(a, n);
}

/// tr(M^n) from the characteristic polynomial via Newton's identities
/// (oracle used in tests against trace_of_power).
inline BivarPoly power_sum_from_charpoly(const DensePoly<BivarPoly>& chi, int n) {
  int d = chi.degree();
  // e_i = i-th elementary symmetric polynomial of the roots = (-1)^i chi[d-i]
  std::vector<BivarPoly> e(n + 1);
  for (int i = 0; i <= n && i <= d; ++i)
    e[i] = (i % 2 ? -chi.coeff(d - i) : chi.coeff(d - i));
  // Newton: p_k = sum_{i=1}^{k-1} (-1)^{i-1} e_i p_{k-i} + (-1)^{k-1} k e_k
  std::vector<BivarPoly> p(n + 1);
  for (int k = 1; k <= n; ++k) {
    BivarPoly acc = e[k] * make_rat(k % 2 ? k : -k);
    for (int i = 1; i < k; ++i) {
      if (e[i].is_zero()) continue;
      BivarPoly t = e[i] * p[k - i];
      acc += (i % 2 ? t : -t);
    }
    p[k] = acc;
  }
  return p[n];
}

}  // namespace potts
