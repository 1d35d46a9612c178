#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include "potts/rational.hpp"

namespace potts {

/// Dense univariate polynomial over a commutative ring T, coefficients in
/// ascending degree order. Leading coefficient is nonzero unless the
/// polynomial is zero (empty coefficient list).
template <class T>
class DensePoly {
 public:
  DensePoly() = default;
  explicit DensePoly(std::vector<T> c) : c_(std::move(c)) { trim(); }
  static DensePoly constant(T v) {
    DensePoly p;
    p.c_.push_back(std::move(v));
    p.trim();
    return p;
  }
  static DensePoly x() {
    DensePoly p;
    p.c_.resize(2);
    p.c_[1] = T(1);
    return p;
  }

  bool is_zero() const { return c_.empty(); }
  // degree of the zero polynomial reported as -1
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<T>& coeffs() const { return c_; }
  const T& operator[](std::size_t i) const { return c_[i]; }
  T coeff(std::size_t i) const { return i < c_.size() ? c_[i] : T(0); }
  const T& leading() const { return c_.back(); }

  void set_coeff(std::size_t i, T v) {
    if (i >= c_.size()) c_.resize(i + 1, T(0));
    c_[i] = std::move(v);
    trim();
  }

  friend DensePoly operator+(const DensePoly& a, const DensePoly& b) {
    std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] = a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return DensePoly(std::move(c));
  }
  friend DensePoly operator-(const DensePoly& a, const DensePoly& b) {
    std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] = a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
    return DensePoly(std::move(c));
  }
  DensePoly operator-() const {
    DensePoly r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  friend DensePoly operator*(const DensePoly& a, const DensePoly& b) {
    if (a.is_zero() || b.is_zero()) return DensePoly();
    std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == T(0)) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    }
    return DensePoly(std::move(c));
  }
  DensePoly& operator+=(const DensePoly& o) { return *this = *this + o; }
  DensePoly& operator-=(const DensePoly& o) { return *this = *this - o; }
  DensePoly& operator*=(const DensePoly& o) { return *this = *this * o; }
  friend DensePoly operator*(const DensePoly& a, const T& s) {
    DensePoly r = a;
    for (auto& v : r.c_) v *= s;
    r.trim();
    return r;
  }
  friend bool operator==(const DensePoly& a, const DensePoly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const DensePoly& a, const DensePoly& b) { return !(a == b); }

  DensePoly pow(unsigned long e) const {
    DensePoly r = constant(T(1)), base = *this;
    while (e) {
      if (e & 1) r *= base;
      base *= base;
      e >>= 1;
    }
    return r;
  }

  DensePoly derivative() const {
    if (c_.size() <= 1) return DensePoly();
    std::vector<T> c(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) c[i - 1] = c_[i] * T(static_cast<int>(i));
    return DensePoly(std::move(c));
  }

  // Horner evaluation at a point of (possibly different) type V; requires
  // V constructible from T.
  template <class V>
  V eval(const V& x) const {
    if (c_.empty()) return V(0);
    V r(c_.back());
    for (std::size_t i = c_.size() - 1; i-- > 0;) {
      r = r * x + V(c_[i]);
    }
    return r;
  }

  /// Synthetic division by the monic linear factor (x - r). Returns the
  /// quotient and stores the remainder (an element of T) in *rem.
  DensePoly divide_linear(const T& r, T* rem) const {
    if (c_.empty()) {
      if (rem) *rem = T(0);
      return DensePoly();
    }
    std::vector<T> q(c_.size() - 1, T(0));
    T carry = c_.back();
    for (std::size_t i = c_.size() - 1; i-- > 0;) {
      q[i] = carry;
      carry = c_[i] + carry * r;
    }
    if (rem) *rem = carry;
    return DensePoly(std::move(q));
  }

  /// Euclidean division by a divisor whose leading coefficient is a unit
  /// (used with field coefficients, or monic divisors over a ring).
  void divmod(const DensePoly& d, DensePoly* q_out, DensePoly* r_out) const {
    if (d.is_zero()) throw invalid_input_error("poly division by zero");
    DensePoly r = *this;
    std::vector<T> q(r.c_.size() > d.c_.size() ? r.c_.size() - d.c_.size() + 1 : 1, T(0));
    while (!r.is_zero() && r.degree() >= d.degree()) {
      T f = r.leading() / d.leading();
      int shift = r.degree() - d.degree();
      q[shift] += f;
      // r -= f * x^shift * d
      for (std::size_t i = 0; i < d.c_.size(); ++i) r.c_[i + shift] -= f * d.c_[i];
      r.trim();
    }
    if (q_out) *q_out = DensePoly(std::move(q));
    if (r_out) *r_out = r;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == T(0)) c_.pop_back();
  }
  std::vector<T> c_;
};

using QPoly = DensePoly<Rat>;

inline std::complex<double> qpoly_eval(const QPoly& p, std::complex<double> x) {
  if (p.is_zero()) return 0.0;
  std::complex<double> r = p.leading().get_d();
  for (int i = p.degree() - 1; i >= 0; --i) r = r * x + p[i].get_d();
  return r;
}

inline QPoly qpoly_from_longs(std::initializer_list<long> cs) {
  std::vector<Rat> v;
  for (long c : cs) v.push_back(make_rat(c));
  return QPoly(std::move(v));
}

/// Monic gcd over the rationals (Euclid; coefficients are a field).
inline QPoly qpoly_gcd(QPoly a, QPoly b) {
  while (!b.is_zero()) {
    QPoly r;
    a.divmod(b, nullptr, &r);
    a = b;
    b = r;
  }
  if (!a.is_zero()) {
    Rat inv = Rat(1) / a.leading();
    a = a * inv;
  }
  return a;
}

/// Characteristic polynomial by the Faddeev-LeVerrier recurrence; works over
/// any commutative Q-algebra (exact division by small integers only).
/// M is row-major square. Returns monic char poly of degree n.
template <class T>
DensePoly<T> char_poly_faddeev(const std::vector<T>& M, int n) {
  std::vector<T> mk = M;  // M_1 = M
  std::vector<T> cs(n + 1, T(0));
  cs[n] = T(1);
  std::vector<T> tmp(n * n);
  for (int j = 1; j <= n; ++j) {
    T tr(0);
    for (int i = 0; i < n; ++i) tr += mk[i * n + i];
    T cj = tr * Rat(-1, j);
    cs[n - j] = cj;
    if (j == n) break;
    // mk <- M * (mk + cj I)
    std::vector<T> a = mk;
    for (int i = 0; i < n; ++i) a[i * n + i] += cj;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        T acc(0);
        for (int t = 0; t < n; ++t)
          if (!(M[r * n + t] == T(0))) acc += M[r * n + t] * a[t * n + c];
        tmp[r * n + c] = acc;
      }
    mk = tmp;
  }
  return DensePoly<T>(std::move(cs));
}

}  // namespace potts
