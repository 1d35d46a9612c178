#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <complex>
#include <vector>

#include "potts/bivar_poly.hpp"

namespace potts {

/// Arbitrary-precision real; expression templates off so precision follows
/// ordinary value semantics.
using MpFloat =
    boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                  boost::multiprecision::et_off>;

inline unsigned bits_to_digits10(unsigned bits) {
  return static_cast<unsigned>(bits * 0.30103) + 2;
}

/// Sets the working precision (in bits) for subsequently constructed MpFloat
/// values on this thread.
inline void set_mp_precision_bits(unsigned bits) {
  MpFloat::default_precision(bits_to_digits10(bits));
}

inline MpFloat mp_from_rat(const Rat& q) { return MpFloat(q.get_mpq_t()); }

/// Minimal complex type over MpFloat; std::complex is not specified for
/// user-defined scalars.
struct MpComplex {
  MpFloat re, im;
  MpComplex() : re(0), im(0) {}
  MpComplex(MpFloat r) : re(std::move(r)), im(0) {}
  MpComplex(MpFloat r, MpFloat i) : re(std::move(r)), im(std::move(i)) {}
  explicit MpComplex(const std::complex<double>& z) : re(z.real()), im(z.imag()) {}

  friend MpComplex operator+(const MpComplex& a, const MpComplex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend MpComplex operator-(const MpComplex& a, const MpComplex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend MpComplex operator*(const MpComplex& a, const MpComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend MpComplex operator/(const MpComplex& a, const MpComplex& b) {
    MpFloat d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  MpComplex& operator+=(const MpComplex& o) { re += o.re; im += o.im; return *this; }
  MpComplex& operator-=(const MpComplex& o) { re -= o.re; im -= o.im; return *this; }
  MpComplex operator-() const { return {-re, -im}; }
  bool operator==(const MpComplex& o) const { return re == o.re && im == o.im; }

  std::complex<double> to_double() const { return {re.convert_to<double>(), im.convert_to<double>()}; }
};

inline MpFloat mp_abs(const MpComplex& z) {
  using boost::multiprecision::sqrt;
  return sqrt(z.re * z.re + z.im * z.im);
}
inline MpFloat mp_norm(const MpComplex& z) { return z.re * z.re + z.im * z.im; }

/// Horner evaluation with an a-posteriori rounding-error bound. Returns the
/// value; *err_radius receives c * u * sum |a_i||z|^i with u = 2^(1-bits).
inline MpComplex mp_horner(const std::vector<MpComplex>& coeffs, const MpComplex& z,
                           unsigned bits, MpFloat* err_radius) {
  if (coeffs.empty()) {
    if (err_radius) *err_radius = 0;
    return MpComplex();
  }
  MpComplex r = coeffs.back();
  MpFloat az = mp_abs(z);
  MpFloat s = mp_abs(coeffs.back());
  for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
    r = r * z + coeffs[i];
    s = s * az + mp_abs(coeffs[i]);
  }
  if (err_radius) {
    MpFloat u = ldexp(MpFloat(1), 1 - static_cast<int>(bits));
    *err_radius = MpFloat(4 * coeffs.size() + 4) * u * s;
  }
  return r;
}

struct EvalResult {
  MpComplex value;
  MpFloat error_radius;
};

/// Rigorous-enough complex evaluation of an exact rational polynomial:
/// coefficients are converted exactly-at-precision, and the reported radius
/// bounds the accumulated rounding error.
inline EvalResult eval_complex(const QPoly& p, const MpComplex& z, unsigned bits) {
  if (bits < 53) throw invalid_input_error("eval_complex requires precision >= 53 bits");
  set_mp_precision_bits(bits);
  std::vector<MpComplex> cs;
  cs.reserve(p.degree() + 1);
  for (int i = 0; i <= p.degree(); ++i) cs.emplace_back(mp_from_rat(p.coeff(i)));
  EvalResult r;
  r.value = mp_horner(cs, z, bits, &r.error_radius);
  return r;
}

inline EvalResult eval_complex(const BivarPoly& p, const MpComplex& q, const MpComplex& v,
                               unsigned bits) {
  if (bits < 53) throw invalid_input_error("eval_complex requires precision >= 53 bits");
  set_mp_precision_bits(bits);
  // Horner in Q over exact-in-v rows evaluated by direct power sums.
  int dq = p.deg_Q(), dv = p.deg_v();
  if (dq < 0) return {MpComplex(), MpFloat(0)};
  std::vector<MpComplex> vpow(dv + 1);
  std::vector<MpFloat> vpow_abs(dv + 1);
  vpow[0] = MpComplex(MpFloat(1));
  vpow_abs[0] = 1;
  for (int i = 1; i <= dv; ++i) {
    vpow[i] = vpow[i - 1] * v;
    vpow_abs[i] = vpow_abs[i - 1] * mp_abs(v);
  }
  std::vector<MpComplex> rows(dq + 1);
  std::vector<MpFloat> rows_abs(dq + 1, MpFloat(0));
  for (auto& [k, c] : p.terms()) {
    MpFloat cf = mp_from_rat(c);
    rows[k.first] += MpComplex(cf) * vpow[k.second];
    rows_abs[k.first] += abs(cf) * vpow_abs[k.second];
  }
  MpComplex r = rows[dq];
  MpFloat aq = mp_abs(q);
  MpFloat s = rows_abs[dq];
  for (int i = dq - 1; i >= 0; --i) {
    r = r * q + rows[i];
    s = s * aq + rows_abs[i];
  }
  MpFloat u = ldexp(MpFloat(1), 1 - static_cast<int>(bits));
  return {r, MpFloat(4 * (dq + dv) + 8) * u * s};
}

}  // namespace potts
