#include "doctest.h"

#include "potts/bivar_poly.hpp"
#include "potts/modular.hpp"
#include "potts/mp.hpp"
#include "potts/poly_matrix.hpp"
#include "potts/transfer.hpp"

using namespace potts;

namespace {

BivarPoly random_poly(SplitMix64& rng, int terms, int dq, int dv) {
  BivarPoly p;
  for (int t = 0; t < terms; ++t) {
    long num = long(rng.next_below(41)) - 20;
    long den = 1 + long(rng.next_below(4));
    p.add_term(int(rng.next_below(dq + 1)), int(rng.next_below(dv + 1)), make_rat(num, den));
  }
  return p;
}

}  // namespace

TEST_CASE("bivar arithmetic basics") {
  BivarPoly Q = BivarPoly::Q(), v = BivarPoly::v();
  CHECK((Q + v) * (Q - v) == Q * Q - v * v);
  SplitMix64 rng(7);
  BivarPoly p = random_poly(rng, 5, 3, 3);
  CHECK((p * BivarPoly(0)).is_zero());
  CHECK(p * BivarPoly(1) == p);
}

TEST_CASE("bivar ring laws on random polynomials") {
  SplitMix64 rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    BivarPoly a = random_poly(rng, 4, 4, 4), b = random_poly(rng, 4, 4, 4),
              c = random_poly(rng, 4, 4, 4);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
  }
}

TEST_CASE("coefficient recovery from evaluations") {
  BivarPoly p = BivarPoly::Q() * BivarPoly::Q() - BivarPoly::Q() * Rat(3) + BivarPoly(1);
  Rat y0 = p.eval(make_rat(0), make_rat(0));
  Rat y1 = p.eval(make_rat(1), make_rat(0));
  Rat y2 = p.eval(make_rat(2), make_rat(0));
  Rat a = (y2 - Rat(2) * y1 + y0) / Rat(2);
  CHECK(a == p.coeff(2, 0));
  CHECK(y1 - y0 - a == p.coeff(1, 0));
  CHECK(y0 == p.coeff(0, 0));
  CHECK(p.pow(3) == p * p * p);
}

TEST_CASE("specialize lines") {
  BivarPoly qv = BivarPoly::Q() * BivarPoly::v();
  QPoly s = specialize(qv, LineSpec::chromatic());
  CHECK(s.degree() == 1);
  CHECK(s.coeff(1) == -1);

  BivarPoly p = BivarPoly::monomial(1, 2) + BivarPoly::v();  // Q v^2 + v
  QPoly f = specialize(p, LineSpec::flow());
  CHECK(f.coeff(3) == 1);
  CHECK(f.coeff(1) == -1);

  QPoly g = specialize(p, LineSpec::Q_eq_cv(make_rat(-2)));
  CHECK(g.coeff(3) == -2);
  CHECK(g.coeff(1) == 1);
}

TEST_CASE("line spec parsing") {
  CHECK(LineSpec::parse("v=-1").label() == "v=-1");
  CHECK(LineSpec::parse("v=-Q").label() == "v=-Q");
  CHECK(LineSpec::parse("v=-2Q").a == -2);
  CHECK(LineSpec::parse("v=1/2Q-3/2").a == make_rat(1, 2));
  CHECK(LineSpec::parse("v=1/2Q-3/2").b == make_rat(-3, 2));
  CHECK(LineSpec::parse("Q=-v").c == -1);
  CHECK_THROWS_AS(LineSpec::parse("w=1"), invalid_input_error);
  CHECK_THROWS_AS(LineSpec::parse("Q=v+1"), invalid_input_error);
}

TEST_CASE("json serialization round trips bit-exactly") {
  SplitMix64 rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    BivarPoly p = random_poly(rng, 8, 6, 6);
    BivarPoly q = BivarPoly::from_json(p.to_json());
    CHECK(p == q);
    CHECK(p.content_hash() == q.content_hash());
  }
}

TEST_CASE("eval_complex with honest radii") {
  QPoly p = qpoly_from_longs({-1, 3, -3, 1});  // (x-1)^3
  EvalResult r = eval_complex(p, MpComplex(MpFloat(1)), 128);
  CHECK(mp_abs(r.value) <= r.error_radius + MpFloat(1e-60));

  set_mp_precision_bits(256);
  MpFloat root = (MpFloat(3) + sqrt(MpFloat(5))) / 2;
  QPoly beta2 = qpoly_from_longs({1, -3, 1});
  EvalResult r2 = eval_complex(beta2, MpComplex(root), 256);
  CHECK(mp_abs(r2.value) <= r2.error_radius * MpFloat(1e4) + MpFloat(1e-70));

  SplitMix64 rng(5);
  std::vector<Rat> cs;
  for (int i = 0; i <= 40; ++i) cs.push_back(make_rat(long(rng.next_below(2001)) - 1000, 7));
  QPoly big(std::move(cs));
  std::complex<double> z(0.37, -0.81);
  EvalResult r3 = eval_complex(big, MpComplex(z), 128);
  std::complex<double> d = qpoly_eval(big, z);
  CHECK(std::abs(r3.value.to_double() - d) < 1e-9);

  // lowering precision never shrinks the reported radius
  EvalResult hi = eval_complex(big, MpComplex(z), 256);
  EvalResult lo = eval_complex(big, MpComplex(z), 128);
  CHECK(lo.error_radius >= hi.error_radius);
  CHECK_THROWS_AS(eval_complex(big, MpComplex(z), 32), invalid_input_error);
}

TEST_CASE("poly matrix trace of power") {
  PolyMatrix id = PolyMatrix::identity(3);
  for (int n : {1, 2, 5}) CHECK(trace_of_power(id, n) == BivarPoly(3));

  PolyMatrix d(2, 2);
  d.at(0, 0) = BivarPoly::Q();
  d.at(1, 1) = BivarPoly::v();
  CHECK(trace_of_power(d, 2) == BivarPoly::Q(2) + BivarPoly::v(2));
}

TEST_CASE("trace of power matches Newton identities from the char poly") {
  SplitMix64 rng(17);
  for (int dim : {2, 3, 4}) {
    PolyMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m.at(i, j) = random_poly(rng, 2, 1, 1);
    DensePoly<BivarPoly> chi = char_poly(m);
    for (int n : {1, 2, 3, 4})
      CHECK(trace_of_power(m, n) == power_sum_from_charpoly(chi, n));
  }
}

TEST_CASE("char poly basics and caps") {
  PolyMatrix one(1, 1);
  one.at(0, 0) = BivarPoly::Q() + BivarPoly::v();
  DensePoly<BivarPoly> chi = char_poly(one);
  CHECK(chi.degree() == 1);
  CHECK(chi.coeff(0) == -(BivarPoly::Q() + BivarPoly::v()));

  PolyMatrix dq(2, 2);
  dq.at(0, 0) = BivarPoly::Q();
  dq.at(1, 1) = BivarPoly::Q();
  DensePoly<BivarPoly> chi2 = char_poly(dq);
  DensePoly<BivarPoly> want{std::vector<BivarPoly>{
      BivarPoly::Q() * BivarPoly::Q(), -(BivarPoly::Q() * Rat(2)), BivarPoly(1)}};
  CHECK(chi2 == want);

  PolyMatrix big(41, 41);
  CHECK_THROWS_AS(char_poly(big), resource_limit_error);
}

TEST_CASE("charpoly_exact agrees with symbolic char poly at points") {
  SplitMix64 rng(23);
  PolyMatrix m(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m.at(i, j) = random_poly(rng, 2, 2, 2);
  DensePoly<BivarPoly> chi = char_poly(m);
  Rat q = make_rat(7, 3), v = make_rat(-5, 2);
  QPoly at_point = charpoly_exact(m.eval(q, v));
  for (int i = 0; i <= 4; ++i) CHECK(at_point.coeff(i) == chi.coeff(i).eval(q, v));
}

TEST_CASE("modular gcd and certificates") {
  SplitMix64 rng(31);
  auto random_qpoly = [&](int deg) {
    std::vector<Rat> c;
    for (int i = 0; i <= deg; ++i) c.push_back(make_rat(long(rng.next_below(19)) - 9));
    if (c.back() == 0) c.back() = 1;
    return QPoly(std::move(c));
  };
  for (int rep = 0; rep < 6; ++rep) {
    QPoly g = random_qpoly(5), a = random_qpoly(9), b = random_qpoly(8);
    if (g.degree() < 1 || a.is_zero() || b.is_zero()) continue;
    QPoly ga = g * a, gb = g * b;
    QPoly found = qpoly_gcd_certified(ga, gb);
    QPoly expect = qpoly_gcd(ga, gb);
    CHECK(found == expect);
  }
  QPoly p = qpoly_from_longs({-2, 0, 1});  // x^2 - 2
  QPoly q = qpoly_from_longs({-3, 0, 1});  // x^2 - 3
  CHECK(certify_coprime_mod(p, q));
  CHECK(certify_squarefree_mod(p));
  QPoly psq = p * p;
  CHECK_FALSE(certify_squarefree_mod(psq));
  CHECK_FALSE(certify_coprime_mod(psq, p));
}

TEST_CASE("newton interpolation") {
  QPoly p = qpoly_from_longs({3, -2, 0, 5});
  std::vector<Rat> xs, ys;
  for (int i = 0; i < 4; ++i) {
    xs.push_back(make_rat(i));
    ys.push_back(p.eval(make_rat(i)));
  }
  CHECK(interpolate_newton(xs, ys) == p);
}

TEST_CASE("bivariate interpolated char poly matches direct computation") {
  SplitMix64 rng(77);
  PolyMatrix m(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.at(i, j) = random_poly(rng, 2, 1, 1);
  DensePoly<BivarPoly> direct = char_poly(m);
  std::vector<BivarPoly> interp = charpoly_bivar(m);
  for (int i = 0; i <= 3; ++i) CHECK(interp[i] == direct.coeff(i));
}
