#include "doctest.h"

#include "potts/roots.hpp"

using namespace potts;

TEST_CASE("quadratic roots to high precision") {
  QPoly beta2 = qpoly_from_longs({1, -3, 1});
  RootSet rs = solve_roots(beta2);
  REQUIRE(rs.roots.size() == 2);
  CHECK(rs.converged);
  set_mp_precision_bits(256);
  MpFloat lo = (MpFloat(3) - sqrt(MpFloat(5))) / 2;
  MpFloat hi = (MpFloat(3) + sqrt(MpFloat(5))) / 2;
  CHECK(abs(rs.roots[0].value.re - lo) < MpFloat(1e-30));
  CHECK(abs(rs.roots[1].value.re - hi) < MpFloat(1e-30));
  for (auto& r : rs.roots) {
    CHECK(r.radius <= MpFloat(1e-20));
    CHECK(abs(r.value.im) <= r.radius);
  }
  VietaReport vr = vieta_check(beta2, rs);
  CHECK(vr.sum_ok);
  CHECK(vr.product_ok);
}

TEST_CASE("multiple roots come back as a cluster with a shared radius") {
  // (x-1)^5
  QPoly p = qpoly_from_longs({-1, 5, -10, 10, -5, 1});
  SolveOptions o;
  o.target_radius = 1e-12;
  RootSet rs = solve_roots(p, o);
  REQUIRE(rs.roots.size() == 5);
  CHECK(rs.converged);
  MpFloat shared = rs.roots[0].radius;
  for (auto& r : rs.roots) {
    CHECK(r.cluster == rs.roots[0].cluster);
    CHECK(r.cluster >= 0);
    CHECK(r.radius == shared);
    CHECK(abs(r.value.re - MpFloat(1)) < MpFloat(1e-2));
  }
  VietaReport vr = vieta_check(p, rs);
  CHECK(vr.sum_ok);
  CHECK(vr.product_ok);
}

TEST_CASE("zero roots are deflated exactly") {
  // x^3 (x - 2) (x + 5)
  QPoly p = qpoly_from_longs({0, 0, 0, -10, -3, 1});
  RootSet rs = solve_roots(p);
  REQUIRE(rs.roots.size() == 5);
  int zeros = 0;
  for (auto& r : rs.roots)
    if (r.value.re == 0 && r.value.im == 0 && r.radius == 0) ++zeros;
  CHECK(zeros == 3);
}

TEST_CASE("random integer polynomial: vieta and conjugate pairing") {
  SplitMix64 rng(2024);
  std::vector<Rat> c;
  for (int i = 0; i <= 20; ++i) c.push_back(make_rat(long(rng.next_below(2001)) - 1000));
  if (c.back() == 0) c.back() = 17;
  QPoly p(std::move(c));
  RootSet rs = solve_roots(p);
  CHECK(rs.converged);
  VietaReport vr = vieta_check(p, rs);
  CHECK(vr.sum_ok);
  CHECK(vr.product_ok);
  // real coefficients: the root multiset is closed under conjugation
  for (auto& r : rs.roots) {
    bool paired = false;
    for (auto& s : rs.roots) {
      MpFloat d = mp_abs(MpComplex(r.value.re - s.value.re, r.value.im + s.value.im));
      if (d <= r.radius + s.radius + MpFloat(1e-25)) paired = true;
    }
    CHECK(paired);
  }
}

TEST_CASE("solver output is deterministic for a fixed seed") {
  QPoly p = qpoly_from_longs({7, -4, 0, 2, 1});
  RootSet a = solve_roots(p), b = solve_roots(p);
  REQUIRE(a.roots.size() == b.roots.size());
  for (std::size_t i = 0; i < a.roots.size(); ++i) {
    CHECK(a.roots[i].value.re == b.roots[i].value.re);
    CHECK(a.roots[i].value.im == b.roots[i].value.im);
  }
}

TEST_CASE("solver rejects degenerate input") {
  CHECK_THROWS_AS(solve_roots(QPoly()), invalid_input_error);
  CHECK_THROWS_AS(solve_roots(QPoly::constant(Rat(3))), invalid_input_error);
}
