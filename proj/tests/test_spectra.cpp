#include "doctest.h"

#include "potts/spectra.hpp"

using namespace potts;

namespace {

SpectrumAtPoint synthetic(std::vector<SpectrumEntry> entries) {
  SpectrumAtPoint sp;
  sp.entries = std::move(entries);
  sp.sort_by_modulus();
  return sp;
}

SectorTag tag(int ell) {
  return SectorTag{ell, YoungDiagram(ell ? std::vector<int>(1, ell) : std::vector<int>{}), false};
}

}  // namespace

TEST_CASE("equimodularity classification") {
  // two real dominant values from distinct sectors
  auto sp = synthetic({{Cx(2, 0), tag(0)}, {Cx(-2, 0), tag(1)}, {Cx(1, 0), tag(2)}});
  auto eq = is_equimodular(sp, 1e-10);
  REQUIRE(eq.has_value());
  CHECK(eq->kind == EquimodularPoint::Kind::two_real);
  CHECK(eq->gap_to_third == doctest::Approx(0.5));

  // complex-conjugate pair in one sector
  auto sp2 = synthetic({{Cx(1.2, 0.9), tag(1)}, {Cx(1.2, -0.9), tag(1)}, {Cx(0.4, 0), tag(0)}});
  auto eq2 = is_equimodular(sp2, 1e-10);
  REQUIRE(eq2.has_value());
  CHECK(eq2->kind == EquimodularPoint::Kind::conjugate_pair);

  // a clear gap: no equimodular point
  auto sp3 = synthetic({{Cx(2, 0), tag(0)}, {Cx(1, 0), tag(1)}});
  CHECK_FALSE(is_equimodular(sp3, 1e-10).has_value());

  // three-way tie
  auto sp4 = synthetic({{Cx(2, 0), tag(0)}, {Cx(-2, 0), tag(1)}, {Cx(2, 0), tag(2)}});
  auto eq4 = is_equimodular(sp4, 1e-10);
  REQUIRE(eq4.has_value());
  CHECK(eq4->kind == EquimodularPoint::Kind::multi);
}

TEST_CASE("dominance labels never break ties arbitrarily") {
  auto sp = synthetic({{Cx(2, 0), tag(0)}, {Cx(-2, 0), tag(1)}});
  DominanceLabel d = dominance_label(sp, 1e-10);
  CHECK(d.equimodular);
  auto sp2 = synthetic({{Cx(1.2, 0.9), tag(1)}, {Cx(1.2, -0.9), tag(1)}, {Cx(0.4, 0), tag(0)}});
  DominanceLabel d2 = dominance_label(sp2, 1e-10);
  CHECK_FALSE(d2.equimodular);
  CHECK(d2.conjugate_pair);  // the asterisk label
  CHECK(d2.tag.ell == 1);
}

TEST_CASE("merged spectrum carries the trivial eigenvalue exactly") {
  SpectrumEngine eng("petersen", 1);
  SpectrumAtPoint sp = eng.symmetric_spectrum(Cx(2, 0), Cx(-1, 0), 2, 4);
  bool found = false;
  for (auto& e : sp.entries)
    if (e.tag.trivial) {
      found = true;
      CHECK(std::abs(e.value - Cx(1, 0)) < 1e-15);  // v^{2k} = (-1)^2
    }
  CHECK(found);
}

TEST_CASE("conjugate symmetry of merged spectra at real points") {
  TransferDecomposition d = block_decompose("petersen", 2);
  SpectrumAtPoint sp = dense_block_spectrum(d, Cx(1.7, 0), Cx(-1.3, 0));
  for (auto& e : sp.entries) {
    bool paired = false;
    for (auto& f : sp.entries)
      if (std::abs(f.value - std::conj(e.value)) < 1e-8 * (std::abs(e.value) + 1)) paired = true;
    CHECK(paired);
  }
}

TEST_CASE("dense and operator modes agree on top moduli") {
  TransferDecomposition d = block_decompose("petersen", 2);
  SpectrumEngine eng("petersen", 2);
  Cx q(2.3, 0), v(-1.6, 0);
  // lambda = (1) block vs the l=1 symmetric operator sector
  {
    std::vector<Cx> mm = d.block(1, YoungDiagram({1})).matrix.eval_complex(q, v);
    int n = d.block(1, YoungDiagram({1})).dim();
    Eigen::MatrixXcd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = mm[std::size_t(i) * n + j];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    double dense_top = 0;
    for (int i = 0; i < n; ++i) dense_top = std::max(dense_top, std::abs(es.eigenvalues()[i]));
    auto vals = eng.sector(1, true).top_eigenvalues(q, v, 1);
    CHECK(std::abs(std::abs(vals[0]) - dense_top) <= 1e-10 * dense_top);
  }
}

TEST_CASE("arnoldi agrees with the dense path on a 37-dimensional sector") {
  SpectrumEngine eng("petersen", 3);
  const SectorOperator& op = eng.sector(1, true);
  REQUIRE(op.dim() == 37);
  Cx q(2.1, 0), v(-1.4, 0);
  std::vector<Cx> dense = op.dense_eigenvalues(q, v);
  ArnoldiOptions aopts;
  aopts.nev = 3;
  aopts.max_matvecs = 5000;
  aopts.tol = 1e-12;
  std::vector<Cx> arn = op.top_eigenvalues(q, v, 3, aopts, /*dense_threshold=*/1);
  REQUIRE(arn.size() >= 3);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(std::abs(arn[i]) - std::abs(dense[i])) <= 1e-9 * std::abs(dense[0]));
}

TEST_CASE("isolated points on the k=1 plane include B5") {
  TransferDecomposition d = block_decompose("petersen", 1);
  std::vector<double> v_samples;
  for (double v = -1.9; v <= -0.9; v += 0.1) v_samples.push_back(v);
  auto pts = isolated_points(d, nullptr, 2.05, 3.95, v_samples, 1e-10);
  bool found_b5 = false;
  double b5 = (3 + std::sqrt(5.0)) / 2;
  for (auto& p : pts)
    if (std::abs(p.q - b5) < 1e-9 && p.tag.trivial) found_b5 = true;
  CHECK(found_b5);
}

TEST_CASE("curve tracing is stable under grid refinement") {
  TransferDecomposition d = block_decompose("petersen", 1);
  SpectrumSource src = plane_source(d);
  LimitingCurve coarse = trace_curve(src, 0.2, 3.0, -2.2, -0.4, 0.2, 1e-4, true);
  LimitingCurve fine = trace_curve(src, 0.2, 3.0, -2.2, -0.4, 0.1, 1e-4, true);
  REQUIRE(!coarse.points.empty());
  REQUIRE(!fine.points.empty());
  // one-sided Hausdorff: every coarse point is near some fine point
  double worst = 0;
  for (auto& p : coarse.points) {
    double best = 1e9;
    for (auto& q : fine.points) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
    worst = std::max(worst, best);
  }
  CHECK(worst <= 0.11);  // within a fine grid cell
  // the k=1 plane has a vertical segment at Q = 2
  bool has_q2 = false;
  for (auto& s : coarse.vertical_segments)
    if (std::abs(s.q - 2.0) < 1e-6) has_q2 = true;
  CHECK(has_q2);
}

TEST_CASE("dominance map labels the k=3 phases as expected") {
  DecomposeOptions opts;
  opts.cache_dir = "potts_cache";
  TransferDecomposition d = block_decompose("petersen", 3, opts);
  SpectrumSource src = plane_source(d);
  // sampled points, not a full map, to stay fast
  auto lab = [&](double q, double v) { return dominance_label(src.at(q, v), 1e-10); };
  CHECK(lab(1.0, -1.5).tag.ell == 1);
  CHECK(lab(3.0, -1.5).tag.ell == 2);
  CHECK(lab(6.5, -0.05).tag.ell == 0);
}
