// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Extended tiers (the k=4
// eigenvalue census, the k=6..11 crossing tables) run when POTTS_EXTENDED
// is set.

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "potts/analysis.hpp"
#include "potts/audit.hpp"
#include "potts/io.hpp"

using namespace potts;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
  std::string name;
  bool pass = true;
  bool skipped = false;
  std::vector<std::string> details;
  double seconds = 0;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details.push_back("FAILED: " + what);
    }
  }
  void note(const std::string& s) { details.push_back(s); }
};

std::string cache_dir() {
  const char* e = std::getenv("POTTS_CACHE_DIR");
  return e ? std::string(e) : std::string("potts_cache");
}

std::string data_dir() {
  const char* e = std::getenv("POTTS_DATA_DIR");
  if (e) return e;
  if (std::filesystem::exists("data/qc_flow.csv")) return "data";
  return "../data";
}

bool extended_enabled() { return std::getenv("POTTS_EXTENDED") != nullptr; }

TransferDecomposition& deco(int k) {
  static std::map<int, TransferDecomposition> cache;
  auto it = cache.find(k);
  if (it == cache.end()) {
    DecomposeOptions opts;
    opts.cache_dir = cache_dir();
    it = cache.emplace(k, block_decompose("petersen", k, opts)).first;
  }
  return it->second;
}

std::string fmt(double x, int digits = 12) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

// --------------------------------------------------------------------------

Criterion criterion1_oracle_equivalence() {
  Criterion c{"C1 oracle equivalence: assemble_Z == FK subset sum (exact)"};
  for (auto [k, n] : std::vector<std::pair<int, int>>{
           {1, 2}, {1, 3}, {1, 4}, {2, 2}, {2, 3}, {2, 4}, {3, 2}}) {
    BivarPoly zg = assemble_Z_generic(deco(k), n);
    BivarPoly zr = assemble_Z_reduced(deco(k), n);
    BivarPoly zfk = fk_partition_poly(build_petersen(PetersenParams(n * k, k)));
    c.check(zg == zfk, "generic Z != FK for k=" + std::to_string(k) + " n=" + std::to_string(n));
    c.check(zr == zfk, "reduced Z != FK for k=" + std::to_string(k) + " n=" + std::to_string(n));
  }
  DecomposeOptions opts;
  opts.cache_dir = cache_dir();
  TransferDecomposition slab = block_decompose("slab", 2, opts);
  for (int n : {2, 3}) {
    BivarPoly z = assemble_Z_generic(slab, n);
    BivarPoly zfk = fk_partition_poly(build_slab(SlabParams(2, n)).flatten());
    c.check(z == zfk, "slab Z != FK for Sc(2," + std::to_string(n) + ")");
  }
  c.note("7 Petersen members + Sc(2,2), Sc(2,3), both assembly paths, exact identity");
  return c;
}

Criterion criterion2_eigenvalue_census() {
  Criterion c{"C2 eigenvalue-count regression: 6 / 20 / 113 distinct (certified)"};
  const int want[] = {0, 6, 20, 113};
  for (int k = 1; k <= 3; ++k) {
    CountCertificate cc = certify_distinct_count(deco(k));
    c.check(cc.distinct_count == want[k],
            "k=" + std::to_string(k) + " count " + std::to_string(cc.distinct_count));
    c.check(cc.certified, "k=" + std::to_string(k) + " census not certified");
    for (auto& n : cc.notes) c.note("k=" + std::to_string(k) + ": " + n);
  }
  if (extended_enabled()) {
    CountCertificate cc = certify_distinct_count(deco(4));
    c.check(cc.distinct_count == 755, "k=4 count " + std::to_string(cc.distinct_count));
    c.note("extended: k=4 count " + std::to_string(cc.distinct_count) +
           (cc.certified ? " (certified)" : " (probe-point certificates)"));
  } else {
    c.note("extended k=4 census (755) skipped; set POTTS_EXTENDED to run");
  }
  return c;
}

Criterion criterion3_qc_tables() {
  Criterion c{"C3 Qc tables: flow & chromatic k=1..5, v=-4 k=3..5 @1e-8"};
  const double flow[] = {0, 3,           3.6180339887, 3.7818423129, 4.5697435537,
                         4.9029018077,   5.1079785012, 5.2352605291, 5.3246966903,
                         5.3886186958,   5.4364766073, 5.4729804532};
  const double chrom[] = {0, 2,          2.6383423072, 2.5054257523, 2.6971127211,
                          2.6947536196,  2.7631358388, 2.7682556521, 2.7983688222,
                          2.8023368562,  2.8176338815, 2.8203525818};
  const double vm4[] = {0, 0, 0, 3.5918146982, 5.5837328676, 6.6418204973, 7.7533996189,
                        8.3495427730, 8.8740090544, 9.2660844176, 9.5702423022};
  int kmax = extended_enabled() ? 8 : 5;
  double tol_base = 1e-8, tol_ext = 1e-6;
  for (int k = 1; k <= kmax; ++k) {
    double tol = k <= 5 ? tol_base : tol_ext;
    SpectrumEngine eng("petersen", k);
    QcEstimate f = qc_crossing(eng, k, LineSpec::flow(), 1.0, 7.0, 0.05, 1e-9);
    c.check(f.found && std::abs(f.crossing - flow[k]) <= tol,
            "flow k=" + std::to_string(k) + " got " + fmt(f.crossing));
    QcEstimate ch = qc_crossing(eng, k, LineSpec::chromatic(), 1.0, 3.6, 0.05, 1e-9);
    c.check(ch.found && std::abs(ch.crossing - chrom[k]) <= tol,
            "chromatic k=" + std::to_string(k) + " got " + fmt(ch.crossing));
    c.check(ch.crossing < 3.0, "chromatic crossing not below 3 at k=" + std::to_string(k));
    if (k >= 3) {
      QcEstimate v4 = qc_crossing(eng, k, LineSpec::v_const(make_rat(-4)), 2.0, vm4[k] + 0.8,
                                  0.05, 1e-9);
      c.check(v4.found && std::abs(v4.crossing - vm4[k]) <= tol,
              "v=-4 k=" + std::to_string(k) + " got " + fmt(v4.crossing));
    }
  }
  c.note(extended_enabled() ? "extended tier ran k=6..8 at 1e-6"
                            : "extended k=6..11 skipped; set POTTS_EXTENDED to run");
  return c;
}

Criterion criterion4_extrapolation() {
  Criterion c{"C4 extrapolation: Qc(flow) in [5.68,5.70], Qc(chromatic) in [2.858,2.864]"};
  std::vector<int> ks;
  std::vector<double> qs;
  read_table_csv(data_dir() + "/qc_flow.csv", &ks, &qs);
  ExtrapolationBundle flow = fit_extrapolate(ks, qs);
  c.check(flow.primary >= 5.68 && flow.primary <= 5.70,
          "flow primary estimate " + fmt(flow.primary, 6));
  c.note("flow: primary " + fmt(flow.primary, 6) + ", power " + fmt(flow.power.Qc, 6) +
         ", parity " + fmt(flow.parity.Qc, 6) + ", bst " + fmt(flow.bst.Qc, 6));
  ks.clear();
  qs.clear();
  read_table_csv(data_dir() + "/qc_chromatic.csv", &ks, &qs);
  ExtrapolationBundle chrom = fit_extrapolate(ks, qs);
  c.check(chrom.primary >= 2.858 && chrom.primary <= 2.864,
          "chromatic primary estimate " + fmt(chrom.primary, 6));
  c.note("chromatic: primary " + fmt(chrom.primary, 6) + ", power " + fmt(chrom.power.Qc, 6) +
         ", parity " + fmt(chrom.parity.Qc, 6) + ", bst " + fmt(chrom.bst.Qc, 6));
  return c;
}

Criterion criterion5_integer_audits() {
  Criterion c{"C5 integer-Q audits: k=3,4, N=0..4 (sum rule, counts, spin oracle)"};
  for (int k : {3, 4}) {
    for (int N = 0; N <= 4; ++N) {
      AuditOptions opts;
      CancellationReport rep = integer_q_audit(deco(k), N, opts);
      std::string id = "k=" + std::to_string(k) + " N=" + std::to_string(N);
      c.check(rep.consistent_across_points, id + " class structure inconsistent");
      c.check(rep.sum_rule_ok, id + " sum rule " + rep.sum_rule_lhs.get_str() +
                                   " != " + rep.sum_rule_rhs.get_str());
      c.check(rep.reconstruction_ok, id + " Z reconstruction vs spin oracle");
      auto ntilde = [&](int ell, const char* lam_label) -> Int {
        for (std::size_t s = 0; s < rep.sectors.size(); ++s) {
          auto& sec = rep.sectors[s];
          if (sec.is_trivial || sec.is_reduced) continue;
          if (sec.ell == ell && sec.lambda.label() == lam_label) return rep.contributing[s];
        }
        return Int(-1);
      };
      if (N == 0) {
        c.check(rep.survivor_count == 0, id + " expected total cancellation");
      }
      if (N == 1) {
        c.check(rep.survivor_count == 1, id + " expected the single (1+v)^{3k} survivor");
        QPoly zspin = spin_transfer_trace_poly(k, 2, 1);
        QPoly want = QPoly{std::vector<Rat>{Rat(1), Rat(1)}}.pow(6 * k);
        c.check(zspin == want, id + " Z(1,v) != (1+v)^{3nk}");
      }
      if (N == 2) {
        Int want = int_pow(Int(2), k + 1);
        c.check(rep.survivor_count == want, id + " survivor count != 2^{k+1}");
        Int half = int_pow(Int(2), k);
        c.check(ntilde(0, "0") == half, id + " l=0 contribution != 2^k");
        c.check(ntilde(1, "1") == half, id + " l=1 contribution != 2^k");
      }
      if (N == 3) {
        Int p3k = int_pow(Int(3), k);
        Int hi = p3k / 2 + 1, lo = p3k / 2;
        c.check(ntilde(0, "0") == hi, id + " chi_{k,0} count");
        c.check(ntilde(1, "1") == p3k, id + " chi_{k,1} count");
        c.check(ntilde(2, "1-1") == lo, id + " chi_{k,2,(1^2)} count");
      }
      if (N == 4) {
        Rat want_rho = make_rat(k % 2 == 0 ? 6 : 0);
        c.check(rep.rho == want_rho,
                id + " rho = " + rat_to_string(rep.rho) + ", expected " + rat_to_string(want_rho));
      }
      if (!rep.single_sector_survivors) c.note(id + ": survivors span multiple sectors");
    }
  }
  return c;
}

Criterion criterion6_isolated_points() {
  Criterion c{"C6 BKW isolated points: chromatic {1}, flow includes {1,3}, B5 for k=1,2"};
  // k=3 chromatic line: exactly {1} in the window up to the crossing
  {
    LineSpec line = LineSpec::chromatic();
    auto pts = isolated_points(deco(3), &line, -0.5, 3.95, {-1.0}, 1e-10);
    c.check(pts.size() == 1, "chromatic k=3: found " + std::to_string(pts.size()) + " points");
    if (!pts.empty()) {
      c.check(std::abs(pts[0].q - 1.0) < 1e-12, "chromatic k=3 point not at Q=1");
      c.check(pts[0].tag.ell == 1, "chromatic k=3 point not in the l=1 sector");
    }
  }
  // k=3 flow line: includes Q=1 and Q=3 (and nothing at 5: the crossing is below)
  {
    LineSpec line = LineSpec::flow();
    auto pts = isolated_points(deco(3), &line, -0.5, 5.5, {0.0}, 1e-10);
    bool has1 = false, has3 = false, has5 = false;
    for (auto& p : pts) {
      if (std::abs(p.q - 1.0) < 1e-12) has1 = true;
      if (std::abs(p.q - 3.0) < 1e-12) has3 = true;
      if (std::abs(p.q - 5.0) < 1e-12) has5 = true;
    }
    c.check(has1, "flow k=3 missing Q=1");
    c.check(has3, "flow k=3 missing Q=3");
    c.check(!has5, "flow k=3 reported Q=5 although Qc < 5");
  }
  // planar members: isolated point at B5 via the beta_2 / gamma_2 amplitude
  double b5 = (3 + std::sqrt(5.0)) / 2;
  {
    std::vector<double> vs;
    for (double v = -1.9; v <= -0.85; v += 0.05) vs.push_back(v);
    auto p1 = isolated_points(deco(1), nullptr, 2.05, 3.95, vs, 1e-10);
    bool found = false;
    for (auto& p : p1)
      if (std::abs(p.q - b5) < 1e-9 && p.tag.trivial) found = true;
    c.check(found, "k=1: no isolated point at B5 (gamma_2 root)");
    auto p2 = isolated_points(deco(2), nullptr, 2.05, 3.95, vs, 1e-10);
    found = false;
    for (auto& p : p2)
      if (std::abs(p.q - b5) < 1e-9 && p.tag.ell == 2 && !p.tag.trivial) found = true;
    c.check(found, "k=2: no isolated point at B5 (beta_2 root)");
    // exact root check: beta_2((3+sqrt5)/2) = 0 in (a+b sqrt5)/2 arithmetic
    c.check(beta_poly(2) == qpoly_from_longs({1, -3, 1}), "beta_2 has an unexpected form");
  }
  return c;
}

Criterion criterion7_verticality() {
  Criterion c{"C7 BK verticality: k=3, Q=2, v in [-1.5,-1.0], l=1 vs l=2 equimodular @1e-8"};
  SpectrumEngine eng("petersen", 3);
  double worst = 0;
  for (int i = 0; i < 11; ++i) {
    double v = -1.5 + 0.05 * i;
    auto s1 = eng.sector(1, false).top_eigenvalues(Cx(2, 0), Cx(v, 0), 2);
    auto s2 = eng.sector(2, false).top_eigenvalues(Cx(2, 0), Cx(v, 0), 2);
    double m1 = std::abs(s1[0]), m2 = std::abs(s2[0]);
    worst = std::max(worst, std::abs(m1 - m2) / std::max(m1, m2));
  }
  c.check(worst <= 1e-8, "worst relative modulus gap " + fmt(worst, 3));
  c.note("worst relative gap over 11 samples: " + fmt(worst, 3));
  return c;
}

Criterion criterion8_xi_scaling() {
  Criterion c{"C8 xi scaling: k*xi1 within 30% in the BK phase; xi1 within 10% disordered"};
  std::vector<double> bk, dis;
  for (int k : {3, 4, 5}) {
    SpectrumEngine eng("petersen", k);
    SpectrumAtPoint in_bk =
        eng.full_sector_spectrum(Cx(1.5, 0), Cx(-0.8, 0), k, 4, tuned_arnoldi(4));
    bk.push_back(k * xi_inverse(in_bk, 1));
    SpectrumAtPoint in_dis =
        eng.full_sector_spectrum(Cx(1.5, 0), Cx(-0.2, 0), k, 4, tuned_arnoldi(4));
    dis.push_back(xi_inverse(in_dis, 1));
  }
  auto spread = [](const std::vector<double>& xs) {
    double lo = *std::min_element(xs.begin(), xs.end());
    double hi = *std::max_element(xs.begin(), xs.end());
    return hi / lo - 1.0;
  };
  c.check(*std::min_element(bk.begin(), bk.end()) > 0, "BK-phase gap vanished");
  c.check(spread(bk) <= 0.30, "BK k*xi1 spread " + fmt(spread(bk), 3));
  c.check(*std::min_element(dis.begin(), dis.end()) > 0, "disordered gap vanished");
  c.check(spread(dis) <= 0.10, "disordered xi1 spread " + fmt(spread(dis), 3));
  c.note("BK k*xi1 = {" + fmt(bk[0], 4) + ", " + fmt(bk[1], 4) + ", " + fmt(bk[2], 4) +
         "}; disordered xi1 = {" + fmt(dis[0], 4) + ", " + fmt(dis[1], 4) + ", " + fmt(dis[2], 4) +
         "}");
  return c;
}

Criterion criterion9_branches() {
  Criterion c{"C9 flow-line branches: 2k arcs at |Q|=100 with angles (j-1/2)pi/k @0.05"};
  for (int k : {1, 2, 3}) {
    SpectrumEngine eng("petersen", k);
    BranchAsymptotics ba = branch_asymptotics(eng, k, 100.0, 60 * k, 1e-4);
    c.check(ba.branch_count == 2 * k,
            "k=" + std::to_string(k) + ": " + std::to_string(ba.branch_count) + " branches");
    if (ba.branch_count == 2 * k) {
      // expected angles (j - 1/2) pi / k mapped into (-pi, pi]
      std::vector<double> want;
      for (int j = 1; j <= 2 * k; ++j) {
        double th = (j - 0.5) * M_PI / k;
        if (th > M_PI) th -= 2 * M_PI;
        want.push_back(th);
      }
      std::sort(want.begin(), want.end());
      for (int i = 0; i < 2 * k; ++i)
        c.check(std::abs(ba.angles[i] - want[i]) <= 0.05,
                "k=" + std::to_string(k) + " angle " + fmt(ba.angles[i], 5) + " vs " +
                    fmt(want[i], 5));
      for (double a : ba.angles) {
        bool conj = false;
        for (double b : ba.angles)
          if (std::abs(a + b) < 1e-6) conj = true;
        c.check(conj, "angle set not conjugate-symmetric");
      }
    }
  }
  return c;
}

Criterion criterion10_solver_quality() {
  Criterion c{"C10 solver quality: radii <= 1e-20, conjugate pairing, Vieta, Sokal disk"};
  std::vector<std::pair<QPoly, std::string>> polys;
  for (auto [k, n] : std::vector<std::pair<int, int>>{{1, 3}, {2, 2}, {3, 2}}) {
    BivarPoly z = assemble_Z_generic(deco(k), n);
    polys.push_back({specialize(z, LineSpec::chromatic()),
                     "chromatic k=" + std::to_string(k) + " n=" + std::to_string(n)});
    polys.push_back({specialize(z, LineSpec::flow()),
                     "flow k=" + std::to_string(k) + " n=" + std::to_string(n)});
  }
  for (auto& [p, name] : polys) {
    SolveOptions o;
    o.target_radius = 1e-20;
    RootSet rs = solve_roots(p, o);
    c.check(rs.converged, name + ": solver did not converge");
    c.check(int(rs.roots.size()) == p.degree(), name + ": root count != degree");
    for (auto& r : rs.roots)
      c.check(r.radius <= MpFloat(1e-20), name + ": oversized radius");
    for (auto& r : rs.roots) {
      bool paired = false;
      for (auto& s : rs.roots) {
        MpFloat d = mp_abs(MpComplex(r.value.re - s.value.re, r.value.im + s.value.im));
        if (d <= r.radius + s.radius + MpFloat(1e-22)) paired = true;
      }
      c.check(paired, name + ": conjugate pairing failed");
    }
    VietaReport vr = vieta_check(p, rs);
    c.check(vr.sum_ok && vr.product_ok, name + ": Vieta check failed");
  }
  // Sokal disk sanity: chromatic roots of G(10,1) inside |Q| < 23.9
  {
    BivarPoly z = assemble_Z_generic(deco(1), 10);
    QPoly p = specialize(z, LineSpec::chromatic());
    RootSet rs = solve_roots(p, {});
    double maxmod = 0;
    for (auto& r : rs.roots)
      maxmod = std::max(maxmod, mp_abs(r.value).convert_to<double>());
    c.check(maxmod < 23.9, "chromatic root of G(10,1) at |Q| = " + fmt(maxmod, 6));
    c.note("largest chromatic root modulus of G(10,1): " + fmt(maxmod, 6));
  }
  return c;
}

}  // namespace

int main() {
  std::vector<Criterion (*)()> criteria = {
      criterion1_oracle_equivalence, criterion2_eigenvalue_census, criterion3_qc_tables,
      criterion4_extrapolation,      criterion5_integer_audits,    criterion6_isolated_points,
      criterion7_verticality,        criterion8_xi_scaling,        criterion9_branches,
      criterion10_solver_quality};
  int failures = 0;
  for (auto* fn : criteria) {
    auto t0 = Clock::now();
    Criterion c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.pass = false;
      c.details.push_back(std::string("exception: ") + e.what());
      if (c.name.empty()) c.name = "(criterion crashed before naming itself)";
    }
    c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  ("
              << std::fixed << std::setprecision(1) << c.seconds << "s)\n";
    for (auto& d : c.details) std::cout << "       " << d << "\n";
    if (!c.pass) ++failures;
  }
  if (!extended_enabled())
    std::cout << "[INFO] extended tiers (k=4 census, k>5 tables) skipped; set POTTS_EXTENDED\n";
  std::cout << (failures ? "ACCEPTANCE: FAILED (" + std::to_string(failures) + " criteria)\n"
                         : "ACCEPTANCE: all criteria passed\n");
  return failures ? 1 : 0;
}
