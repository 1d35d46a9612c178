#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <memory>
#include <optional>

#include "potts/arnoldi.hpp"
#include "potts/roots.hpp"
#include "potts/transfer.hpp"

namespace potts {

using Cx = std::complex<double>;

/// Identifies where an eigenvalue came from.
struct SectorTag {
  int ell = 0;
  std::optional<YoungDiagram> lambda;  // absent: lambda-merged sector data
  bool trivial = false;

  std::string to_string() const {
    if (trivial) return "trivial";
    std::string s = "l=" + std::to_string(ell);
    if (lambda) s += " " + lambda->to_string();
    return s;
  }
  bool same_sector(const SectorTag& o) const {
    if (trivial != o.trivial) return false;
    if (trivial) return true;
    if (ell != o.ell) return false;
    if (lambda && o.lambda) return *lambda == *o.lambda;
    return true;
  }
};

struct SpectrumEntry {
  Cx value;
  SectorTag tag;
};

struct SpectrumAtPoint {
  Cx q, v;
  std::vector<SpectrumEntry> entries;  // sorted by modulus, descending
  double error_estimate = 0;           // heuristic relative accuracy of moduli
  bool complete = true;                // false when sectors contributed top-few only
  std::vector<std::string> diagnostics;

  const SpectrumEntry& top(std::size_t i = 0) const { return entries.at(i); }
  void sort_by_modulus() {
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      return std::abs(a.value) > std::abs(b.value);
    });
  }
};

// ---------------------------------------------------------------------------
// Numeric sector evaluation
// ---------------------------------------------------------------------------

/// Numeric evaluation of one sector (factor sequence on a state space).
/// Dense eigensolve below dense_threshold, Arnoldi above.
class SectorOperator {
 public:
  SectorOperator(std::shared_ptr<const StateSpace> sp, std::vector<Factor> factors)
      : sp_(std::move(sp)), factors_(std::move(factors)) {}

  int dim() const { return sp_->dim(); }
  const StateSpace& space() const { return *sp_; }

  std::vector<Cx> apply(const std::vector<Cx>& x, Cx q, Cx v) const {
    TransferWeights<Cx> w(q, v);
    std::vector<Cx> cur = x;
    apply_transfer_in_sector(*sp_, factors_, &cur, w);
    return cur;
  }

  /// All eigenvalues (dense path). Cost n^3; intended for n <= ~1200.
  std::vector<Cx> dense_eigenvalues(Cx q, Cx v, int threads = 0) const {
    const int n = dim();
    if (n == 0) return {};
    std::vector<Cx> m = sector_matrix(*sp_, factors_, q, v, threads);
    Eigen::MatrixXcd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = m[std::size_t(i) * n + j];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, /*computeEigenvectors=*/false);
    std::vector<Cx> vals(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(vals.begin(), vals.end(),
              [](Cx a, Cx b) { return std::abs(a) > std::abs(b); });
    return vals;
  }

  /// Largest-modulus eigenvalues, mode chosen by dimension unless forced.
  std::vector<Cx> top_eigenvalues(Cx q, Cx v, int nev, const ArnoldiOptions& aopts = {},
                                  int dense_threshold = 300, bool* used_dense = nullptr,
                                  std::string* diagnostic = nullptr) const {
    const int n = dim();
    if (n == 0) return {};
    if (n <= dense_threshold || n <= nev + 2) {
      if (used_dense) *used_dense = true;
      std::vector<Cx> all = dense_eigenvalues(q, v);
      if (static_cast<int>(all.size()) > nev) all.resize(nev);
      return all;
    }
    if (used_dense) *used_dense = false;
    ArnoldiOptions o = aopts;
    o.nev = std::min(nev, n);
    TransferWeights<Cx> w(q, v);
    std::vector<Cx> in(n), out(n);
    auto applyfn = [&](const Cx* x, Cx* y) {
      std::copy(x, x + n, in.begin());
      apply_transfer_in_sector(*sp_, factors_, &in, w);
      std::copy(in.begin(), in.end(), y);
    };
    ArnoldiResult r = arnoldi_top_eigenvalues(n, applyfn, o);
    if (!r.converged) {
      if (diagnostic) *diagnostic = r.diagnostic;
      else
        throw numeric_error("Arnoldi did not converge (dim=" + std::to_string(n) + "): " +
                            r.diagnostic);
    }
    return r.values;
  }

 private:
  std::shared_ptr<const StateSpace> sp_;
  std::vector<Factor> factors_;
};

/// Shared numeric machinery for one (family, k): sector operators are built
/// lazily and cached; spectra can be assembled from symmetric sectors, full
/// l-sectors, or dense symbolic blocks.
class SpectrumEngine {
 public:
  SpectrumEngine(std::string family, int k) : family_(std::move(family)), k_(k) {
    if (family_ == "petersen") {
      width_ = k_ + 1;
      factors_ = petersen_factors(k_);
    } else if (family_ == "slab") {
      width_ = k_ * k_;
      factors_ = slab_factors(k_);
    } else {
      throw invalid_input_error("unknown family: " + family_);
    }
    texp_ = trivial_exponent_of(factors_);
  }

  int width() const { return width_; }
  int trivial_exponent() const { return texp_; }
  const std::vector<Factor>& factors() const { return factors_; }

  const SectorOperator& sector(int ell, bool symmetric) {
    auto& slot = ops_[{ell, symmetric}];
    if (!slot)
      slot = std::make_unique<SectorOperator>(
          std::make_shared<StateSpace>(StateSpace::make(width_, ell, !symmetric)), factors_);
    return *slot;
  }

  /// Merged spectrum from the fully symmetric sectors l = 0..lmax plus the
  /// trivial eigenvalue; top nev eigenvalues per sector; tags carry (l,(l)).
  SpectrumAtPoint symmetric_spectrum(Cx q, Cx v, int lmax, int nev,
                                     const ArnoldiOptions& aopts = {}) {
    SpectrumAtPoint sp;
    sp.q = q;
    sp.v = v;
    sp.complete = false;
    sp.error_estimate = 1e-12;
    lmax = std::min(lmax, width_ - 1);  // l = width is the trivial eigenvalue alone
    for (int ell = 0; ell <= lmax; ++ell) {
      const SectorOperator& op = sector(ell, /*symmetric=*/true);
      if (op.dim() == 0) continue;
      std::string diag;
      std::vector<Cx> vals = op.top_eigenvalues(q, v, nev, aopts, 300, nullptr, &diag);
      if (!diag.empty()) sp.diagnostics.push_back("l=" + std::to_string(ell) + ": " + diag);
      YoungDiagram lam(ell ? std::vector<int>(1, ell) : std::vector<int>{});
      // trivial copies hide inside the sector blocks; they are recognized by
      // their exact value v^texp and carried by the explicit trivial entry
      Cx mu = std::pow(v, texp_);
      for (Cx x : vals) {
        if (std::abs(x - mu) <= 1e-9 * (std::abs(mu) + 1e-12)) continue;
        sp.entries.push_back({x, SectorTag{ell, lam, false}});
      }
    }
    sp.entries.push_back({std::pow(v, texp_), SectorTag{width_, std::nullopt, true}});
    sp.sort_by_modulus();
    return sp;
  }

  /// Merged spectrum across full l-sectors (all irreps, with multiplicity);
  /// used for correlation lengths where only moduli ranks matter.
  SpectrumAtPoint full_sector_spectrum(Cx q, Cx v, int lmax, int nev,
                                       const ArnoldiOptions& aopts = {}) {
    SpectrumAtPoint sp;
    sp.q = q;
    sp.v = v;
    sp.complete = false;
    sp.error_estimate = 1e-12;
    lmax = std::min(lmax, width_ - 1);  // l = width is the trivial eigenvalue alone
    for (int ell = 0; ell <= lmax; ++ell) {
      const SectorOperator& op = sector(ell, /*symmetric=*/false);
      if (op.dim() == 0) continue;
      std::string diag;
      std::vector<Cx> vals = op.top_eigenvalues(q, v, nev, aopts, 300, nullptr, &diag);
      if (!diag.empty()) sp.diagnostics.push_back("l=" + std::to_string(ell) + ": " + diag);
      Cx mu = std::pow(v, texp_);
      for (Cx x : vals) {
        if (std::abs(x - mu) <= 1e-9 * (std::abs(mu) + 1e-12)) continue;
        sp.entries.push_back({x, SectorTag{ell, std::nullopt, false}});
      }
    }
    sp.entries.push_back({std::pow(v, texp_), SectorTag{width_, std::nullopt, true}});
    sp.sort_by_modulus();
    return sp;
  }

 private:
  std::string family_;
  int k_ = 0, width_ = 0, texp_ = 0;
  std::vector<Factor> factors_;
  std::map<std::pair<int, bool>, std::unique_ptr<SectorOperator>> ops_;
};

/// Complete lambda-resolved spectrum from a symbolic decomposition (dense
/// eigensolve of every block). Trivial copies inside each block are removed
/// by proximity to v^texp and re-added as the single trivial entry.
inline SpectrumAtPoint dense_block_spectrum(const TransferDecomposition& deco, Cx q, Cx v) {
  SpectrumAtPoint sp;
  sp.q = q;
  sp.v = v;
  sp.error_estimate = 1e-12;
  Cx mu = std::pow(v, deco.trivial_exponent);
  for (auto& b : deco.blocks) {
    const int n = b.dim();
    if (n == 0) continue;
    std::vector<Cx> m = b.matrix.eval_complex(q, v);
    Eigen::MatrixXcd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = m[std::size_t(i) * n + j];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    std::vector<Cx> vals(es.eigenvalues().data(), es.eigenvalues().data() + n);
    // remove the block's trivial copies: the trivial_mult values closest to mu
    std::sort(vals.begin(), vals.end(),
              [&](Cx a, Cx b2) { return std::abs(a - mu) < std::abs(b2 - mu); });
    bool is_reduced_source = deco.family == "petersen" && b.ell == deco.k;
    for (std::size_t i = std::max(b.trivial_mult, 0); i < vals.size(); ++i)
      sp.entries.push_back({vals[i], SectorTag{b.ell, b.lambda, false}});
    (void)is_reduced_source;
  }
  sp.entries.push_back({mu, SectorTag{deco.width, std::nullopt, true}});
  sp.sort_by_modulus();
  return sp;
}

// ---------------------------------------------------------------------------
// Equimodularity and dominance
// ---------------------------------------------------------------------------

struct EquimodularPoint {
  Cx q, v;
  SectorTag first, second;
  double gap_to_third = 0;  // relative modulus gap |mu2|-|mu3| over |mu1|
  enum class Kind { two_real, conjugate_pair, multi } kind = Kind::two_real;
};

/// Checks whether the two largest moduli agree to rel_tol. Conjugate-pair
/// dominance (same sector, conjugate values) is classified separately.
inline std::optional<EquimodularPoint> is_equimodular(const SpectrumAtPoint& sp,
                                                      double rel_tol = 1e-10) {
  if (sp.entries.size() < 2) return std::nullopt;
  double m0 = std::abs(sp.entries[0].value), m1 = std::abs(sp.entries[1].value);
  if (m0 <= 0) return std::nullopt;
  if ((m0 - m1) / m0 > rel_tol) return std::nullopt;
  EquimodularPoint e;
  e.q = sp.q;
  e.v = sp.v;
  e.first = sp.entries[0].tag;
  e.second = sp.entries[1].tag;
  double m2 = sp.entries.size() > 2 ? std::abs(sp.entries[2].value) : 0.0;
  e.gap_to_third = (m1 - m2) / m0;
  int close = 2;
  for (std::size_t i = 2; i < sp.entries.size(); ++i)
    if ((m0 - std::abs(sp.entries[i].value)) / m0 <= rel_tol) ++close;
  Cx a = sp.entries[0].value, b = sp.entries[1].value;
  bool conj_pair = sp.entries[0].tag.same_sector(sp.entries[1].tag) &&
                   std::abs(a - std::conj(b)) <= 1e-8 * (std::abs(a) + 1) &&
                   std::abs(a.imag()) > 1e-10 * (std::abs(a) + 1);
  if (close > 2) e.kind = EquimodularPoint::Kind::multi;
  else if (conj_pair) e.kind = EquimodularPoint::Kind::conjugate_pair;
  else e.kind = EquimodularPoint::Kind::two_real;
  return e;
}

/// Dominant sector at a point; ties within tol are reported as equimodular
/// (never resolved arbitrarily).
struct DominanceLabel {
  SectorTag tag;
  bool equimodular = false;
  bool conjugate_pair = false;  // the "asterisk" regions
};

inline DominanceLabel dominance_label(const SpectrumAtPoint& sp, double rel_tol = 1e-10) {
  DominanceLabel d;
  if (sp.entries.empty()) return d;
  d.tag = sp.entries[0].tag;
  auto eq = is_equimodular(sp, rel_tol);
  if (eq) {
    if (eq->kind == EquimodularPoint::Kind::conjugate_pair) {
      d.conjugate_pair = true;  // same-sector pair: still a dominance label
    } else {
      d.equimodular = true;
    }
  }
  return d;
}


// ---------------------------------------------------------------------------
// Limiting-curve tracing, dominance maps, isolated points
// ---------------------------------------------------------------------------

/// Point source for curve tracing: computes a spectrum at a real parameter
/// pair (x, y). Plane mode: (x,y) = (Q,v). Line mode: (x,y) = (Re Q, Im Q)
/// with v following the line.
struct SpectrumSource {
  std::function<SpectrumAtPoint(double, double)> at;
};

inline SpectrumSource plane_source(const TransferDecomposition& deco) {
  return {[&deco](double q, double v) { return dense_block_spectrum(deco, Cx(q, 0), Cx(v, 0)); }};
}
inline SpectrumSource line_source(const TransferDecomposition& deco, const LineSpec& line) {
  return {[&deco, line](double qr, double qi) {
    Cx q(qr, qi);
    Cx v = line.kind == LineSpec::Kind::v_of_Q
               ? Cx(line.a.get_d(), 0) * q + Cx(line.b.get_d(), 0)
               : q / Cx(line.c.get_d(), 0);
    if (line.kind == LineSpec::Kind::Q_of_v) {
      // parameter is Q; solve v from Q = c v
      v = q / Cx(line.c.get_d(), 0);
    }
    return dense_block_spectrum(deco, q, v);
  }};
}

struct CurvePoint {
  double x = 0, y = 0;
  SectorTag side_a, side_b;  // dominant sectors on the two sides
};

struct VerticalSegment {
  double q = 0;        // the (even integer) Q of the segment
  double v_lo = 0, v_hi = 0;  // endpoints v_-(Q), v_+(Q)
  int samples = 0;
};

struct LimitingCurve {
  std::string context;              // family/k/line description
  std::vector<CurvePoint> points;   // bisected crossing points
  std::vector<std::vector<int>> chains;  // indices into points
  std::vector<int> unchained;
  std::vector<VerticalSegment> vertical_segments;
  double grid_step = 0, tol = 0;
};

namespace spectra_detail {

inline bool tags_differ(const DominanceLabel& a, const DominanceLabel& b) {
  return !a.tag.same_sector(b.tag);
}

/// Bisect the dominance change between two parameter points (linear path).
inline CurvePoint bisect_crossing(const SpectrumSource& src, double x0, double y0, double x1,
                                  double y1, const DominanceLabel& la, const DominanceLabel& lb,
                                  double tol, double rel_tol) {
  CurvePoint cp;
  cp.side_a = la.tag;
  cp.side_b = lb.tag;
  double ax = x0, ay = y0, bx = x1, by = y1;
  for (int it = 0; it < 80 && (std::hypot(bx - ax, by - ay) > tol); ++it) {
    double mx = 0.5 * (ax + bx), my = 0.5 * (ay + by);
    DominanceLabel lm = dominance_label(src.at(mx, my), rel_tol);
    if (lm.tag.same_sector(la.tag)) {
      ax = mx;
      ay = my;
    } else {
      bx = mx;
      by = my;
    }
  }
  cp.x = 0.5 * (ax + bx);
  cp.y = 0.5 * (ay + by);
  return cp;
}

}  // namespace spectra_detail

/// Direct-search limiting curve: scan a rectangular grid for dominant-sector
/// changes, bisect each crossing edge, chain points by nearest neighbor, and
/// detect vertical segments at even integer Q (plane mode).
inline LimitingCurve trace_curve(const SpectrumSource& src, double x0, double x1, double y0,
                                 double y1, double step, double tol, bool plane_mode,
                                 double rel_tol = 1e-10, int threads = 0) {
  LimitingCurve curve;
  curve.grid_step = step;
  curve.tol = tol;
  const int nx = std::max(2, int(std::lround((x1 - x0) / step)) + 1);
  const int ny = std::max(2, int(std::lround((y1 - y0) / step)) + 1);
  std::vector<DominanceLabel> grid(std::size_t(nx) * ny);
  parallel_for(
      std::size_t(nx) * ny,
      [&](std::size_t idx) {
        int i = int(idx) % nx, j = int(idx) / nx;
        double x = x0 + i * (x1 - x0) / (nx - 1), y = y0 + j * (y1 - y0) / (ny - 1);
        grid[idx] = dominance_label(src.at(x, y), rel_tol);
      },
      threads);
  auto at = [&](int i, int j) -> const DominanceLabel& { return grid[std::size_t(j) * nx + i]; };
  auto px = [&](int i) { return x0 + i * (x1 - x0) / (nx - 1); };
  auto py = [&](int j) { return y0 + j * (y1 - y0) / (ny - 1); };

  std::vector<std::pair<int, int>> edges;  // encoded crossing edges
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (i + 1 < nx && spectra_detail::tags_differ(at(i, j), at(i + 1, j)))
        edges.push_back({j * nx + i, j * nx + i + 1});
      if (j + 1 < ny && spectra_detail::tags_differ(at(i, j), at(i, j + 1)))
        edges.push_back({j * nx + i, (j + 1) * nx + i});
    }
  curve.points.resize(edges.size());
  parallel_for(
      edges.size(),
      [&](std::size_t e) {
        int a = edges[e].first, b = edges[e].second;
        int ia = a % nx, ja = a / nx, ib = b % nx, jb = b / nx;
        curve.points[e] = spectra_detail::bisect_crossing(
            src, px(ia), py(ja), px(ib), py(jb), grid[a], grid[b], tol, rel_tol);
      },
      threads);

  // chain by greedy nearest neighbor with a 3*step cutoff
  const double cutoff = 3 * step;
  std::vector<char> used(curve.points.size(), 0);
  for (std::size_t s = 0; s < curve.points.size(); ++s) {
    if (used[s]) continue;
    std::vector<int> chain{int(s)};
    used[s] = 1;
    for (bool grew = true; grew;) {
      grew = false;
      auto& tail = curve.points[chain.back()];
      int best = -1;
      double bd = cutoff;
      for (std::size_t t = 0; t < curve.points.size(); ++t) {
        if (used[t]) continue;
        double d = std::hypot(curve.points[t].x - tail.x, curve.points[t].y - tail.y);
        if (d < bd) {
          bd = d;
          best = int(t);
        }
      }
      if (best >= 0) {
        chain.push_back(best);
        used[best] = 1;
        grew = true;
      }
    }
    if (chain.size() > 1) curve.chains.push_back(std::move(chain));
    else curve.unchained.push_back(int(s));
  }

  if (plane_mode) {
    // vertical segments: crossing points hugging an even integer Q
    std::map<int, std::vector<double>> by_q;
    for (auto& p : curve.points) {
      double qr = std::round(p.x / 2.0) * 2.0;
      if (std::abs(p.x - qr) < 5 * tol && qr >= x0 && qr <= x1)
        by_q[int(std::lround(qr))].push_back(p.y);
    }
    for (auto& [q, vs] : by_q) {
      if (vs.size() < 3) continue;
      std::sort(vs.begin(), vs.end());
      VerticalSegment seg;
      seg.q = q;
      seg.v_lo = vs.front();
      seg.v_hi = vs.back();
      seg.samples = int(vs.size());
      curve.vertical_segments.push_back(seg);
    }
  }
  return curve;
}

/// Per-cell dominant sector map over a rectangle.
struct DominanceMap {
  int nx = 0, ny = 0;
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  std::vector<DominanceLabel> cells;  // row-major, y-major order
};

inline DominanceMap dominance_map(const SpectrumSource& src, double x0, double x1, double y0,
                                  double y1, int nx, int ny, double rel_tol = 1e-10,
                                  int threads = 0) {
  DominanceMap m;
  m.nx = nx;
  m.ny = ny;
  m.x0 = x0;
  m.x1 = x1;
  m.y0 = y0;
  m.y1 = y1;
  m.cells.resize(std::size_t(nx) * ny);
  parallel_for(
      std::size_t(nx) * ny,
      [&](std::size_t idx) {
        int i = int(idx) % nx, j = int(idx) / nx;
        double x = x0 + (i + 0.5) * (x1 - x0) / nx, y = y0 + (j + 0.5) * (y1 - y0) / ny;
        m.cells[idx] = dominance_label(src.at(x, y), rel_tol);
      },
      threads);
  return m;
}

struct IsolatedPoint {
  double q = 0;           // amplitude root (real)
  SectorTag tag;          // sector whose amplitude vanishes
  QPoly amplitude;        // the effective amplitude polynomial
  double dominance_gap = 0;  // relative gap |mu1|-|mu2| at the point
  double v_at = 0;           // the v where dominance was verified
};

/// Effective amplitude of a sector in the complete decomposition: generic
/// alpha for l < k, beta_k for the reduced l = k eigenvalues, gamma_{k+1}
/// for the trivial one.
inline QPoly effective_amplitude(const TransferDecomposition& deco, const SectorTag& tag) {
  if (tag.trivial) return deco.gamma_kp1;
  if (deco.family == "petersen" && tag.ell == deco.k) return deco.beta_k;
  if (!tag.lambda) throw invalid_input_error("effective_amplitude needs a lambda-resolved tag");
  return amplitude(tag.ell, *tag.lambda);
}

/// BKW condition (a): points where the dominant eigenvalue is unique and its
/// effective amplitude vanishes. Amplitude roots are found exactly (rational
/// roots) or to high precision; dominance is verified numerically on the
/// given line (or at sampled v for plane scans).
std::vector<IsolatedPoint> isolated_points(const TransferDecomposition& deco,
                                           const LineSpec* line, double q_lo, double q_hi,
                                           const std::vector<double>& v_samples,
                                           double dominance_tol = 1e-10);

/// Real roots of an exact polynomial inside [lo, hi]: integer roots are
/// extracted by exact division first, the rest via the multiprecision
/// solver at radius 1e-30.
inline std::vector<double> real_roots_in_window(const QPoly& p, double lo, double hi) {
  std::vector<double> out;
  if (p.degree() < 1) return out;
  QPoly rest = p;
  for (long m = long(std::ceil(lo)); m <= long(std::floor(hi)); ++m) {
    for (;;) {
      Rat rem;
      QPoly quo = rest.divide_linear(make_rat(m), &rem);
      if (rem != 0 || rest.degree() < 1) break;
      out.push_back(double(m));
      rest = quo;
      break;  // report each root once; multiplicities do not add points
    }
  }
  if (rest.degree() >= 1) {
    RootSet rs = solve_roots(rest, {.target_radius = 1e-30});
    for (auto& r : rs.roots) {
      double re = r.value.re.convert_to<double>();
      double im = r.value.im.convert_to<double>();
      double rad = r.radius.convert_to<double>();
      if (std::abs(im) <= rad + 1e-25 && re >= lo - 1e-12 && re <= hi + 1e-12)
        out.push_back(re);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            out.end());
  return out;
}

inline std::vector<IsolatedPoint> isolated_points(const TransferDecomposition& deco,
                                                  const LineSpec* line, double q_lo, double q_hi,
                                                  const std::vector<double>& v_samples,
                                                  double dominance_tol) {
  std::vector<IsolatedPoint> out;
  // candidate sector tags of the complete decomposition
  std::vector<SectorTag> tags;
  for (auto& b : deco.blocks) {
    if (deco.family == "petersen" && b.ell >= deco.k) continue;
    if (b.nontrivial_dim() == 0) continue;
    tags.push_back(SectorTag{b.ell, b.lambda, false});
  }
  if (deco.family == "petersen") {
    tags.push_back(SectorTag{deco.k, YoungDiagram(std::vector<int>(1, deco.k)), false});
    tags.push_back(SectorTag{deco.width, std::nullopt, true});
  }
  for (auto& tag : tags) {
    QPoly amp = effective_amplitude(deco, tag);
    SectorTag match = tag;
    if (deco.family == "petersen" && !tag.trivial && tag.ell == deco.k)
      match.lambda = std::nullopt;  // any lambda |- k carries the reduced eigenvalues
    for (double root : real_roots_in_window(amp, q_lo, q_hi)) {
      // verify unique dominance of this sector at the root
      for (double vs : v_samples) {
        double v = line ? (line->kind == LineSpec::Kind::v_of_Q
                               ? line->a.get_d() * root + line->b.get_d()
                               : vs)
                        : vs;
        if (line && line->kind == LineSpec::Kind::Q_of_v) v = root / line->c.get_d();
        SpectrumAtPoint sp = dense_block_spectrum(deco, Cx(root, 0), Cx(v, 0));
        if (sp.entries.size() < 2) continue;
        double m0 = std::abs(sp.entries[0].value);
        if (m0 <= 0) continue;
        // dominant must belong to this sector, uniquely
        if (!sp.entries[0].tag.same_sector(match)) continue;
        std::size_t i = 1;
        while (i < sp.entries.size() && sp.entries[i].tag.same_sector(sp.entries[0].tag) &&
               std::abs(std::abs(sp.entries[i].value) - m0) <= dominance_tol * m0)
          ++i;  // skip exact duplicates of the same eigenvalue across lambda copies
        double m1 = i < sp.entries.size() ? std::abs(sp.entries[i].value) : 0.0;
        if ((m0 - m1) / m0 <= dominance_tol) continue;  // not uniquely dominant
        IsolatedPoint ip;
        ip.q = root;
        ip.tag = tag;
        ip.amplitude = amp;
        ip.dominance_gap = (m0 - m1) / m0;
        ip.v_at = v;
        out.push_back(ip);
        break;
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const IsolatedPoint& a, const IsolatedPoint& b) {
    return a.q < b.q;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const IsolatedPoint& a, const IsolatedPoint& b) {
                          return std::abs(a.q - b.q) < 1e-12 && a.tag.same_sector(b.tag);
                        }),
            out.end());
  return out;
}


}  // namespace potts
