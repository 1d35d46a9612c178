#pragma once

#include <filesystem>
#include <fstream>
#include <optional>

#include "potts/partitions.hpp"
#include "potts/poly_matrix.hpp"

namespace potts {

// ---------------------------------------------------------------------------
// Operator factorization
// ---------------------------------------------------------------------------

/// One sparse factor of the transfer matrix: H_ij = I + v J_ij (join) or
/// V_i = v I + D_i (detach).
struct Factor {
  enum class Kind { join, detach } kind;
  int i = 0, j = 0;
  static Factor J(int i, int j) { return {Kind::join, i, j}; }
  static Factor D(int i) { return {Kind::detach, i, 0}; }
};

/// Factors of T for G(nk,k) in application order (first applied first):
/// V_0 .. V_k, then H_{0k} V_0 H_{0,k-1} V_0 ... H_{02} V_0 H_{01}.
inline std::vector<Factor> petersen_factors(int k) {
  if (k < 1) throw invalid_input_error("petersen transfer requires k >= 1");
  std::vector<Factor> f;
  for (int i = 0; i <= k; ++i) f.push_back(Factor::D(i));
  for (int i = k; i >= 2; --i) {
    f.push_back(Factor::J(0, i));
    f.push_back(Factor::D(0));
  }
  f.push_back(Factor::J(0, 1));
  return f;
}

/// Factors of T = V * H for Sc(L,n): all horizontal joins first (they
/// commute), then the L^2 vertical detaches.
inline std::vector<Factor> slab_factors(int L) {
  if (L < 1) throw invalid_input_error("slab transfer requires L >= 1");
  std::vector<Factor> f;
  auto id = [&](int x, int y) { return x + L * y; };
  for (int y = 0; y < L; ++y)
    for (int x = 0; x + 1 < L; ++x) f.push_back(Factor::J(id(x, y), id(x + 1, y)));
  for (int x = 0; x < L; ++x)
    for (int y = 0; y + 1 < L; ++y) f.push_back(Factor::J(id(x, y), id(x, y + 1)));
  for (int i = 0; i < L * L; ++i) f.push_back(Factor::D(i));
  return f;
}

inline int trivial_exponent_of(const std::vector<Factor>& factors) {
  int n = 0;
  for (auto& f : factors) n += (f.kind == Factor::Kind::detach);
  return n;
}

// ---------------------------------------------------------------------------
// In-sector state spaces and factor application
// ---------------------------------------------------------------------------

/// The diagonal-sector state space for (width, links): marked partitions of
/// the top points, marks ordered (generic) or unordered (fully symmetric
/// sector). States are kept in key order so lookups are binary searches.
struct StateSpace {
  int W = 0, ell = 0;
  bool ordered = true;
  std::vector<MarkedState> states;
  std::vector<MarkedState::Key> keys;

  static StateSpace make(int W, int ell, bool ordered) {
    StateSpace s;
    s.W = W;
    s.ell = ell;
    s.ordered = ordered;
    s.states = enumerate_marked_states(W, ell, ordered);
    s.keys.reserve(s.states.size());
    for (auto& st : s.states) s.keys.push_back(st.key());
    for (std::size_t i = 1; i < s.keys.size(); ++i)
      if (!(s.keys[i - 1] < s.keys[i])) throw numeric_error("state enumeration out of order");
    return s;
  }

  int dim() const { return static_cast<int>(states.size()); }

  int index(const MarkedState::Key& k) const {
    auto it = std::lower_bound(keys.begin(), keys.end(), k);
    if (it == keys.end() || !(*it == k)) throw numeric_error("state not found in sector space");
    return static_cast<int>(it - keys.begin());
  }
};

namespace transfer_detail {

inline bool ms_is_marked(const MarkedState& s, int block, bool ordered) {
  if (ordered)
    return std::find(s.mark_block.begin(), s.mark_block.end(), block) != s.mark_block.end();
  return std::binary_search(s.mark_block.begin(), s.mark_block.end(), block);
}

/// Merge blocks of points i and j (must be distinct, not both marked).
inline MarkedState ms_join(const MarkedState& s, int i, int j, bool ordered) {
  int lo = s.rgs[i], hi = s.rgs[j];
  if (lo > hi) std::swap(lo, hi);
  MarkedState t = s;
  for (int& x : t.rgs) {
    if (x == hi) x = lo;
    else if (x > hi) --x;
  }
  for (int& m : t.mark_block) {
    if (m == hi) m = lo;
    else if (m > hi) --m;
  }
  if (!ordered) std::sort(t.mark_block.begin(), t.mark_block.end());
  return t;
}

/// Remove point i (whose block has other members) into a fresh singleton.
inline MarkedState ms_detach(const MarkedState& s, int i, bool ordered) {
  MarkedState t = s;
  t.rgs[i] = t.block_count();
  std::vector<int> map(t.rgs.size() + 2, -1);
  int next = 0;
  for (int& x : t.rgs) {
    if (map[x] < 0) map[x] = next++;
    x = map[x];
  }
  for (int& m : t.mark_block) m = map[m];
  if (!ordered) std::sort(t.mark_block.begin(), t.mark_block.end());
  return t;
}

template <class S>
struct ScalarOps;
template <>
struct ScalarOps<BivarPoly> {
  static BivarPoly from_rat(const Rat& q) { return BivarPoly(q); }
  static bool is_zero(const BivarPoly& x) { return x.is_zero(); }
};
template <>
struct ScalarOps<Rat> {
  static Rat from_rat(const Rat& q) { return q; }
  static bool is_zero(const Rat& x) { return x == 0; }
};
template <>
struct ScalarOps<std::complex<double>> {
  static std::complex<double> from_rat(const Rat& q) { return {q.get_d(), 0.0}; }
  static bool is_zero(const std::complex<double>& x) { return x == std::complex<double>(0.0); }
};

}  // namespace transfer_detail

/// Weights a factor application needs, precomputed in the scalar domain.
template <class S>
struct TransferWeights {
  S v, one_plus_v, v_plus_Q;
  TransferWeights(const S& Q, const S& vv) : v(vv), one_plus_v(vv + S(1)), v_plus_Q(vv + Q) {}
};

/// Applies one factor to a coefficient vector over the sector space,
/// dropping transitions that leave the sector (fewer links). Per-factor
/// projection is exact for the diagonal block: once a component drops below
/// the sector it can never return.
template <class S>
void apply_factor_in_sector(const StateSpace& sp, const Factor& f, const std::vector<S>& in,
                            std::vector<S>* out, const TransferWeights<S>& w) {
  using Ops = transfer_detail::ScalarOps<S>;
  out->assign(in.size(), S(0));
  for (std::size_t idx = 0; idx < in.size(); ++idx) {
    const S& amp = in[idx];
    if (Ops::is_zero(amp)) continue;
    const MarkedState& s = sp.states[idx];
    if (f.kind == Factor::Kind::join) {
      int bi = s.rgs[f.i], bj = s.rgs[f.j];
      if (bi == bj) {
        (*out)[idx] += amp * w.one_plus_v;
      } else if (transfer_detail::ms_is_marked(s, bi, sp.ordered) &&
                 transfer_detail::ms_is_marked(s, bj, sp.ordered)) {
        (*out)[idx] += amp;  // the joined image would merge two links
      } else {
        (*out)[idx] += amp;
        MarkedState t = transfer_detail::ms_join(s, f.i, f.j, sp.ordered);
        (*out)[sp.index(t.key())] += amp * w.v;
      }
    } else {
      int b = s.rgs[f.i];
      int size = 0;
      for (int x : s.rgs) size += (x == b);
      if (size == 1) {
        if (transfer_detail::ms_is_marked(s, b, sp.ordered)) {
          (*out)[idx] += amp * w.v;  // detaching would kill the link
        } else {
          (*out)[idx] += amp * w.v_plus_Q;
        }
      } else {
        (*out)[idx] += amp * w.v;
        MarkedState t = transfer_detail::ms_detach(s, f.i, sp.ordered);
        (*out)[sp.index(t.key())] += amp;
      }
    }
  }
}

template <class S>
void apply_transfer_in_sector(const StateSpace& sp, const std::vector<Factor>& factors,
                              std::vector<S>* vec, const TransferWeights<S>& w) {
  std::vector<S> tmp;
  for (auto& f : factors) {
    apply_factor_in_sector(sp, f, *vec, &tmp, w);
    vec->swap(tmp);
  }
}

/// Dense in-sector transfer matrix on a state space (columns = images of
/// unit vectors), in any scalar domain.
template <class S>
std::vector<S> sector_matrix(const StateSpace& sp, const std::vector<Factor>& factors, const S& Q,
                             const S& v, int threads = 0) {
  const int n = sp.dim();
  TransferWeights<S> w(Q, v);
  std::vector<S> m(std::size_t(n) * n, S(0));
  parallel_for(
      n,
      [&](std::size_t col) {
        std::vector<S> vec(n, S(0));
        vec[col] = S(1);
        apply_transfer_in_sector(sp, factors, &vec, w);
        for (int i = 0; i < n; ++i) m[std::size_t(i) * n + col] = vec[i];
      },
      threads);
  return m;
}

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

/// One irrep block T_{W,l,lambda} (single copy: each eigenvalue of the
/// sector appears once, the dim-lambda multiplicity is factored out).
/// After extraction the trivial eigenvalue v^texp is accounted for by
/// trivial_mult; the nontrivial part is represented spectrally (traces and
/// characteristic polynomials of the full block minus trivial copies), so
/// no fraction-field quotient matrix is ever materialized.
struct TransferBlock {
  int ell = 0;
  YoungDiagram lambda;
  PolyMatrix matrix;
  int trivial_mult = -1;     // dim of the trivial eigenspace over Q(Q,v)
  bool trivial_exact = false;  // true when certified by a verified symbolic eigenbasis
  PolyMatrix trivial_kernel;   // verified eigenvectors (columns, cleared denominators)

  int dim() const { return matrix.rows(); }
  int nontrivial_dim() const { return dim() - std::max(trivial_mult, 0); }
};

/// Generic amplitude alpha_{l,lambda}(Q) = (dim lambda / l!) *
/// prod_{i=0}^{l-1} (Q - i - lambda_{l-i}) with lambda padded by zeros.
inline QPoly amplitude(int ell, const YoungDiagram& lambda) {
  if (lambda.size() != ell) throw invalid_input_error("amplitude: diagram must partition l");
  QPoly a = QPoly::constant(Rat(irrep_dimension(lambda)) / Rat(factorial(ell)));
  for (int i = 0; i < ell; ++i) {
    int lam = (ell - 1 - i) < lambda.row_count() ? lambda.rows[ell - 1 - i] : 0;
    a *= QPoly{std::vector<Rat>{make_rat(-i - lam), Rat(1)}};
  }
  return a;
}

/// beta_l(Q) = sum_lambda alpha_{l,lambda} dim(lambda).
inline QPoly beta_poly(int ell) {
  QPoly b;
  for (auto& lam : partitions_of(ell)) b += amplitude(ell, lam) * Rat(irrep_dimension(lam));
  return b;
}

inline BivarPoly qpoly_to_bivar_Q(const QPoly& p) {
  BivarPoly b;
  for (int i = 0; i <= p.degree(); ++i) b.add_term(i, 0, p.coeff(i));
  return b;
}

namespace transfer_detail {

/// Build the single-copy block for a symmetrized basis: apply T to each
/// basis column and read coordinates off the pivot rows. Invariance of the
/// span is checked exactly on the non-pivot rows (sampled for big blocks).
inline PolyMatrix build_block_symbolic(const StateSpace& sp, const std::vector<Factor>& factors,
                                       const SymmetrizedBasis& sb, int threads = 0) {
  const int n = sp.dim();
  const int m = sb.basis.cols();
  TransferWeights<BivarPoly> w(BivarPoly::Q(), BivarPoly::v());
  PolyMatrix block(m, m);
  std::vector<char> is_pivot(n, 0);
  for (int p : sb.pivot_rows) is_pivot[p] = 1;
  std::vector<std::string> errors(m);
  parallel_for(
      m,
      [&](std::size_t col) {
        std::vector<BivarPoly> vec(n);
        for (int i = 0; i < n; ++i)
          if (sb.basis.at(i, int(col)) != 0) vec[i] = BivarPoly(sb.basis.at(i, int(col)));
        apply_transfer_in_sector(sp, factors, &vec, w);
        for (int r = 0; r < m; ++r) block.at(r, int(col)) = vec[sb.pivot_rows[r]];
        int checked = 0;
        for (int i = 0; i < n && checked < (n <= 120 ? n : 16); ++i) {
          if (is_pivot[i]) continue;
          ++checked;
          BivarPoly resid = vec[i];
          for (int r = 0; r < m; ++r)
            if (sb.basis.at(i, r) != 0) resid -= block.at(r, int(col)) * sb.basis.at(i, r);
          if (!resid.is_zero()) {
            errors[col] = "symmetrized span is not invariant (l=" + std::to_string(sb.ell) +
                          ", lambda=" + sb.lambda.to_string() + ")";
            return;
          }
        }
      },
      threads);
  for (auto& e : errors)
    if (!e.empty()) throw numeric_error(e);
  return block;
}

struct ProbePoint {
  Rat q, v;
};
/// Non-special rational probe points (away from small integers in Q).
inline std::vector<ProbePoint> probe_points() {
  return {{make_rat(13, 7), make_rat(19, 5)},
          {make_rat(23, 11), make_rat(-31, 7)},
          {make_rat(41, 13), make_rat(53, 9)}};
}

/// Canonical (row-reduced) kernel of (M(q,v) - mu I): rows are the reduced
/// basis vectors; pivots records their pivot columns.
inline bool point_kernel_rref(const PolyMatrix& m, const Rat& q, const Rat& v, int texp,
                              QMatrix* rows, std::vector<int>* pivots) {
  int n = m.rows();
  QMatrix a = m.eval(q, v);
  Rat mu = rat_pow(v, texp);
  for (int i = 0; i < n; ++i) a.at(i, i) -= mu;
  auto ker = a.kernel();
  int d = static_cast<int>(ker.size());
  QMatrix kr(d, n);
  for (int r = 0; r < d; ++r)
    for (int i = 0; i < n; ++i) kr.at(r, i) = ker[r][i];
  *pivots = kr.rref();
  *rows = kr;
  return true;
}

}  // namespace transfer_detail

/// Splits off the trivial eigenvalue v^texp from a block. The eigenspace
/// dimension over Q(Q,v) is certified by reconstructing polynomial
/// eigenvectors from rational samples (verified exactly), plus an
/// at-probe-point algebraic-multiplicity match certifying the absence of
/// Jordan structure. Falls back to probe-point multiplicities with
/// trivial_exact = false when reconstruction is disabled or fails.
inline void extract_trivial(TransferBlock* block, int texp, bool allow_reconstruction = true,
                            int threads = 0) {
  using namespace transfer_detail;
  const int n = block->dim();
  block->trivial_kernel = PolyMatrix();
  if (n == 0) {
    block->trivial_mult = 0;
    block->trivial_exact = true;
    return;
  }
  const BivarPoly mu = BivarPoly::v(texp);
  // all-trivial fast path: the block literally equals mu * I
  {
    bool all = true;
    for (int i = 0; i < n && all; ++i)
      for (int j = 0; j < n && all; ++j)
        if (!(block->matrix.at(i, j) == (i == j ? mu : BivarPoly(0)))) all = false;
    if (all) {
      block->trivial_mult = n;
      block->trivial_exact = true;
      block->trivial_kernel = PolyMatrix::identity(n);
      return;
    }
  }
  auto points = probe_points();
  // kernel dimension and pivot structure at probe points
  int d = -1;
  std::vector<int> pivots;
  for (auto& pt : points) {
    QMatrix rows;
    std::vector<int> piv;
    point_kernel_rref(block->matrix, pt.q, pt.v, texp, &rows, &piv);
    if (d < 0 || rows.rows() < d) {
      d = rows.rows();
      pivots = piv;
    }
  }
  if (d == 0) {
    block->trivial_mult = 0;
    block->trivial_exact = true;  // det(M - mu I) != 0 at a probe point is conclusive
    return;
  }

  // at-point algebraic multiplicity (upper bound on the generic one)
  int alg_at_point = -1;
  {
    auto& pt = points[0];
    QPoly chi = charpoly_exact(block->matrix.eval(pt.q, pt.v), threads);
    Rat muv = rat_pow(pt.v, texp);
    int m = 0;
    for (;;) {
      Rat rem;
      QPoly qt = chi.divide_linear(muv, &rem);
      if (rem != 0) break;
      chi = qt;
      ++m;
    }
    alg_at_point = m;
  }

  block->trivial_mult = d;
  block->trivial_exact = false;

  if (!allow_reconstruction) return;

  // reconstruct the kernel rows as polynomial vectors: per row, a shared
  // denominator ansatz num_j(Q,v)/den(Q,v) fitted on rational samples, then
  // verified symbolically.
  auto try_reconstruct = [&](int degQ, int degv) -> bool {
    std::vector<char> is_piv(n, 0);
    for (int p : pivots) is_piv[p] = 1;
    std::vector<int> nonpiv;
    for (int i = 0; i < n; ++i)
      if (!is_piv[i]) nonpiv.push_back(i);
    const int nmono = (degQ + 1) * (degv + 1);
    const int unknowns = nmono * (static_cast<int>(nonpiv.size()) + 1);
    // each sample contributes one equation per non-pivot column
    const int samples =
        unknowns / std::max<int>(1, static_cast<int>(nonpiv.size())) + 2 * nmono + 6;
    // sample kernels on a deterministic rational grid
    std::vector<std::pair<Rat, Rat>> pts;
    std::vector<QMatrix> kernels;
    int t = 0;
    while (static_cast<int>(pts.size()) < samples && t < samples * 4) {
      ++t;
      Rat q = make_rat(2 * t + 1, 2) + make_rat(1, 7);   // (2t+1)/2 + 1/7
      Rat v = make_rat((t % 9) * 5 + 7, 3) * make_rat((t % 2) ? 1 : -1);
      QMatrix rows;
      std::vector<int> piv;
      transfer_detail::point_kernel_rref(block->matrix, q, v, texp, &rows, &piv);
      if (rows.rows() != d || piv != pivots) continue;  // special point, skip
      pts.emplace_back(q, v);
      kernels.push_back(std::move(rows));
    }
    if (static_cast<int>(pts.size()) < samples) return false;
    PolyMatrix K(n, d);
    for (int r = 0; r < d; ++r) {
      // unknowns: den coefficients then num coefficients per non-pivot column
      QMatrix sys(samples * static_cast<int>(nonpiv.size()), unknowns);
      int row = 0;
      for (int s = 0; s < samples; ++s) {
        auto [q, v] = pts[s];
        std::vector<Rat> mono(nmono);
        int mi = 0;
        for (int a = 0; a <= degQ; ++a)
          for (int b = 0; b <= degv; ++b) mono[mi++] = rat_pow(q, a) * rat_pow(v, b);
        for (std::size_t jc = 0; jc < nonpiv.size(); ++jc) {
          Rat val = kernels[s].at(r, nonpiv[jc]);
          for (int m2 = 0; m2 < nmono; ++m2) {
            sys.at(row, m2) = -val * mono[m2];                          // -val * den
            sys.at(row, nmono * (1 + static_cast<int>(jc)) + m2) = mono[m2];  // + num_j
          }
          ++row;
        }
      }
      auto null = sys.kernel();
      bool done = false;
      for (auto& sol : null) {
        BivarPoly den;
        int mi = 0;
        for (int a = 0; a <= degQ; ++a)
          for (int b = 0; b <= degv; ++b) den.add_term(a, b, sol[mi++]);
        if (den.is_zero()) continue;
        std::vector<BivarPoly> w(n);
        for (int s = 0; s < d; ++s) w[pivots[s]] = (s == r) ? den : BivarPoly(0);
        for (std::size_t jc = 0; jc < nonpiv.size(); ++jc) {
          BivarPoly num;
          for (int a = 0; a <= degQ; ++a)
            for (int b = 0; b <= degv; ++b)
              num.add_term(a, b, sol[nmono * (1 + static_cast<int>(jc)) + (degv + 1) * a + b]);
          w[nonpiv[jc]] = num;
        }
        // exact verification: (M - mu I) w == 0
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
          BivarPoly acc = -(mu * w[i]);
          for (int t2 = 0; t2 < n; ++t2)
            if (!w[t2].is_zero() && !block->matrix.at(i, t2).is_zero())
              acc += block->matrix.at(i, t2) * w[t2];
          if (!acc.is_zero()) ok = false;
        }
        if (!ok) continue;
        for (int i = 0; i < n; ++i) K.at(i, r) = w[i];
        done = true;
        break;
      }
      if (!done) return false;
    }
    block->trivial_kernel = std::move(K);
    return true;
  };

  for (auto [dq, dv] : {std::pair<int, int>{2, 0}, {4, 0}, {2, 2}, {4, 2}, {6, 3}}) {
    if (try_reconstruct(dq, dv)) {
      // d verified vectors with unit-triangular pivot structure are
      // independent over Q(Q,v); together with the at-point algebraic
      // multiplicity == d this certifies multiplicity d with no Jordan part.
      block->trivial_exact = (alg_at_point == d);
      return;
    }
  }
}

/// Trace of the n-th power of the nontrivial part:
/// tr(nt^n) = tr(full^n) - trivial_mult * v^(texp n).
inline BivarPoly nontrivial_trace_power(const TransferBlock& b, int n, int texp,
                                        int threads = 0) {
  BivarPoly tr = trace_of_power(b.matrix, n, 80'000'000, threads);
  if (b.trivial_mult > 0)
    tr -= BivarPoly::v(texp * n) * Rat(b.trivial_mult);
  return tr;
}

/// Characteristic polynomial of the nontrivial part at a rational point:
/// char(full at pt) synthetically divided by (x - v^texp)^trivial_mult.
/// Throws if the required divisibility fails (the multiplicity would be
/// wrong or the point is special in an unexpected way).
inline QPoly nontrivial_charpoly_at(const TransferBlock& b, const Rat& q, const Rat& v, int texp,
                                    int threads = 0) {
  QPoly chi = charpoly_exact(b.matrix.eval(q, v), threads);
  Rat mu = rat_pow(v, texp);
  for (int i = 0; i < b.trivial_mult; ++i) {
    Rat rem;
    QPoly qt = chi.divide_linear(mu, &rem);
    if (rem != 0)
      throw numeric_error("trivial multiplicity not divisible out at probe point");
    chi = qt;
  }
  return chi;
}

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

struct TransferDecomposition {
  std::string family;  // "petersen" or "slab"
  int k = 0;           // Petersen k; for slabs this is L
  int width = 0;       // cross-section points: k+1, or L^2
  int trivial_exponent = 0;
  std::vector<Factor> factors;
  std::vector<TransferBlock> blocks;

  // Petersen holdings: the l=k sector collapses onto 2k+1 distinct
  // nontrivial eigenvalues carried once by the fully symmetric block.
  bool collapse_verified = false;   // char identity proven symbolically
  bool collapse_at_points = false;  // verified at probe points only
  QPoly beta_k, gamma_kp1;

  const TransferBlock& block(int ell, const YoungDiagram& lam) const {
    for (auto& b : blocks)
      if (b.ell == ell && b.lambda == lam) return b;
    throw invalid_input_error("no such block");
  }
  const TransferBlock& reduced_source() const {  // the lambda = (k) block
    return block(k, YoungDiagram(std::vector<int>(1, k)));
  }
  int reduced_dim() const { return 2 * k + 1; }
};

struct DecomposeOptions {
  int threads = 0;
  std::string cache_dir;  // empty = no caching
  bool verify_collapse = true;
  bool exact_trivial = true;  // reconstruct + verify trivial eigenbases
  int exact_trivial_max_dim = 64;
};

// 2D-interpolated exact characteristic polynomial of a PolyMatrix; cost
// grows with n^2 * degrees, intended for the small l=k family blocks.
QPoly interpolate_newton(const std::vector<Rat>& xs, const std::vector<Rat>& ys);

namespace transfer_detail {

inline std::string block_cache_name(const std::string& family, int k, int ell,
                                    const YoungDiagram& lam) {
  return "block_" + family + std::to_string(k) + "_l" + std::to_string(ell) + "_lam" +
         lam.label() + "_v2.json";
}

inline bool load_block_cache(const std::string& dir, const std::string& family, int k,
                             TransferBlock* b) {
  namespace fs = std::filesystem;
  fs::path p = fs::path(dir) / block_cache_name(family, k, b->ell, b->lambda);
  std::ifstream in(p);
  if (!in) return false;
  try {
    nlohmann::json j;
    in >> j;
    PolyMatrix m = PolyMatrix::from_json(j.at("matrix"));
    if (m.content_hash() != j.at("checksum").get<std::uint64_t>()) return false;
    b->matrix = std::move(m);
    b->trivial_mult = j.at("trivial_mult").get<int>();
    b->trivial_exact = j.at("trivial_exact").get<bool>();
    b->trivial_kernel = PolyMatrix::from_json(j.at("trivial_kernel"));
    return true;
  } catch (...) {
    return false;
  }
}

inline void save_block_cache(const std::string& dir, const std::string& family, int k,
                             const TransferBlock& b) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  nlohmann::json j{{"family", family},
                   {"k", k},
                   {"ell", b.ell},
                   {"lambda", b.lambda.label()},
                   {"dim", b.dim()},
                   {"trivial_mult", b.trivial_mult},
                   {"trivial_exact", b.trivial_exact},
                   {"matrix", b.matrix.to_json()},
                   {"trivial_kernel", b.trivial_kernel.to_json()},
                   {"checksum", b.matrix.content_hash()}};
  std::ofstream out(fs::path(dir) / block_cache_name(family, k, b.ell, b.lambda));
  out << j.dump() << "\n";
}

}  // namespace transfer_detail

/// Exact bivariate characteristic polynomial coefficients c_i(Q,v) of a
/// PolyMatrix, via evaluation at an integer grid plus Newton interpolation.
/// Returns the coefficient list (ascending in x) as BivarPoly.
inline std::vector<BivarPoly> charpoly_bivar(const PolyMatrix& m, int threads = 0) {
  const int n = m.rows();
  int dq = 0, dv = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      dq = std::max(dq, m.at(i, j).deg_Q());
      dv = std::max(dv, m.at(i, j).deg_v());
    }
  const int DQ = n * std::max(dq, 0), DV = n * std::max(dv, 0);
  // char polys on the grid
  std::vector<std::vector<QPoly>> grid(DQ + 1, std::vector<QPoly>(DV + 1));
  parallel_for(
      std::size_t(DQ + 1) * (DV + 1),
      [&](std::size_t idx) {
        int a = static_cast<int>(idx) / (DV + 1), b = static_cast<int>(idx) % (DV + 1);
        grid[a][b] = charpoly_exact(m.eval(make_rat(a), make_rat(b)), 1);
      },
      threads);
  // interpolate each x-coefficient: first in v per Q node, then in Q
  std::vector<BivarPoly> out(n + 1);
  for (int ci = 0; ci <= n; ++ci) {
    std::vector<QPoly> per_q(DQ + 1);  // polynomial in v at each Q node
    std::vector<Rat> vxs(DV + 1), vys(DV + 1);
    for (int a = 0; a <= DQ; ++a) {
      for (int b = 0; b <= DV; ++b) {
        vxs[b] = make_rat(b);
        vys[b] = grid[a][b].coeff(ci);
      }
      per_q[a] = interpolate_newton(vxs, vys);
    }
    std::vector<Rat> qxs(DQ + 1);
    for (int a = 0; a <= DQ; ++a) qxs[a] = make_rat(a);
    BivarPoly acc;
    for (int b = 0; b <= DV; ++b) {
      std::vector<Rat> ys(DQ + 1);
      for (int a = 0; a <= DQ; ++a) ys[a] = per_q[a].coeff(b);
      QPoly in_q = interpolate_newton(qxs, ys);
      for (int a = 0; a <= in_q.degree(); ++a) acc.add_term(a, b, in_q.coeff(a));
    }
    out[ci] = acc;
  }
  return out;
}

inline QPoly interpolate_newton(const std::vector<Rat>& xs, const std::vector<Rat>& ys) {
  const int n = static_cast<int>(xs.size());
  std::vector<Rat> dd = ys;  // divided differences, built in place
  for (int j = 1; j < n; ++j)
    for (int i = n - 1; i >= j; --i) dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
  QPoly p;
  for (int i = n - 1; i >= 0; --i) {
    // p = p * (x - xs[i]) + dd[i]
    QPoly lin{std::vector<Rat>{-xs[i], Rat(1)}};
    p = p * lin + QPoly::constant(dd[i]);
  }
  return p;
}

/// Full sector/irrep decomposition with trivial eigenvalues extracted. For
/// the Petersen family also verifies the l=k collapse (the nontrivial parts
/// of all lambda |- k blocks carry the same 2k+1 eigenvalues, dim-lambda
/// times) and computes beta_k, gamma_{k+1}.
inline TransferDecomposition block_decompose(const std::string& family, int k,
                                             const DecomposeOptions& opts = {}) {
  TransferDecomposition deco;
  deco.family = family;
  deco.k = k;
  if (family == "petersen") {
    deco.width = k + 1;
    deco.factors = petersen_factors(k);
  } else if (family == "slab") {
    deco.width = k * k;
    deco.factors = slab_factors(k);
  } else {
    throw invalid_input_error("unknown family: " + family);
  }
  deco.trivial_exponent = trivial_exponent_of(deco.factors);

  for (int ell = 0; ell <= deco.width; ++ell) {
    StateSpace sp = StateSpace::make(deco.width, ell, /*ordered=*/true);
    for (auto& lam : partitions_of(ell)) {
      TransferBlock b;
      b.ell = ell;
      b.lambda = lam;
      if (!opts.cache_dir.empty() &&
          transfer_detail::load_block_cache(opts.cache_dir, family, k, &b)) {
        deco.blocks.push_back(std::move(b));
        continue;
      }
      SymmetrizedBasis sb = symmetrized_basis(deco.width, ell, lam);
      b.matrix = transfer_detail::build_block_symbolic(sp, deco.factors, sb, opts.threads);
      bool reconstruct = opts.exact_trivial && b.dim() <= opts.exact_trivial_max_dim;
      extract_trivial(&b, deco.trivial_exponent, reconstruct, opts.threads);
      if (!opts.cache_dir.empty())
        transfer_detail::save_block_cache(opts.cache_dir, family, k, b);
      deco.blocks.push_back(std::move(b));
    }
  }

  if (family == "petersen") {
    const TransferBlock& sym_k = deco.reduced_source();
    if (sym_k.nontrivial_dim() != 2 * k + 1)
      throw numeric_error("l=k symmetric block has nontrivial dimension " +
                          std::to_string(sym_k.nontrivial_dim()) + ", expected " +
                          std::to_string(2 * k + 1));
    if (opts.verify_collapse) {
      // claim: char(full_lambda) (x-mu)^{dl*Dsym - Dlam} == char(full_sym)^{dl}
      deco.collapse_at_points = true;
      for (auto& lam : partitions_of(k)) {
        const TransferBlock& b = deco.block(k, lam);
        long dl = irrep_dimension(lam).get_si();
        if (b.nontrivial_dim() != (2 * k + 1) * dl)
          throw numeric_error("l=k block " + lam.to_string() + " has unexpected nt dimension");
        for (auto& pt : transfer_detail::probe_points()) {
          QPoly lhs = nontrivial_charpoly_at(b, pt.q, pt.v, deco.trivial_exponent, opts.threads);
          QPoly rhs = nontrivial_charpoly_at(sym_k, pt.q, pt.v, deco.trivial_exponent,
                                             opts.threads)
                          .pow(static_cast<unsigned long>(dl));
          if (!(lhs == rhs))
            throw numeric_error("l=k collapse failed at a probe point for lambda=" +
                                lam.to_string());
        }
      }
      // symbolic proof via interpolated char polys when the family is small
      bool provable = true;
      for (auto& lam : partitions_of(k))
        if (deco.block(k, lam).dim() > 24) provable = false;
      if (provable) {
        std::vector<BivarPoly> chi_sym = charpoly_bivar(sym_k.matrix, opts.threads);
        DensePoly<BivarPoly> chi_sym_poly{std::vector<BivarPoly>(chi_sym)};
        int dsym = sym_k.trivial_mult;
        deco.collapse_verified = true;
        for (auto& lam : partitions_of(k)) {
          const TransferBlock& b = deco.block(k, lam);
          long dl = irrep_dimension(lam).get_si();
          if (dl == 1 && lam == sym_k.lambda) continue;
          std::vector<BivarPoly> chi_b = charpoly_bivar(b.matrix, opts.threads);
          DensePoly<BivarPoly> lhs{std::vector<BivarPoly>(chi_b)};
          int extra = static_cast<int>(dl) * dsym - b.trivial_mult;
          if (extra < 0) throw numeric_error("inconsistent trivial multiplicities in l=k family");
          DensePoly<BivarPoly> shift =
              DensePoly<BivarPoly>{std::vector<BivarPoly>{-BivarPoly::v(deco.trivial_exponent),
                                                          BivarPoly(1)}}
                  .pow(extra);
          DensePoly<BivarPoly> rhs = chi_sym_poly.pow(static_cast<unsigned long>(dl));
          if (!(lhs * shift == rhs)) {
            deco.collapse_verified = false;
            break;
          }
        }
      }
    }
    deco.beta_k = beta_poly(k);
    QPoly gamma = beta_poly(k + 1);
    for (auto& b : deco.blocks) {
      if (b.ell < 1 || b.ell > k) continue;
      if (b.trivial_mult > 0) gamma += amplitude(b.ell, b.lambda) * Rat(b.trivial_mult);
    }
    deco.gamma_kp1 = gamma;
  }
  return deco;
}

// ---------------------------------------------------------------------------
// Partition function assembly
// ---------------------------------------------------------------------------

/// Generic path: Z = sum_{l,lambda} alpha_{l,lambda} tr(T_{l,lambda}^n).
inline BivarPoly assemble_Z_generic(const TransferDecomposition& deco, int n, int threads = 0) {
  if (n < 1) throw invalid_input_error("assemble_Z requires n >= 1");
  BivarPoly z;
  for (auto& b : deco.blocks) {
    if (b.dim() == 0) continue;
    BivarPoly tr = trace_of_power(b.matrix, n, 80'000'000, threads);
    z += qpoly_to_bivar_Q(amplitude(b.ell, b.lambda)) * tr;
  }
  return z;
}

/// Reduced Petersen path:
/// Z = sum_{l<k,lambda} alpha tr(nt^n) + beta_k tr(reduced^n) + gamma v^{2nk}.
inline BivarPoly assemble_Z_reduced(const TransferDecomposition& deco, int n, int threads = 0) {
  if (deco.family != "petersen")
    throw invalid_input_error("reduced assembly applies to the Petersen family");
  if (n < 1) throw invalid_input_error("assemble_Z requires n >= 1");
  BivarPoly z;
  for (auto& b : deco.blocks) {
    if (b.ell >= deco.k || b.dim() == 0) continue;
    z += qpoly_to_bivar_Q(amplitude(b.ell, b.lambda)) *
         nontrivial_trace_power(b, n, deco.trivial_exponent, threads);
  }
  z += qpoly_to_bivar_Q(deco.beta_k) *
       nontrivial_trace_power(deco.reduced_source(), n, deco.trivial_exponent, threads);
  z += qpoly_to_bivar_Q(deco.gamma_kp1) * BivarPoly::v(deco.trivial_exponent * n);
  return z;
}

// ---------------------------------------------------------------------------
// Distinct-eigenvalue census with exact certificates
// ---------------------------------------------------------------------------

struct CountCertificate {
  int distinct_count = 0;
  bool certified = false;
  std::vector<std::string> notes;
};

/// Counts the distinct eigenvalues of the complete decomposition and
/// certifies distinctness: per-block squarefreeness and pairwise
/// coprimality of nontrivial characteristic polynomials, established
/// exactly at rational probe points (a symbolic coincidence of monic char
/// polys survives every specialization, so a clean point certifies).
inline CountCertificate certify_distinct_count(const TransferDecomposition& deco,
                                               int threads = 0) {
  if (deco.family != "petersen")
    throw invalid_input_error("distinct-count census is defined for the Petersen family");
  CountCertificate cert;
  cert.certified = true;
  const int k = deco.k;

  std::vector<std::pair<std::string, const TransferBlock*>> parts;
  for (auto& b : deco.blocks) {
    if (b.ell >= k || b.nontrivial_dim() == 0) continue;
    parts.push_back({"l=" + std::to_string(b.ell) + " " + b.lambda.to_string(), &b});
  }
  parts.push_back({"l=k reduced", &deco.reduced_source()});

  int count = 1;  // the trivial eigenvalue itself
  for (auto& [name, b] : parts)
    count += (b->ell == k ? deco.reduced_dim() : b->nontrivial_dim());
  cert.distinct_count = count;

  for (auto& [name, b] : parts)
    if (!b->trivial_exact) {
      cert.certified = false;
      cert.notes.push_back("trivial multiplicity of " + name + " not symbolically certified");
    }
  if (!deco.collapse_verified) {
    cert.notes.push_back("l=k collapse verified at probe points" +
                         std::string(deco.collapse_at_points ? "" : " (missing)"));
    if (!deco.collapse_at_points) cert.certified = false;
  }

  auto points = transfer_detail::probe_points();
  std::vector<std::vector<QPoly>> chars(points.size(), std::vector<QPoly>(parts.size()));
  for (std::size_t pi = 0; pi < points.size(); ++pi)
    for (std::size_t mi = 0; mi < parts.size(); ++mi) {
      const TransferBlock* b = parts[mi].second;
      chars[pi][mi] = nontrivial_charpoly_at(*b, points[pi].q, points[pi].v,
                                             deco.trivial_exponent, threads);
    }

  auto certify_one = [&](const std::function<bool(std::size_t)>& test, const std::string& what) {
    for (std::size_t pi = 0; pi < points.size(); ++pi)
      if (test(pi)) return;
    cert.certified = false;
    cert.notes.push_back("could not certify " + what);
  };

  for (std::size_t mi = 0; mi < parts.size(); ++mi) {
    certify_one([&](std::size_t pi) { return certify_squarefree_mod(chars[pi][mi]); },
                "squarefreeness of " + parts[mi].first);
    certify_one(
        [&](std::size_t pi) {
          Rat mv = rat_pow(points[pi].v, deco.trivial_exponent);
          return chars[pi][mi].eval(mv) != 0;
        },
        "trivial-freeness of " + parts[mi].first);
    for (std::size_t mj = mi + 1; mj < parts.size(); ++mj)
      certify_one(
          [&](std::size_t pi) { return certify_coprime_mod(chars[pi][mi], chars[pi][mj]); },
          "coprimality of " + parts[mi].first + " vs " + parts[mj].first);
  }
  return cert;
}

}  // namespace potts
