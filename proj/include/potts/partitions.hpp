#pragma once

#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "potts/qlinalg.hpp"
#include "potts/rational.hpp"

namespace potts {

// ---------------------------------------------------------------------------
// SetPartition: partitions of the boundary points {0..k, 0'..k'}
// ---------------------------------------------------------------------------

/// Canonical partition of 2W points: top row 0..W-1, bottom row W..2W-1
/// (bottom point i' is stored as W+i). Blocks are sorted by least element,
/// elements sorted within blocks.
struct SetPartition {
  int width = 0;  // W = points per row
  std::vector<std::vector<int>> blocks;

  int link_count() const {
    int l = 0;
    for (auto& b : blocks) {
      bool top = false, bottom = false;
      for (int x : b) (x < width ? top : bottom) = true;
      l += (top && bottom);
    }
    return l;
  }

  /// Partition induced on the bottom row (as indices 0..W-1).
  std::vector<std::vector<int>> bottom_restriction() const {
    std::vector<std::vector<int>> r;
    for (auto& b : blocks) {
      std::vector<int> part;
      for (int x : b)
        if (x >= width) part.push_back(x - width);
      if (!part.empty()) r.push_back(std::move(part));
    }
    std::sort(r.begin(), r.end());
    return r;
  }

  bool operator==(const SetPartition& o) const {
    return width == o.width && blocks == o.blocks;
  }
  bool operator<(const SetPartition& o) const { return blocks < o.blocks; }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      s += i ? ",{" : "{";
      for (std::size_t j = 0; j < blocks[i].size(); ++j) {
        if (j) s += ",";
        int x = blocks[i][j];
        s += x < width ? std::to_string(x) : std::to_string(x - width) + "'";
      }
      s += "}";
    }
    return s + "}";
  }
};

/// Canonical representative of a raw block list over 2W points.
inline SetPartition canonicalize(int width, std::vector<std::vector<int>> raw) {
  std::vector<char> seen(2 * width, 0);
  for (auto& b : raw) {
    if (b.empty()) throw invalid_input_error("empty block");
    for (int x : b) {
      if (x < 0 || x >= 2 * width) throw invalid_input_error("point out of range");
      if (seen[x]) throw invalid_input_error("duplicated point in partition");
      seen[x] = 1;
    }
    std::sort(b.begin(), b.end());
  }
  for (int x = 0; x < 2 * width; ++x)
    if (!seen[x]) throw invalid_input_error("partition does not cover the point set");
  std::sort(raw.begin(), raw.end());
  SetPartition p;
  p.width = width;
  p.blocks = std::move(raw);
  return p;
}

/// Merge the blocks containing points i and j (no-op if already together).
inline SetPartition join(const SetPartition& p, int i, int j) {
  if (i < 0 || j < 0 || i >= 2 * p.width || j >= 2 * p.width)
    throw invalid_input_error("join: point out of range");
  auto blocks = p.blocks;
  int bi = -1, bj = -1;
  for (std::size_t t = 0; t < blocks.size(); ++t)
    for (int x : blocks[t]) {
      if (x == i) bi = static_cast<int>(t);
      if (x == j) bj = static_cast<int>(t);
    }
  if (bi != bj) {
    blocks[bi].insert(blocks[bi].end(), blocks[bj].begin(), blocks[bj].end());
    blocks.erase(blocks.begin() + bj);
  }
  return canonicalize(p.width, std::move(blocks));
}

/// Remove point i into a singleton. factor_Q is set when i already was a
/// singleton (the detach then contributes a factor Q).
inline SetPartition detach(const SetPartition& p, int i, bool* factor_Q) {
  if (i < 0 || i >= 2 * p.width) throw invalid_input_error("detach: point out of range");
  auto blocks = p.blocks;
  for (auto& b : blocks) {
    auto it = std::find(b.begin(), b.end(), i);
    if (it == b.end()) continue;
    if (b.size() == 1) {
      if (factor_Q) *factor_Q = true;
      return p;
    }
    b.erase(it);
    blocks.push_back({i});
    if (factor_Q) *factor_Q = false;
    return canonicalize(p.width, std::move(blocks));
  }
  throw invalid_input_error("detach: point not found");
}

// ---------------------------------------------------------------------------
// MarkedState: the in-sector state space (fixed bottom pattern, fixed links)
// ---------------------------------------------------------------------------

/// In the standard bottom pattern (all bottom points singletons, points
/// 0'..(l-1)' carrying the links), a state with exactly l links is a set
/// partition of the top points with l of its blocks marked: mark m sits on
/// the block linked to bottom point m'. Marks are "ordered" (vector indexed
/// by mark) or "unordered" (sorted list), the latter being the fully
/// symmetric sector.
struct MarkedState {
  std::vector<int> rgs;         // restricted growth string over top points
  std::vector<int> mark_block;  // ordered: mark m -> block id; unordered: sorted block ids

  int block_count() const {
    int b = 0;
    for (int x : rgs) b = std::max(b, x + 1);
    return b;
  }

  struct Key {
    std::uint64_t a = 0, b = 0;
    bool operator<(const Key& o) const { return a != o.a ? a < o.a : b < o.b; }
    bool operator==(const Key& o) const { return a == o.a && b == o.b; }
  };
  Key key() const {
    // injective within a fixed (width, link count) space; nibble packing
    // preserves lexicographic order
    Key k;
    for (int x : rgs) k.a = (k.a << 4) | std::uint64_t(x);
    for (int x : mark_block) k.b = (k.b << 4) | std::uint64_t(x + 1);
    return k;
  }
};

namespace partitions_detail {

/// Remap block labels to first-occurrence order; marks follow.
inline void canonical_relabel(std::vector<int>* rgs, std::vector<int>* marks) {
  std::vector<int> map(rgs->size(), -1);
  int next = 0;
  for (int& x : *rgs) {
    if (map[x] < 0) map[x] = next++;
    x = map[x];
  }
  for (int& m : *marks)
    if (m >= 0) m = map[m];
}

inline void enumerate_rgs(int W, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> rgs(W, 0);
  std::function<void(int, int)> rec = [&](int pos, int maxb) {
    if (pos == W) {
      fn(rgs);
      return;
    }
    for (int b = 0; b <= maxb; ++b) {
      rgs[pos] = b;
      rec(pos + 1, std::max(maxb, b + 1));
    }
  };
  rec(0, 0);
}

}  // namespace partitions_detail

/// The ordered-mark state list for (W top points, l links), RGS-lex then
/// mark-lex order. With l = 0 this is the plain partition list.
inline std::vector<MarkedState> enumerate_marked_states(int W, int l, bool ordered_marks) {
  std::vector<MarkedState> out;
  partitions_detail::enumerate_rgs(W, [&](const std::vector<int>& rgs) {
    int b = 0;
    for (int x : rgs) b = std::max(b, x + 1);
    if (l > b) return;
    std::vector<int> sel(l);
    if (ordered_marks) {
      // injective tuples (mark -> block), lex order
      std::function<void(int, int)> rec = [&](int m, int used_mask) {
        if (m == l) {
          out.push_back({rgs, sel});
          return;
        }
        for (int blk = 0; blk < b; ++blk) {
          if (used_mask >> blk & 1) continue;
          sel[m] = blk;
          rec(m + 1, used_mask | (1 << blk));
        }
      };
      rec(0, 0);
    } else {
      // increasing block-id subsets
      std::function<void(int, int)> rec = [&](int m, int from) {
        if (m == l) {
          out.push_back({rgs, sel});
          return;
        }
        for (int blk = from; blk < b; ++blk) {
          sel[m] = blk;
          rec(m + 1, blk + 1);
        }
      };
      rec(0, 0);
    }
  });
  return out;
}

/// Marked state -> full SetPartition with the standard bottom pattern.
inline SetPartition marked_to_partition(const MarkedState& s, int W) {
  std::vector<std::vector<int>> blocks(s.block_count());
  for (int i = 0; i < W; ++i) blocks[s.rgs[i]].push_back(i);
  for (std::size_t m = 0; m < s.mark_block.size(); ++m)
    blocks[s.mark_block[m]].push_back(W + static_cast<int>(m));
  for (int i = static_cast<int>(s.mark_block.size()); i < W; ++i) blocks.push_back({W + i});
  return canonicalize(W, std::move(blocks));
}

// ---------------------------------------------------------------------------
// Bottom patterns and general state enumeration
// ---------------------------------------------------------------------------

/// A bottom-row state: partition of the bottom points plus, per group, the
/// flag that the group belongs to a link. The number of attached groups is
/// the link count of any compatible state.
struct BottomPattern {
  std::vector<std::vector<int>> groups;  // partition of 0..W-1, canonical order
  std::vector<bool> attached;            // parallel to groups

  static BottomPattern standard(int W, int l) {
    if (l > W) throw invalid_input_error("link count exceeds width");
    BottomPattern b;
    for (int i = 0; i < W; ++i) {
      b.groups.push_back({i});
      b.attached.push_back(i < l);
    }
    return b;
  }
  int attached_count() const {
    int c = 0;
    for (bool a : attached) c += a;
    return c;
  }
};

/// All states (full partitions of 2W points) whose bottom restriction equals
/// the pattern and whose links sit exactly on the attached groups.
/// Deterministic order: top-partition RGS lex, then assignment lex.
inline std::vector<SetPartition> enumerate_states(int W, const BottomPattern& bottom, int l) {
  if (bottom.attached_count() != l)
    throw invalid_input_error("bottom pattern incompatible with requested link count");
  std::vector<char> seen(W, 0);
  for (auto& g : bottom.groups)
    for (int x : g) {
      if (x < 0 || x >= W || seen[x]) throw invalid_input_error("bad bottom pattern");
      seen[x] = 1;
    }
  for (int i = 0; i < W; ++i)
    if (!seen[i]) throw invalid_input_error("bottom pattern does not cover the bottom row");

  std::vector<int> attached_ids;
  for (std::size_t i = 0; i < bottom.groups.size(); ++i)
    if (bottom.attached[i]) attached_ids.push_back(static_cast<int>(i));

  std::vector<SetPartition> out;
  partitions_detail::enumerate_rgs(W, [&](const std::vector<int>& rgs) {
    int b = 0;
    for (int x : rgs) b = std::max(b, x + 1);
    if (l > b) return;
    std::vector<int> sel(l);
    std::function<void(int, int)> rec = [&](int m, int used_mask) {
      if (m == l) {
        std::vector<std::vector<int>> blocks(b);
        for (int i = 0; i < W; ++i) blocks[rgs[i]].push_back(i);
        for (int g = 0; g < static_cast<int>(bottom.groups.size()); ++g) {
          bool att = bottom.attached[g];
          if (att) continue;
          std::vector<int> blk;
          for (int x : bottom.groups[g]) blk.push_back(W + x);
          blocks.push_back(std::move(blk));
        }
        for (int m2 = 0; m2 < l; ++m2)
          for (int x : bottom.groups[attached_ids[m2]]) blocks[sel[m2]].push_back(W + x);
        out.push_back(canonicalize(W, std::move(blocks)));
        return;
      }
      for (int blk = 0; blk < b; ++blk) {
        if (used_mask >> blk & 1) continue;
        sel[m] = blk;
        rec(m + 1, used_mask | (1 << blk));
      }
    };
    rec(0, 0);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Young diagrams, S_l combinatorics
// ---------------------------------------------------------------------------

struct YoungDiagram {
  std::vector<int> rows;  // weakly decreasing positive parts

  YoungDiagram() = default;
  explicit YoungDiagram(std::vector<int> r) : rows(std::move(r)) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] < 1) throw invalid_input_error("Young diagram parts must be positive");
      if (i && rows[i] > rows[i - 1])
        throw invalid_input_error("Young diagram parts must be weakly decreasing");
    }
  }

  int size() const {
    int s = 0;
    for (int r : rows) s += r;
    return s;
  }
  int row_count() const { return static_cast<int>(rows.size()); }

  YoungDiagram conjugate() const {
    if (rows.empty()) return {};
    std::vector<int> c(rows[0], 0);
    for (int r : rows)
      for (int j = 0; j < r; ++j) c[j]++;
    return YoungDiagram(std::move(c));
  }

  bool operator==(const YoungDiagram& o) const { return rows == o.rows; }
  bool operator<(const YoungDiagram& o) const { return rows < o.rows; }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < rows.size(); ++i) s += (i ? "," : "") + std::to_string(rows[i]);
    return s + ")";
  }
  /// Compact label for filenames: "3-1-1".
  std::string label() const {
    if (rows.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < rows.size(); ++i) s += (i ? "-" : "") + std::to_string(rows[i]);
    return s;
  }
};

/// All partitions of l in reverse-lex order: (l), (l-1,1), ..., (1^l).
inline std::vector<YoungDiagram> partitions_of(int l) {
  std::vector<YoungDiagram> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int rem, int maxpart) {
    if (rem == 0) {
      out.push_back(YoungDiagram(cur));
      return;
    }
    for (int p = std::min(rem, maxpart); p >= 1; --p) {
      cur.push_back(p);
      rec(rem - p, p);
      cur.pop_back();
    }
  };
  rec(l, l);
  return out;
}

/// Number of standard Young tableaux via the hook length formula.
inline Int irrep_dimension(const YoungDiagram& d) {
  int l = d.size();
  if (l == 0) return 1;
  YoungDiagram c = d.conjugate();
  Int hooks = 1;
  for (int i = 0; i < d.row_count(); ++i)
    for (int j = 0; j < d.rows[i]; ++j)
      hooks *= (d.rows[i] - j) + (c.rows[j] - i) - 1;
  Int f = factorial(l);
  Int dim = f / hooks;
  return dim;
}

/// Direct enumeration of standard tableaux (cross-check for the hook rule).
inline long count_standard_tableaux(const YoungDiagram& d) {
  int l = d.size();
  std::vector<int> fill(d.row_count(), 0);  // cells filled per row
  long count = 0;
  std::function<void(int)> rec = [&](int t) {
    if (t == l) {
      ++count;
      return;
    }
    for (int r = 0; r < d.row_count(); ++r) {
      if (fill[r] >= d.rows[r]) continue;
      if (r > 0 && fill[r - 1] <= fill[r]) continue;  // column must grow downward
      fill[r]++;
      rec(t + 1);
      fill[r]--;
    }
  };
  rec(0);
  return count;
}

inline std::vector<std::vector<int>> all_permutations(int l) {
  std::vector<int> p(l);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline std::vector<int> cycle_type(const std::vector<int>& perm) {
  std::vector<char> seen(perm.size(), 0);
  std::vector<int> cycles;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    std::size_t j = i;
    while (!seen[j]) {
      seen[j] = 1;
      j = perm[j];
      ++len;
    }
    cycles.push_back(len);
  }
  std::sort(cycles.rbegin(), cycles.rend());
  return cycles;
}

inline int perm_sign(const std::vector<int>& perm) {
  int s = 1;
  for (int c : cycle_type(perm))
    if (c % 2 == 0) s = -s;
  return s;
}

/// Murnaghan-Nakayama character chi_lambda(cycle type mu), beta-number form.
inline Int mn_character(const YoungDiagram& lambda, std::vector<int> mu) {
  std::sort(mu.rbegin(), mu.rend());
  int R = std::max<int>(lambda.row_count(), 1);
  std::vector<int> beta;
  for (int i = 0; i < R; ++i)
    beta.push_back((i < lambda.row_count() ? lambda.rows[i] : 0) + (R - 1 - i));
  std::sort(beta.rbegin(), beta.rend());
  std::function<Int(std::vector<int>, std::size_t)> rec = [&](std::vector<int> b,
                                                              std::size_t mi) -> Int {
    if (mi == mu.size()) return 1;  // beta is then necessarily the staircase
    int t = mu[mi];
    Int total = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      int nb = b[i] - t;
      if (nb < 0) continue;
      if (std::find(b.begin(), b.end(), nb) != b.end()) continue;
      int crossings = 0;
      for (int x : b)
        if (x < b[i] && x > nb) ++crossings;
      std::vector<int> b2 = b;
      b2[i] = nb;
      std::sort(b2.rbegin(), b2.rend());
      Int sub = rec(std::move(b2), mi + 1);
      total += (crossings % 2 ? -sub : sub);
    }
    return total;
  };
  return rec(beta, 0);
}

// ---------------------------------------------------------------------------
// Group algebra elements and the symmetrized basis
// ---------------------------------------------------------------------------

/// Element of Q[S_l] as a coefficient map keyed by permutation.
using GroupAlgebra = std::map<std::vector<int>, Rat>;

inline GroupAlgebra ga_convolve(const GroupAlgebra& x, const GroupAlgebra& y) {
  GroupAlgebra r;
  for (auto& [p, cp] : x)
    for (auto& [q, cq] : y) {
      std::vector<int> pq(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) pq[i] = p[q[i]];  // p after q
      Rat c = cp * cq;
      auto [it, fresh] = r.try_emplace(std::move(pq), c);
      if (!fresh) {
        it->second += c;
        if (it->second == 0) r.erase(it);
      }
    }
  return r;
}

/// Isotypic (character) projector for lambda in Q[S_l].
inline GroupAlgebra isotypic_projector(const YoungDiagram& lambda) {
  int l = lambda.size();
  Rat scale = Rat(irrep_dimension(lambda)) / Rat(factorial(l));
  GroupAlgebra e;
  for (auto& g : all_permutations(l)) {
    Int chi = mn_character(lambda, cycle_type(g));  // classes are self-inverse in S_l
    if (chi != 0) e[g] = scale * Rat(chi);
  }
  return e;
}

namespace partitions_detail {

inline void enumerate_subgroup_products(const std::vector<std::vector<int>>& sets, int l,
                                        std::vector<std::vector<int>>* out) {
  std::vector<int> base(l);
  std::iota(base.begin(), base.end(), 0);
  out->push_back(base);
  for (auto& s : sets) {
    std::vector<std::vector<int>> next;
    std::vector<int> idx = s;
    std::sort(idx.begin(), idx.end());
    std::vector<int> perm = idx;
    do {
      for (auto& partial : *out) {
        std::vector<int> g = partial;
        for (std::size_t i = 0; i < idx.size(); ++i) g[idx[i]] = partial[perm[i]];
        next.push_back(std::move(g));
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    *out = std::move(next);
  }
}

}  // namespace partitions_detail

/// Primitive idempotent affording lambda, built from the Young symmetrizer
/// of the row-major standard tableau and verified against the isotypic
/// projector (e * P_lambda == e). The verification also pins down the
/// row/column convention at runtime.
inline GroupAlgebra young_idempotent(const YoungDiagram& lambda) {
  int l = lambda.size();
  if (l == 0) return {};
  std::vector<std::vector<int>> rows, cols;
  {
    int off = 0;
    std::vector<std::vector<int>> tableau;
    for (int r : lambda.rows) {
      std::vector<int> row(r);
      std::iota(row.begin(), row.end(), off);
      off += r;
      tableau.push_back(row);
      if (r > 1) rows.push_back(row);
    }
    for (int c = 0; c < lambda.rows[0]; ++c) {
      std::vector<int> col;
      for (auto& row : tableau)
        if (c < static_cast<int>(row.size())) col.push_back(row[c]);
      if (col.size() > 1) cols.push_back(col);
    }
  }
  std::vector<std::vector<int>> R, C;
  partitions_detail::enumerate_subgroup_products(rows, l, &R);
  partitions_detail::enumerate_subgroup_products(cols, l, &C);
  Rat scale = Rat(irrep_dimension(lambda)) / Rat(factorial(l));

  auto build = [&](bool rows_first) {
    GroupAlgebra e;
    for (auto& p : R)
      for (auto& q : C) {
        std::vector<int> g(l);
        for (int i = 0; i < l; ++i) g[i] = rows_first ? p[q[i]] : q[p[i]];
        Rat c = scale * Rat(perm_sign(q));
        auto [it, fresh] = e.try_emplace(std::move(g), c);
        if (!fresh) {
          it->second += c;
          if (it->second == 0) e.erase(it);
        }
      }
    return e;
  };

  GroupAlgebra p_lambda = isotypic_projector(lambda);
  for (bool rows_first : {true, false}) {
    GroupAlgebra e = build(rows_first);
    if (ga_convolve(e, p_lambda) == e && ga_convolve(e, e) == e) return e;
  }
  throw numeric_error("Young idempotent failed its isotypic membership check for " +
                      lambda.to_string());
}

/// Action of sigma on an ordered-mark state: mark sigma(m) of the image goes
/// where mark m was.
inline MarkedState act_on_marks(const std::vector<int>& sigma, const MarkedState& s) {
  MarkedState t = s;
  for (std::size_t m = 0; m < sigma.size(); ++m) t.mark_block[sigma[m]] = s.mark_block[m];
  return t;
}

/// Matrix of a group-algebra element acting on an ordered-mark state list.
inline QMatrix group_algebra_matrix(const GroupAlgebra& e, const std::vector<MarkedState>& states,
                                    const std::map<MarkedState::Key, int>& index) {
  int n = static_cast<int>(states.size());
  QMatrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (auto& [g, c] : e) {
      MarkedState t = act_on_marks(g, states[j]);
      m.at(index.at(t.key()), j) += c;
    }
  return m;
}

/// Exact single-copy symmetrized basis for (W, l, lambda): columns span the
/// image of the primitive Young idempotent on the l-link ordered-mark space.
/// The transfer matrix restricted to this span carries each eigenvalue of
/// the (l, lambda) block exactly once.
struct SymmetrizedBasis {
  int W = 0, ell = 0;
  YoungDiagram lambda;
  std::vector<MarkedState> states;  // ordered-mark state list (ambient space)
  QMatrix basis;                    // states.size() x m, reduced column echelon
  std::vector<int> pivot_rows;      // basis[pivot_rows] = identity

  int dim() const { return basis.cols(); }
};

inline SymmetrizedBasis symmetrized_basis(int W, int l, const YoungDiagram& lambda) {
  if (lambda.size() != l) throw invalid_input_error("diagram size must equal link count");
  if (l < 0 || l > W) throw invalid_input_error("link count out of range");
  SymmetrizedBasis sb;
  sb.W = W;
  sb.ell = l;
  sb.lambda = lambda;
  sb.states = enumerate_marked_states(W, l, /*ordered=*/true);
  int n = static_cast<int>(sb.states.size());
  if (l <= 1) {
    sb.basis = QMatrix::identity(n);
    sb.pivot_rows.resize(n);
    std::iota(sb.pivot_rows.begin(), sb.pivot_rows.end(), 0);
    return sb;
  }
  std::map<MarkedState::Key, int> index;
  for (int i = 0; i < n; ++i) index[sb.states[i].key()] = i;
  QMatrix e = group_algebra_matrix(young_idempotent(lambda), sb.states, index);
  column_space_basis(e, &sb.basis, &sb.pivot_rows);
  return sb;
}

}  // namespace potts
