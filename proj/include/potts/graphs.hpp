#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "potts/bivar_poly.hpp"
#include "potts/common.hpp"

namespace potts {

/// Undirected multigraph with a deterministic edge list. Multi-edges are
/// stored explicitly so the m = 2k Petersen cases need no special-casing.
/// Loops are rejected except where a degenerate periodic wrap (length-1
/// cycle) genuinely produces them; FK weighting handles a loop as a (1+v)
/// factor.
struct Graph {
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;

  Graph() = default;
  Graph(int n, std::vector<std::pair<int, int>> e, bool allow_loops = false)
      : vertex_count(n), edges(std::move(e)) {
    for (auto& [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n)
        throw invalid_input_error("edge endpoint out of range");
      if (u == v && !allow_loops) throw invalid_input_error("loops are not permitted");
      if (u > v) std::swap(u, v);
    }
  }

  int edge_count() const { return static_cast<int>(edges.size()); }

  std::vector<int> degrees() const {
    std::vector<int> d(vertex_count, 0);
    for (auto& [u, v] : edges) {
      d[u]++;
      d[v]++;
    }
    return d;
  }

  void write_edge_list(std::ostream& os) const {
    os << vertex_count << " " << edges.size() << "\n";
    for (auto& [u, v] : edges) os << u << " " << v << "\n";
  }
  static Graph read_edge_list(std::istream& is) {
    int n = -1, m = -1;
    if (!(is >> n >> m) || n < 0 || m < 0) throw invalid_input_error("bad edge list header");
    std::vector<std::pair<int, int>> e(m);
    for (auto& [u, v] : e)
      if (!(is >> u >> v)) throw invalid_input_error("truncated edge list");
    return Graph(n, std::move(e));
  }
};

struct PetersenParams {
  int m = 0, k = 0;
  PetersenParams(int m_, int k_) : m(m_), k(k_) {
    if (k < 1 || m <= k) throw invalid_input_error("generalized Petersen requires m > k >= 1");
  }
};

struct SlabParams {
  int L = 0, n = 0;
  SlabParams(int L_, int n_) : L(L_), n(n_) {
    if (L < 1 || n < 1) throw invalid_input_error("slab requires L >= 1, n >= 1");
  }
};

/// G(m,k): outer vertices 0..m-1, inner vertices m..2m-1.
/// Edges in deterministic order: spokes, outer cycle, inner step-k chords.
inline Graph build_petersen(const PetersenParams& p) {
  std::vector<std::pair<int, int>> e;
  e.reserve(3 * p.m);
  for (int i = 0; i < p.m; ++i) e.emplace_back(i, p.m + i);
  for (int i = 0; i < p.m; ++i) e.emplace_back(i, (i + 1) % p.m);
  for (int i = 0; i < p.m; ++i) e.emplace_back(p.m + i, p.m + (i + p.k) % p.m);
  return Graph(2 * p.m, std::move(e));
}

/// Layered form of a recursive graph: n identical layers, edges within a
/// layer and between consecutive layers (periodic wrap optional).
struct LayeredGraph {
  int layer_width = 0;
  int n_layers = 0;
  std::vector<std::pair<int, int>> intra_layer_edges;
  std::vector<std::pair<int, int>> inter_layer_edges;  // (local in layer q, local in q+1)
  bool periodic_longitudinal = true;

  Graph flatten() const {
    std::vector<std::pair<int, int>> e;
    bool loops_possible = periodic_longitudinal && n_layers == 1;
    for (int q = 0; q < n_layers; ++q) {
      int base = q * layer_width;
      for (auto& [a, b] : intra_layer_edges) e.emplace_back(base + a, base + b);
      int next = (q + 1) % n_layers;
      if (q + 1 == n_layers && !periodic_longitudinal) continue;
      int nbase = next * layer_width;
      for (auto& [a, b] : inter_layer_edges) e.emplace_back(base + a, nbase + b);
    }
    return Graph(layer_width * n_layers, std::move(e), loops_possible);
  }
};

/// G(nk,k) redrawn as n layers of 2k vertices. Locals 0..k-1 are the outer
/// ring vertices of the layer, k..2k-1 the inner ones.
inline LayeredGraph build_petersen_layered(int n, int k) {
  if (n < 2 || k < 1) throw invalid_input_error("layered Petersen requires n >= 2, k >= 1");
  LayeredGraph g;
  g.layer_width = 2 * k;
  g.n_layers = n;
  for (int i = 0; i < k; ++i) g.intra_layer_edges.emplace_back(i, k + i);         // spokes
  for (int i = 0; i + 1 < k; ++i) g.intra_layer_edges.emplace_back(i, i + 1);    // outer run
  g.inter_layer_edges.emplace_back(k - 1, 0);                                    // outer wrap
  for (int i = 0; i < k; ++i) g.inter_layer_edges.emplace_back(k + i, k + i);    // inner chords
  return g;
}

/// Sc(L,n): L x L transverse section (free boundaries), n periodic layers.
inline LayeredGraph build_slab(const SlabParams& p) {
  LayeredGraph g;
  g.layer_width = p.L * p.L;
  g.n_layers = p.n;
  auto id = [&](int x, int y) { return x + p.L * y; };
  for (int y = 0; y < p.L; ++y)
    for (int x = 0; x + 1 < p.L; ++x) g.intra_layer_edges.emplace_back(id(x, y), id(x + 1, y));
  for (int x = 0; x < p.L; ++x)
    for (int y = 0; y + 1 < p.L; ++y) g.intra_layer_edges.emplace_back(id(x, y), id(x, y + 1));
  for (int i = 0; i < p.L * p.L; ++i) g.inter_layer_edges.emplace_back(i, i);
  return g;
}

// ---------------------------------------------------------------------------
// Fortuin-Kasteleyn subset-sum oracle
// ---------------------------------------------------------------------------

namespace graphs_detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

inline int component_count_dfs(const Graph& g, std::uint32_t subset) {
  std::vector<std::vector<int>> adj(g.vertex_count);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (!(subset >> i & 1)) continue;
    auto [u, v] = g.edges[i];
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<char> seen(g.vertex_count, 0);
  int comps = 0;
  std::vector<int> stack;
  for (int s = 0; s < g.vertex_count; ++s) {
    if (seen[s]) continue;
    ++comps;
    stack.push_back(s);
    seen[s] = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : adj[x])
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
    }
  }
  return comps;
}

}  // namespace graphs_detail

/// Exact Z_G(Q,v) by the 2^|E| subset sum. Component counts use union-find;
/// a slow DFS recount runs on a sample of subsets as a self-check.
inline BivarPoly fk_partition_poly(const Graph& g, int edge_cap = 26, int threads = 0) {
  const int E = g.edge_count();
  if (E > edge_cap)
    throw resource_limit_error("FK subset sum needs |E| <= " + std::to_string(edge_cap) +
                               ", got " + std::to_string(E));
  const int V = g.vertex_count;
  const std::uint64_t total = std::uint64_t(1) << E;
  if (threads <= 0) threads = default_thread_count();
  const int chunks = E >= 18 ? threads * 8 : 1;
  // counts[c][e] = number of subsets with c components and e edges
  std::vector<std::vector<std::vector<std::uint64_t>>> partial(
      chunks, std::vector<std::vector<std::uint64_t>>(V + 1, std::vector<std::uint64_t>(E + 1, 0)));

  parallel_for(
      chunks,
      [&](std::size_t chunk) {
        std::uint64_t lo = total * chunk / chunks, hi = total * (chunk + 1) / chunks;
        auto& counts = partial[chunk];
        for (std::uint64_t s = lo; s < hi; ++s) {
          graphs_detail::UnionFind uf(V);
          int comps = V, ne = 0;
          for (int i = 0; i < E; ++i) {
            if (!(s >> i & 1)) continue;
            ++ne;
            auto [u, v] = g.edges[i];
            if (u != v && uf.unite(u, v)) --comps;
          }
#ifndef NDEBUG
          if ((s & 127) == 0)
            if (graphs_detail::component_count_dfs(g, static_cast<std::uint32_t>(s)) != comps)
              throw numeric_error("union-find / DFS component count mismatch");
#endif
          counts[comps][ne]++;
        }
      },
      threads);

  BivarPoly z;
  for (int c = 0; c <= V; ++c)
    for (int e = 0; e <= E; ++e) {
      std::uint64_t n = 0;
      for (auto& counts : partial) n += counts[c][e];
      if (n) z.add_term(c, e, Rat(Int(static_cast<unsigned long>(n))));
    }
  return z;
}

// ---------------------------------------------------------------------------
// Integer-Q spin transfer-matrix oracle for G(nk,k)
// ---------------------------------------------------------------------------

/// Builds the N^{k+1}-dimensional spin transfer matrix of G(nk,k): the cut
/// between consecutive layers crosses k+1 vertices (the last outer vertex
/// plus the k inner ones). Entries are polynomials in v with integer
/// coefficients; T entry = sum over the k-1 free outer spins of
/// prod_edges (1 + v [same spin]).
inline std::vector<QPoly> spin_transfer_matrix(int k, int N, int dim_cap = 4096) {
  if (k < 1) throw invalid_input_error("spin oracle requires k >= 1");
  if (N < 0) throw invalid_input_error("spin oracle requires N >= 0");
  double dim_d = std::pow(double(N), k + 1);
  if (dim_d > double(dim_cap))
    throw resource_limit_error("spin transfer dimension N^(k+1) exceeds cap");
  const int W = k + 1;
  const int dim = static_cast<int>(dim_d);
  // interface state: spins (o, n_1..n_k) with o = last outer vertex of the
  // layer, n_i = inner vertices. Mixed-radix index, o fastest.
  std::vector<QPoly> T(std::size_t(dim) * dim);
  if (N == 0) return T;
  const QPoly one = QPoly::constant(Rat(1));
  const QPoly v_plus_1{std::vector<Rat>{Rat(1), Rat(1)}};
  std::vector<int> s(W), t(W), free_spin(std::max(k - 1, 0));
  auto decode = [&](int idx, std::vector<int>* out) {
    for (int i = 0; i < W; ++i) {
      (*out)[i] = idx % N;
      idx /= N;
    }
  };
  for (int a = 0; a < dim; ++a) {
    decode(a, &s);  // previous interface: s[0]=outer o_prev, s[1..k]=inner prev
    for (int b = 0; b < dim; ++b) {
      decode(b, &t);  // new interface: t[0]=last outer of new layer, t[1..k]=inner new
      QPoly acc;
      std::uint64_t nfree = 1;
      for (int i = 0; i < k - 1; ++i) nfree *= N;
      for (std::uint64_t f = 0; f < nfree; ++f) {
        std::uint64_t ff = f;
        for (int i = 0; i < k - 1; ++i) {
          free_spin[i] = static_cast<int>(ff % N);
          ff /= N;
        }
        // outer vertices of the new layer in ring order: x_0..x_{k-1},
        // x_{k-1} = t[0]; x_0..x_{k-2} are the free spins.
        auto outer = [&](int i) { return i == k - 1 ? t[0] : free_spin[i]; };
        int same = 0;
        // wrap edge from previous last outer to first new outer
        same += (s[0] == outer(0));
        // outer run within the layer
        for (int i = 0; i + 1 < k; ++i) same += (outer(i) == outer(i + 1));
        // spokes: new outer i -- new inner i
        for (int i = 0; i < k; ++i) same += (outer(i) == t[1 + i]);
        // inner chords: previous inner i -- new inner i
        for (int i = 0; i < k; ++i) same += (s[1 + i] == t[1 + i]);
        acc += v_plus_1.pow(same);  // (1+v)^same * 1^(3k-same)
      }
      T[std::size_t(b) * dim + a] = acc;
    }
  }
  return T;
}

/// Z_{G(nk,k)}(N, v) as an exact polynomial in v (trace of the n-th power of
/// the spin transfer matrix). N = 0 returns the zero polynomial: no spin
/// states exist.
inline QPoly spin_transfer_trace_poly(int k, int n, int N, int dim_cap = 4096) {
  if (n < 1) throw invalid_input_error("spin oracle requires n >= 1");
  std::vector<QPoly> T = spin_transfer_matrix(k, N, dim_cap);
  if (N == 0) return QPoly();
  int dim = static_cast<int>(std::lround(std::pow(double(N), k + 1)));
  auto mult = [&](const std::vector<QPoly>& A, const std::vector<QPoly>& B) {
    std::vector<QPoly> C(std::size_t(dim) * dim);
    parallel_for(dim, [&](std::size_t r) {
      for (int c = 0; c < dim; ++c) {
        QPoly acc;
        for (int t = 0; t < dim; ++t) {
          const QPoly& x = A[r * dim + t];
          if (!x.is_zero()) acc += x * B[std::size_t(t) * dim + c];
        }
        C[r * dim + c] = acc;
      }
    });
    return C;
  };
  std::vector<QPoly> P;  // T^n by binary powering
  std::vector<QPoly> base = T;
  int e = n;
  bool have = false;
  while (e) {
    if (e & 1) {
      P = have ? mult(P, base) : base;
      have = true;
    }
    e >>= 1;
    if (e) base = mult(base, base);
  }
  QPoly tr;
  for (int i = 0; i < dim; ++i) tr += P[std::size_t(i) * dim + i];
  return tr;
}

/// Value form of the spin oracle at an exact rational v.
inline Rat spin_transfer_trace(int k, int n, int N, const Rat& v, int dim_cap = 4096) {
  QPoly z = spin_transfer_trace_poly(k, n, N, dim_cap);
  return z.eval(v);
}

// ---------------------------------------------------------------------------
// Canonical form / isomorphism for small graphs
// ---------------------------------------------------------------------------

namespace graphs_detail {

inline std::vector<std::vector<int>> adjacency_multiset(const Graph& g) {
  std::vector<std::vector<int>> adj(g.vertex_count);
  for (auto& [u, v] : g.edges) {
    adj[u].push_back(v);
    if (u != v) adj[v].push_back(u);
  }
  return adj;
}

// encode graph under a labeling (perm[i] = new label of vertex i)
inline std::vector<std::pair<int, int>> relabel_edges(const Graph& g,
                                                      const std::vector<int>& perm) {
  std::vector<std::pair<int, int>> e;
  e.reserve(g.edges.size());
  for (auto [u, v] : g.edges) {
    int a = perm[u], b = perm[v];
    if (a > b) std::swap(a, b);
    e.emplace_back(a, b);
  }
  std::sort(e.begin(), e.end());
  return e;
}

}  // namespace graphs_detail

/// Canonical edge list by iterative color refinement with vertex
/// individualization: refinement alone cannot split vertex-transitive
/// graphs, so non-discrete color classes are resolved by branching on each
/// member of the first one and taking the minimal encoding.
inline std::vector<std::pair<int, int>> canonical_form(const Graph& g) {
  using namespace graphs_detail;
  const int n = g.vertex_count;
  if (n == 0) return {};
  auto adj = adjacency_multiset(g);

  auto refine = [&](std::vector<int> color) {
    for (;;) {
      std::vector<std::pair<int, std::vector<int>>> sig(n);
      for (int i = 0; i < n; ++i) {
        std::vector<int> nb;
        nb.reserve(adj[i].size());
        for (int j : adj[i]) nb.push_back(color[j]);
        std::sort(nb.begin(), nb.end());
        sig[i] = {color[i], std::move(nb)};
      }
      std::vector<std::pair<int, std::vector<int>>> sorted = sig;
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      std::vector<int> next(n);
      for (int i = 0; i < n; ++i)
        next[i] = static_cast<int>(
            std::lower_bound(sorted.begin(), sorted.end(), sig[i]) - sorted.begin());
      if (next == color) return color;
      color = next;
    }
  };

  std::vector<std::pair<int, int>> best;
  bool have_best = false;
  std::function<void(std::vector<int>)> descend = [&](std::vector<int> color) {
    color = refine(std::move(color));
    // first non-singleton class
    std::map<int, std::vector<int>> classes;
    for (int i = 0; i < n; ++i) classes[color[i]].push_back(i);
    int branch_class = -1;
    for (auto& [c, members] : classes)
      if (members.size() > 1) {
        branch_class = c;
        break;
      }
    if (branch_class < 0) {
      // discrete coloring: colors are a permutation
      std::vector<int> perm(n);
      for (int i = 0; i < n; ++i) perm[i] = color[i];
      auto enc = relabel_edges(g, perm);
      if (!have_best || enc < best) {
        best = enc;
        have_best = true;
      }
      return;
    }
    for (int v : classes[branch_class]) {
      std::vector<int> c2(n);
      for (int i = 0; i < n; ++i) c2[i] = 2 * color[i] + (i == v ? 0 : 1);
      descend(std::move(c2));
    }
  };
  descend(std::vector<int>(n, 0));
  return best;
}

inline bool isomorphic(const Graph& a, const Graph& b) {
  if (a.vertex_count != b.vertex_count || a.edges.size() != b.edges.size()) return false;
  return canonical_form(a) == canonical_form(b);
}

}  // namespace potts
