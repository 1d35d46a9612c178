#include "doctest.h"

#include <sstream>

#include "potts/graphs.hpp"

using namespace potts;

TEST_CASE("generalized Petersen construction") {
  Graph g = build_petersen(PetersenParams(5, 2));
  CHECK(g.vertex_count == 10);
  CHECK(g.edge_count() == 15);
  for (int d : g.degrees()) CHECK(d == 3);

  // m = 2k produces double edges
  Graph dbl = build_petersen(PetersenParams(4, 2));
  auto edges = dbl.edges;
  std::sort(edges.begin(), edges.end());
  bool has_dup = false;
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (edges[i] == edges[i - 1]) has_dup = true;
  CHECK(has_dup);

  Graph big = build_petersen(PetersenParams(12, 4));
  CHECK(big.vertex_count == 24);
  for (int d : big.degrees()) CHECK(d == 3);

  CHECK_THROWS_AS(build_petersen(PetersenParams(2, 2)), invalid_input_error);
  CHECK_THROWS_AS(build_petersen(PetersenParams(5, 0)), invalid_input_error);
}

TEST_CASE("layered Petersen flattens to the direct construction") {
  LayeredGraph l21 = build_petersen_layered(2, 1);
  Graph f = l21.flatten();
  CHECK(f.vertex_count == 4);
  CHECK(f.edge_count() == 6);
  CHECK(isomorphic(f, build_petersen(PetersenParams(2, 1))));

  CHECK(isomorphic(build_petersen_layered(3, 2).flatten(), build_petersen(PetersenParams(6, 2))));
  CHECK(build_petersen_layered(2, 3).layer_width == 6);
  CHECK(build_petersen_layered(2, 3).n_layers == 2);

  for (auto [n, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {4, 1}, {2, 2}, {3, 2},
                                                      {2, 3}, {4, 3}, {2, 5}, {3, 4}, {2, 4}})
    CHECK(isomorphic(build_petersen_layered(n, k).flatten(),
                     build_petersen(PetersenParams(n * k, k))));

  CHECK_THROWS_AS(build_petersen_layered(1, 2), invalid_input_error);
}

TEST_CASE("slab construction") {
  Graph s = build_slab(SlabParams(2, 3)).flatten();
  CHECK(s.vertex_count == 12);
  CHECK(s.edge_count() == 24);  // 12 horizontal + 12 vertical

  Graph chain = build_slab(SlabParams(1, 4)).flatten();
  CHECK(chain.vertex_count == 4);
  CHECK(chain.edge_count() == 4);  // a 4-cycle
  for (int d : chain.degrees()) CHECK(d == 2);

  // degenerate wrap: n = 1 identifies z = 1 with z = 0, so the vertical
  // edges close on themselves; FK weights a loop as (1+v)
  Graph loopy = build_slab(SlabParams(2, 1)).flatten();
  CHECK(loopy.vertex_count == 4);
  CHECK(loopy.edge_count() == 8);
  BivarPoly z = fk_partition_poly(loopy);
  // Z_{Sc(2,1)} = (1+v)^4 * Z_{C4}
  Graph c4(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  BivarPoly zc4 = fk_partition_poly(c4);
  BivarPoly onep = BivarPoly(1) + BivarPoly::v();
  CHECK(z == zc4 * onep.pow(4));
}

TEST_CASE("FK oracle basics") {
  Graph e1(2, {{0, 1}});
  BivarPoly z = fk_partition_poly(e1);
  BivarPoly want = BivarPoly::Q(2) + BivarPoly::Q() * BivarPoly::v();
  CHECK(z == want);

  Graph g = build_petersen(PetersenParams(3, 1));
  BivarPoly zg = fk_partition_poly(g);
  // Q = 1 gives (1+v)^{|E|}
  QPoly onep_e = QPoly{std::vector<Rat>{Rat(1), Rat(1)}}.pow(g.edge_count());
  for (Rat v : {make_rat(2), make_rat(-3), make_rat(5, 7)})
    CHECK(zg.eval(make_rat(1), v) == onep_e.eval(v));
  // Q = 0 kills everything
  bool zero_at_0 = true;
  for (auto& [key, c] : zg.terms())
    if (key.first == 0) zero_at_0 = false;
  CHECK(zero_at_0);
  // odd cycle: chromatic polynomial vanishes at Q = 2
  CHECK(zg.eval(make_rat(2), make_rat(-1)) == 0);

  CHECK_THROWS_AS(fk_partition_poly(build_petersen(PetersenParams(10, 1))), resource_limit_error);
}

TEST_CASE("FK degrees and leading coefficient for Petersen graphs") {
  for (auto [m, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {4, 2}, {5, 2}}) {
    Graph g = build_petersen(PetersenParams(m, k));
    BivarPoly z = fk_partition_poly(g);
    CHECK(z.deg_v() == g.edge_count());
    CHECK(z.deg_Q() == g.vertex_count);
    CHECK(z.coeff(g.vertex_count, 0) == 1);
  }
}

TEST_CASE("spin transfer oracle") {
  // Q = 1: a single spin state, Z = (1+v)^{3nk}
  QPoly z = spin_transfer_trace_poly(2, 2, 1);
  QPoly want = QPoly{std::vector<Rat>{Rat(1), Rat(1)}}.pow(12);
  CHECK(z == want);

  // N = 0 has no states
  CHECK(spin_transfer_trace_poly(3, 2, 0).is_zero());
  CHECK(spin_transfer_trace(3, 2, 0, make_rat(5)) == 0);

  // exact agreement with the FK oracle at integer Q
  for (int k = 1; k <= 3; ++k)
    for (int n = 2; n <= 3; ++n) {
      if (k == 3 && n == 3) continue;  // 27 edges exceed the FK cap
      Graph g = build_petersen(PetersenParams(n * k, k));
      BivarPoly zfk = fk_partition_poly(g);
      for (int N = 0; N <= 3; ++N) {
        QPoly zs = spin_transfer_trace_poly(k, n, N);
        for (Rat v : {make_rat(-1), make_rat(2), make_rat(-7, 3)})
          CHECK(zs.eval(v) == zfk.eval(make_rat(N), v));
      }
    }
  // the spec's pinned example: (k=2, n=3, N=2, v=-1)
  Graph g62 = build_petersen(PetersenParams(6, 2));
  CHECK(spin_transfer_trace(2, 3, 2, make_rat(-1)) ==
        fk_partition_poly(g62).eval(make_rat(2), make_rat(-1)));

  CHECK_THROWS_AS(spin_transfer_trace_poly(7, 2, 4), resource_limit_error);
}

TEST_CASE("edge list io round trip") {
  Graph g = build_petersen(PetersenParams(5, 2));
  std::stringstream ss;
  g.write_edge_list(ss);
  Graph h = Graph::read_edge_list(ss);
  CHECK(g.vertex_count == h.vertex_count);
  CHECK(g.edges == h.edges);
  std::stringstream bad("3 1\n0 5\n");
  CHECK_THROWS_AS(Graph::read_edge_list(bad), invalid_input_error);
}

TEST_CASE("canonical form is relabeling-invariant") {
  Graph g = build_petersen(PetersenParams(5, 2));
  SplitMix64 rng(4);
  std::vector<int> perm(g.vertex_count);
  std::iota(perm.begin(), perm.end(), 0);
  for (int rep = 0; rep < 4; ++rep) {
    for (int i = g.vertex_count - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.next_below(i + 1)]);
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : g.edges) edges.emplace_back(perm[u], perm[v]);
    Graph h(g.vertex_count, std::move(edges));
    CHECK(isomorphic(g, h));
  }
  CHECK_FALSE(isomorphic(build_petersen(PetersenParams(5, 1)),
                         build_petersen(PetersenParams(5, 2))));
}
