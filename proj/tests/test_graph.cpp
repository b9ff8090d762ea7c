#include "fpplab/graph.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

using namespace fpplab;

namespace {

// Plain (2n+1)^2 grid indexed by coordinates, built by hand.
struct Grid {
  int n;
  Graph g;
  VertexId at(int x, int y) const { return (x + n) * (2 * n + 1) + (y + n); }
};

Grid make_grid(int n) {
  int side = 2 * n + 1;
  Graph::Builder b(side * side);
  Grid grid{n, {}};
  for (int x = -n; x <= n; ++x) {
    for (int y = -n; y <= n; ++y) {
      if (x < n) b.add_edge(grid.at(x, y), grid.at(x + 1, y));
      if (y < n) b.add_edge(grid.at(x, y), grid.at(x, y + 1));
    }
  }
  grid.g = std::move(b).build();
  return grid;
}

Graph cycle(int n) {
  Graph::Builder b(n);
  for (int i = 0; i < n; ++i) b.add_edge(i, (i + 1) % n);
  return std::move(b).build();
}

Graph random_graph(std::mt19937_64& rng, int max_vertices) {
  int n = std::uniform_int_distribution<int>(2, max_vertices)(rng);
  Graph::Builder b(n);
  // Random spanning tree plus extra edges, some of them parallel.
  for (int v = 1; v < n; ++v) b.add_edge(std::uniform_int_distribution<int>(0, v - 1)(rng), v);
  int extra = std::uniform_int_distribution<int>(0, n + 2)(rng);
  for (int i = 0; i < extra; ++i) {
    int u = std::uniform_int_distribution<int>(0, n - 1)(rng);
    int v = std::uniform_int_distribution<int>(0, n - 1)(rng);
    if (u != v) b.add_edge(u, v);
  }
  return std::move(b).build();
}

}  // namespace

TEST(Graph, RejectsSelfLoops) {
  Graph::Builder b(2);
  EXPECT_THROW(b.add_edge(1, 1), std::invalid_argument);
  EXPECT_THROW(b.add_edge(0, 2), std::invalid_argument);
}

TEST(Graph, IncidenceConsistent) {
  auto grid = make_grid(3);
  std::int64_t total = 0;
  for (VertexId v = 0; v < grid.g.vertex_count(); ++v) {
    for (auto e : grid.g.incident(v)) EXPECT_TRUE(grid.g.endpoints(e).contains(v));
    total += grid.g.degree(v);
  }
  EXPECT_EQ(total, 2 * grid.g.edge_count());
}

TEST(Distance, LatticeL1) {
  auto grid = make_grid(5);
  EXPECT_EQ(graph_distance(grid.g, grid.at(0, 0), grid.at(3, 4)), 7);
  EXPECT_EQ(graph_distance(grid.g, grid.at(2, 2), grid.at(2, 2)), 0);
}

TEST(Distance, UnreachableIsDistinct) {
  Graph::Builder b(3);
  b.add_edge(0, 1);
  auto g = std::move(b).build();
  EXPECT_FALSE(graph_distance(g, 0, 2).has_value());
  EXPECT_EQ(graph_distance(g, 0, 1), 1);
}

TEST(Ball, LatticeCounts) {
  auto grid = make_grid(6);
  for (int r = 0; r <= 4; ++r) {
    auto b = ball(grid.g, grid.at(0, 0), r);
    EXPECT_EQ(b.members.size(), static_cast<std::size_t>(2 * r * r + 2 * r + 1));
    EXPECT_EQ(b.shell.size(), r == 0 ? 1u : static_cast<std::size_t>(4 * r));
  }
  auto b0 = ball(grid.g, grid.at(1, 1), 0);
  EXPECT_EQ(b0.members, std::vector<VertexId>{grid.at(1, 1)});
  EXPECT_EQ(b0.shell, b0.members);
  EXPECT_THROW(ball(grid.g, 0, -1), std::invalid_argument);
}

TEST(Ball, TreeCount) {
  // 3-regular tree to depth 2: root, 3 children, 6 grandchildren.
  Graph::Builder b(10);
  for (int c = 1; c <= 3; ++c) {
    b.add_edge(0, c);
    b.add_edge(c, 2 + 2 * c);
    b.add_edge(c, 3 + 2 * c);
  }
  auto g = std::move(b).build();
  EXPECT_EQ(ball(g, 0, 2).members.size(), 10u);
}

TEST(Enumerate, StaircasesAndCycle) {
  auto grid = make_grid(3);
  auto paths = collect_self_avoiding_paths(grid.g, grid.at(0, 0), grid.at(1, 1), 2);
  EXPECT_EQ(paths.size(), 2u);
  for (const auto& p : paths) EXPECT_EQ(p.length(), 2u);
  EXPECT_LT(paths[0], paths[1]);

  auto c4 = cycle(4);
  EXPECT_EQ(collect_self_avoiding_paths(c4, 0, 2, 2).size(), 2u);
  EXPECT_EQ(collect_self_avoiding_paths(c4, 0, 2, 1).size(), 0u);
}

TEST(Enumerate, TreeHasOnePath) {
  Graph::Builder b(7);
  for (int v = 1; v < 7; ++v) b.add_edge((v - 1) / 2, v);
  auto g = std::move(b).build();
  for (VertexId u = 0; u < 7; ++u) {
    for (VertexId v = 0; v < 7; ++v) {
      EXPECT_EQ(collect_self_avoiding_paths(g, u, v, 6).size(), 1u);
    }
  }
}

TEST(Enumerate, BudgetReportsProgress) {
  auto grid = make_grid(4);
  EnumerationLimits lim{.max_len = 12, .budget = 50};
  try {
    enumerate_self_avoiding_paths(grid.g, grid.at(0, 0), grid.at(2, 2), lim, [](const Path&) { return true; });
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.expansions(), 50u);
  }
}

TEST(Path, ChainingAndViews) {
  auto grid = make_grid(2);
  std::vector<VertexId> vs{grid.at(0, 0), grid.at(1, 0), grid.at(1, 1)};
  auto p = Path::from_vertices(grid.g, vs);
  EXPECT_EQ(p.length(), 2u);
  EXPECT_EQ(p.end(), grid.at(1, 1));
  EXPECT_TRUE(p.self_avoiding());
  EXPECT_EQ(p.reversed().start(), grid.at(1, 1));
  EXPECT_EQ(p.subpath(1, 1).start(), grid.at(1, 0));
  auto e = p.edges()[1];
  EXPECT_THROW(Path::from_edges(grid.g, grid.at(0, 0), {e}), std::invalid_argument);
}

TEST(LoopErase, Backtrack) {
  // 3-vertex path u - w - v; walk u -> w -> u -> w -> v.
  Graph::Builder b(3);
  auto e0 = b.add_edge(0, 1);
  auto e1 = b.add_edge(1, 2);
  auto g = std::move(b).build();
  auto walk = Path::from_edges(g, 0, {e0, e0, e0, e1});
  auto erased = loop_erase(g, walk);
  EXPECT_EQ(erased, Path::from_edges(g, 0, {e0, e1}));
  EXPECT_EQ(loop_erase(g, erased), erased);
}

TEST(LoopErase, RandomWalkProperty) {
  auto grid = make_grid(8);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    VertexId cur = grid.at(0, 0);
    std::vector<EdgeId> steps;
    for (int i = 0; i < 50; ++i) {
      auto inc = grid.g.incident(cur);
      auto e = inc[std::uniform_int_distribution<std::size_t>(0, inc.size() - 1)(rng)];
      steps.push_back(e);
      cur = grid.g.opposite(e, cur);
    }
    auto walk = Path::from_edges(grid.g, grid.at(0, 0), steps);
    auto erased = loop_erase(grid.g, walk);
    EXPECT_TRUE(erased.self_avoiding());
    EXPECT_EQ(erased.start(), walk.start());
    EXPECT_EQ(erased.end(), walk.end());
    EXPECT_LE(erased.length(), walk.length());
    auto in = walk.edge_set();
    for (auto e : erased.edge_set()) EXPECT_TRUE(std::binary_search(in.begin(), in.end(), e));
  }
}

TEST(SetDifference, Cases) {
  auto grid = make_grid(3);
  std::vector<VertexId> straight{grid.at(0, 0), grid.at(1, 0), grid.at(2, 0)};
  std::vector<VertexId> shifted{grid.at(0, 0), grid.at(0, 1), grid.at(1, 1), grid.at(2, 1), grid.at(2, 0)};
  auto p = Path::from_vertices(grid.g, straight);
  auto q = Path::from_vertices(grid.g, shifted);
  auto s = path_set_difference_sizes(p, q);
  EXPECT_EQ(s.only_first, 2u);
  EXPECT_EQ(s.only_second, 4u);
  EXPECT_EQ(s.common, 0u);
  auto same = path_set_difference_sizes(p, p);
  EXPECT_EQ(same.only_first, 0u);
  EXPECT_EQ(same.common, 2u);
}

TEST(Geodesics, LatticeCounts) {
  auto grid = make_grid(4);
  auto straight = geodesic_count(grid.g, grid.at(0, 0), grid.at(3, 0));
  EXPECT_EQ(straight.count, 1u);
  EXPECT_EQ(straight.witness.length(), 3u);
  EXPECT_EQ(geodesic_count(grid.g, grid.at(0, 0), grid.at(1, 1)).count, 2u);
  // Binomial(6,3) monotone lattice paths.
  EXPECT_EQ(geodesic_count(grid.g, grid.at(0, 0), grid.at(3, 3)).count, 20u);
}

TEST(Geodesics, ParallelEdgesCountTwice) {
  Graph::Builder b(2);
  b.add_edge(0, 1);
  b.add_edge(0, 1);
  auto g = std::move(b).build();
  auto c = geodesic_count(g, 0, 1);
  EXPECT_EQ(c.count, 2u);
  EXPECT_EQ(c.witness.edges()[0], 0);
}

TEST(Geodesics, Saturation) {
  auto grid = make_grid(4);
  auto c = geodesic_count(grid.g, grid.at(-4, -4), grid.at(4, 4), 100);
  EXPECT_TRUE(c.saturated);
  EXPECT_EQ(c.count, 100u);
}

TEST(Geodesics, UnreachableThrows) {
  Graph::Builder b(2);
  auto g = std::move(b).build();
  EXPECT_THROW(geodesic_count(g, 0, 1), std::invalid_argument);
}

TEST(Properties, RandomSmallGraphs) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = random_graph(rng, 12);
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
      auto du = bfs_distances(g, u);
      for (VertexId v = 0; v < g.vertex_count(); ++v) {
        ASSERT_GE(du[v], 0);
        EXPECT_EQ(du[v], bfs_distances(g, v)[u]);
        EXPECT_EQ(du[v] == 0, u == v);
        for (VertexId w = 0; w < g.vertex_count(); ++w) {
          EXPECT_LE(du[w], du[v] + bfs_distances(g, v)[w]);
        }
        auto geos = collect_self_avoiding_paths(g, u, v, du[v]);
        auto count = geodesic_count(g, u, v);
        ASSERT_EQ(count.count, geos.size());
        ASSERT_FALSE(geos.empty());
        EXPECT_EQ(count.witness, geos.front());
        for (const auto& p : geos) EXPECT_EQ(p.length(), static_cast<std::size_t>(du[v]));
      }
    }
  }
}

TEST(Properties, RelevantEdgesCoverAllSelfAvoidingPaths) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = random_graph(rng, 10);
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
      for (VertexId v = 0; v < g.vertex_count(); ++v) {
        auto mask = relevant_edges(g, u, v);
        std::set<EdgeId> used;
        for (const auto& p : collect_self_avoiding_paths(g, u, v, g.vertex_count())) {
          for (auto e : p.edges()) used.insert(e);
        }
        for (EdgeId e = 0; e < g.edge_count(); ++e) EXPECT_EQ(mask[e] != 0, used.count(e) == 1);
      }
    }
  }
}

TEST(Serialization, RoundTrip) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto base = random_graph(rng, 12);
    Graph::Builder b(base.vertex_count());
    for (EdgeId e = 0; e < base.edge_count(); ++e) b.add_edge(base.endpoints(e).u, base.endpoints(e).v);
    if (trial % 2) b.mark_frontier(base.vertex_count() - 1);
    auto g = std::move(b).build();
    auto text = graph_to_text(g);
    auto back = graph_from_text(text);
    EXPECT_EQ(back, g);
    EXPECT_EQ(graph_to_text(back), text);
  }
  EXPECT_THROW(graph_from_text("vertices 2\nedge 1 0 1\n"), std::invalid_argument);
  EXPECT_THROW(graph_from_text("edge 0 0 1\n"), std::invalid_argument);
  EXPECT_THROW(graph_from_text("vertices 2\nedge 0 0 0\n"), std::invalid_argument);
}
