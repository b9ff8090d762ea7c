#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fpplab/builders.hpp"
#include "fpplab/fpp.hpp"
#include "fpplab/tiling.hpp"

using namespace fpplab;

namespace {

Graph path_graph(int n) {
  Graph::Builder b(n);
  for (int i = 0; i + 1 < n; ++i) b.add_edge(i, i + 1);
  return std::move(b).build();
}

Element branch(int first, int depth) {
  Element e(static_cast<std::size_t>(depth), 0);
  e[0] = first;
  return e;
}

}  // namespace

TEST(Net, IntegersEvenSites) {
  auto z = build_lattice_ball(1, 10);
  auto centers = r_separated_net(z.graph(), 2, z.basepoint);
  std::vector<std::int64_t> coords;
  for (VertexId c : centers) coords.push_back(z.label(c)[0]);
  std::sort(coords.begin(), coords.end());
  std::vector<std::int64_t> want;
  for (int x = -10; x <= 10; x += 2) want.push_back(x);
  EXPECT_EQ(coords, want);
  EXPECT_EQ(centers.front(), z.basepoint);
}

TEST(Net, LargeRadiusSingleCentre) {
  auto z = build_lattice_ball(2, 5);
  EXPECT_EQ(r_separated_net(z.graph(), 11, z.basepoint).size(), 1u);
  EXPECT_THROW(r_separated_net(z.graph(), 0, z.basepoint), std::invalid_argument);
}

TEST(Net, LatticeOracleScan) {
  auto z = build_lattice_ball(2, 10);
  const auto& g = z.graph();
  auto centers = r_separated_net(g, 4, z.basepoint);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) EXPECT_GE(*graph_distance(g, centers[i], centers[j]), 4);
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    int best = 1 << 30;
    for (VertexId c : centers) best = std::min(best, *graph_distance(g, v, c));
    EXPECT_LE(best, 4);
  }
}

TEST(Voronoi, InvariantsAndHalfBall) {
  auto z = build_lattice_ball(2, 12);
  const auto& g = z.graph();
  auto centers = r_separated_net(g, 6, z.basepoint);
  auto t = voronoi_tiles(g, centers, 6);
  EXPECT_TRUE(audit_tiling(g, t).ok());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    auto b = ball(g, centers[i], 2);
    for (VertexId v : b.members) EXPECT_EQ(t.assignment[static_cast<std::size_t>(v)], static_cast<int>(i));
  }
  // Brute-force nearest centre with index tie-breaking.
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    int best = 1 << 30, owner = -1;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      int d = *graph_distance(g, v, centers[i]);
      if (d < best) best = d, owner = static_cast<int>(i);
    }
    EXPECT_EQ(t.assignment[static_cast<std::size_t>(v)], owner);
    EXPECT_EQ(t.center_distance[static_cast<std::size_t>(v)], best);
  }
}

TEST(Voronoi, TieGoesToSmallerIndex) {
  auto g = path_graph(3);
  std::vector<VertexId> centers{2, 0};
  auto t = voronoi_tiles(g, centers, 2);
  EXPECT_EQ(t.assignment[1], 0);
  EXPECT_EQ(t.assignment[0], 1);
}

TEST(Voronoi, AuditCatchesBrokenTiling) {
  auto g = path_graph(7);
  auto t = voronoi_tiles(g, r_separated_net(g, 3, 0), 3);
  auto broken = t;
  broken.assignment[0] = 1;
  EXPECT_FALSE(audit_tiling(g, broken).ok());
  broken = t;
  broken.centers[1] = 1;
  EXPECT_FALSE(audit_tiling(g, broken).separation);
}

TEST(TileGraphs, Degrees) {
  auto small = build_lattice_ball(2, 3);
  auto one = voronoi_tiles(small.graph(), r_separated_net(small.graph(), 20, small.basepoint), 20);
  auto tg = tile_graph_degrees(small.graph(), one);
  EXPECT_EQ(tg.max_degree, 0);
  EXPECT_EQ(tg.max_enlarged_degree, 0);

  auto tree = build_regular_tree(3, 8);
  auto tt = voronoi_tiles(tree.graph(), r_separated_net(tree.graph(), 3, tree.basepoint), 3);
  auto tree_graphs = tile_graph_degrees(tree.graph(), tt);
  EXPECT_GT(tree_graphs.max_degree, 0);
  EXPECT_LT(tree_graphs.max_degree, static_cast<int>(tt.tile_count()));

  std::vector<int> degrees;
  for (int R : {4, 8, 16}) {
    auto z = build_lattice_ball(2, 5 * R);
    auto t = voronoi_tiles(z.graph(), r_separated_net(z.graph(), R, z.basepoint), R);
    auto graphs = tile_graph_degrees(z.graph(), t);
    degrees.push_back(graphs.max_degree);
    for (std::size_t i = 0; i < graphs.adjacency.size(); ++i) {
      const auto& row = graphs.adjacency[i];
      EXPECT_TRUE(std::is_sorted(row.begin(), row.end()));
      EXPECT_EQ(std::find(row.begin(), row.end(), static_cast<int>(i)), row.end());
    }
  }
  auto [lo, hi] = std::minmax_element(degrees.begin(), degrees.end());
  EXPECT_LT(*hi, 2 * *lo);
}

TEST(Crossings, StraightGeodesic) {
  auto z = build_lattice_ball(2, 30);
  const auto& g = z.graph();
  auto t = voronoi_tiles(g, r_separated_net(g, 2, z.basepoint), 2);
  std::vector<double> w(static_cast<std::size_t>(g.edge_count()), 1.0);
  std::vector<char> all(t.tile_count(), 1), none(t.tile_count(), 0);

  auto x = *z.locate({-2, 0}), y = *z.locate({2, 0});
  auto near = passage_time_geodesic(g, w, x, y);
  EXPECT_EQ(count_crossed_tiles(g, near.path, t, all), 0);

  int prev = -1;
  for (int h : {10, 15, 20, 25}) {
    auto geo = passage_time_geodesic(g, w, *z.locate({-h, 0}), *z.locate({h, 0}));
    int c = count_crossed_tiles(g, geo.path, t, all);
    EXPECT_GE(c, prev);
    EXPECT_EQ(count_crossed_tiles(g, geo.path, t, none), 0);
    prev = c;
  }
  // d = 50 with Σ R = 6: everything more than 6 from both ends can count.
  EXPECT_GE(prev, 50 / 8);
}

TEST(Percolation, Extremes) {
  auto z = build_lattice_ball(2, 6);
  std::vector<int> radii{1, 3, 6};
  for (const auto& row : estimate_connection_decay(z.graph(), z.basepoint, 1.0, radii, 50, 3).rows) {
    EXPECT_EQ(row.hits, 50u);
  }
  for (const auto& row : estimate_connection_decay(z.graph(), z.basepoint, 0.0, radii, 50, 3).rows) {
    EXPECT_EQ(row.hits, 0u);
  }
  std::vector<int> too_far{7};
  EXPECT_THROW(estimate_connection_decay(z.graph(), z.basepoint, 0.5, too_far, 10, 1), std::invalid_argument);
}

TEST(Percolation, SubcriticalDecay) {
  auto z = build_lattice_ball(2, 20);
  std::vector<int> radii{5, 10, 15, 20};
  auto r = estimate_connection_decay(z.graph(), z.basepoint, 0.25, radii, 400000, 11);
  for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_LT(r.rows[i].estimate, r.rows[i - 1].estimate);
  ASSERT_TRUE(r.fit);
  EXPECT_LT(r.fit->slope_ci.hi, 0);
  auto again = estimate_connection_decay(z.graph(), z.basepoint, 0.25, radii, 400000, 11, 3);
  EXPECT_EQ(decay_csv(r), decay_csv(again));
  EXPECT_EQ(decay_csv(r).substr(0, 28), "R, estimate, ci_lo, ci_hi, N");
}

TEST(CheapPassage, IrwinHall) {
  EXPECT_NEAR(static_cast<double>(irwin_hall_cdf(2, 1)), 0.5, 1e-15);
  EXPECT_NEAR(static_cast<double>(irwin_hall_cdf(3, 1.5L)), 0.5, 1e-15);
  EXPECT_NEAR(static_cast<double>(irwin_hall_cdf(4, 0.5L)), 0.0625 / 24, 1e-18);
  EXPECT_EQ(irwin_hall_cdf(3, 4), 1);
}

TEST(CheapPassage, DiracIsNegativeControl) {
  auto z = build_lattice_ball(2, 12);
  std::vector<std::pair<VertexId, VertexId>> pairs{{*z.locate({-4, 0}), *z.locate({4, 0})}};
  auto r = estimate_cheap_passage_prob(z.graph(), Distribution::atom(1), 0.05, pairs, 20, 1);
  EXPECT_EQ(r.rows[0].hits, 20u);
  EXPECT_FALSE(r.rows[0].rare);
}

TEST(CheapPassage, TreeConcentrates) {
  auto tree = build_regular_tree(3, 15);
  std::vector<std::pair<VertexId, VertexId>> pairs{{*tree.locate(branch(0, 15)), *tree.locate(branch(1, 15))}};
  auto r = estimate_cheap_passage_prob(tree.graph(), Distribution::uniform(1, 2), 0.1, pairs, 500, 2);
  EXPECT_EQ(r.rows[0].d, 30);
  EXPECT_EQ(r.rows[0].hits, 0u);
  // One path: the importance estimate is the exact Irwin-Hall value.
  ASSERT_TRUE(r.rows[0].rare);
  EXPECT_DOUBLE_EQ(r.rows[0].rare->mean, static_cast<double>(irwin_hall_cdf(30, 3)));
  EXPECT_EQ(r.rows[0].rare->se, 0);
}

TEST(CheapPassage, RareEstimatorMatchesPlainCount) {
  auto z = build_lattice_ball(2, 8);
  std::vector<std::pair<VertexId, VertexId>> pairs{{*z.locate({-1, -1}), *z.locate({1, 1})},
                                                   {*z.locate({-2, -1}), *z.locate({1, 2})}};
  auto r = estimate_cheap_passage_prob(z.graph(), Distribution::uniform(1, 2), 0.25, pairs, 40000, 5);
  for (const auto& row : r.rows) {
    ASSERT_TRUE(row.rare);
    ASSERT_GT(row.hits, 50u);
    double se_mc = std::sqrt(row.fraction * (1 - row.fraction) / static_cast<double>(row.n));
    EXPECT_NEAR(row.rare->mean, row.fraction, 4 * std::hypot(se_mc, row.rare->se)) << row.d;
  }
}

TEST(CheapPassage, DecreasesOnLattice) {
  auto z = build_lattice_ball(2, 32);
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (int d : {10, 20, 30}) pairs.emplace_back(*z.locate({-d / 4, -(d / 2 - d / 4)}), *z.locate({d / 2 - d / 4, d / 4}));
  auto r = estimate_cheap_passage_prob(z.graph(), Distribution::uniform(1, 2), 0.05, pairs, 200, 9);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    EXPECT_EQ(r.rows[i].d, 10 * static_cast<int>(i + 1));
    ASSERT_TRUE(r.rows[i].rare);
    EXPECT_GT(r.rows[i].rare->mean, 0);
    if (i) EXPECT_LT(r.rows[i].best_estimate(), r.rows[i - 1].best_estimate());
  }
}
