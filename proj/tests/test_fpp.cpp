#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fpplab/builders.hpp"
#include "fpplab/fpp.hpp"
#include "fpplab/rng.hpp"
#include "fpplab/stats.hpp"

using namespace fpplab;

namespace {

Rational q(const char* s) { return parse_rational(s); }

Graph path_graph(int n) {
  Graph::Builder b(n);
  for (int i = 0; i + 1 < n; ++i) b.add_edge(i, i + 1);
  return std::move(b).build();
}

Graph random_graph(std::mt19937_64& rng, int n, int extra) {
  Graph::Builder b(n);
  for (int v = 1; v < n; ++v) b.add_edge(static_cast<VertexId>(rng() % static_cast<unsigned>(v)), v);
  for (int i = 0; i < extra; ++i) {
    auto u = static_cast<VertexId>(rng() % static_cast<unsigned>(n));
    auto v = static_cast<VertexId>(rng() % static_cast<unsigned>(n));
    if (u != v) b.add_edge(u, v);
  }
  return std::move(b).build();
}

Coupling spread_kernel() {
  return Coupling::kernel(Distribution::uniform(q("1.25"), q("1.75")), {{q("-0.25"), q("1/2")}, {q("0.25"), q("1/2")}},
                          Distribution::uniform(1, 2));
}

}  // namespace

TEST(Distribution, ParseAndLiteral) {
  auto d = Distribution::parse("atom 0.5 1/4; unif 1 2 0.5\nexp 2 3 1/4");
  EXPECT_EQ(d.atoms().size(), 1u);
  EXPECT_EQ(d.literal(), "atom 0.5 0.25; unif 1 2 0.5; exp 2 3 0.25");
  EXPECT_EQ(Distribution::parse(d.literal()).literal(), d.literal());
  EXPECT_THROW(Distribution::parse("unif 1 2 0.5"), std::invalid_argument);
  EXPECT_THROW(Distribution::parse("unif 2 1 1"), std::invalid_argument);
  EXPECT_THROW(Distribution::parse("atom -1 1"), std::invalid_argument);
  EXPECT_THROW(Distribution::parse("gamma 1 1"), std::invalid_argument);
  EXPECT_DOUBLE_EQ(d.mean(), 0.125 + 0.75 + 0.25 * 3.5);
}

TEST(Distribution, CdfQuantileRoundTrip) {
  auto d = Distribution::parse("atom 0.5 1/4; unif 1 2 1/4; unif 1.5 3 1/4; exp 1 4 1/4");
  for (double u = 0.01; u < 1; u += 0.01) {
    double x = d.quantile(u);
    EXPECT_GE(d.cdf(x) + 1e-9, u);
    EXPECT_LE(d.cdf_left(x) - 1e-9, u);
  }
  EXPECT_EQ(d.quantile(0.2), 0.5);
  auto e = Distribution::exponential(1);
  EXPECT_NEAR(e.quantile(0.5), std::log(2.0), 1e-12);
  EXPECT_NEAR(e.expected_min(1e9), 1.0, 1e-12);
}

TEST(Distribution, ExactCdfAndBorelMass) {
  auto d = Distribution::parse("atom 1 1/2; unif 0 2 1/2");
  EXPECT_EQ(*d.cdf_exact(1), Rational(3, 4));
  EXPECT_EQ(*d.cdf_left_exact(1), Rational(1, 4));
  auto A = BorelSet::parse("[0,0.5) {1}");
  EXPECT_NEAR(d.mass_of(A), 0.125 + 0.5, 1e-15);
  EXPECT_TRUE(A.contains(1));
  EXPECT_FALSE(A.contains(0.5));
  EXPECT_EQ(BorelSet::parse("[0,1) [0.5,2) {1.5} {3}").to_string(), "[0,2) {3}");
  EXPECT_TRUE(BorelSet::parse("empty").empty());
  EXPECT_THROW(BorelSet::parse("(0,1]"), std::invalid_argument);
}

TEST(Coupling, DiracGivesConstantWeights) {
  auto c = Coupling::quantile(Distribution::atom(1), Distribution::atom(1));
  auto g = path_graph(10);
  auto w = sample_weights(g, c, 3, 0);
  for (double x : w.w) EXPECT_EQ(x, 1.0);
  EXPECT_EQ(w.w, w.w_tilde);
}

TEST(Coupling, QuantileShift) {
  auto c = Coupling::quantile(Distribution::uniform(q("0.5"), q("1.5")), Distribution::uniform(0, 1));
  EXPECT_TRUE(c.pointwise_below());
  auto g = path_graph(200);
  auto w = sample_weights(g, c, 11, 4);
  for (std::size_t e = 0; e < w.w.size(); ++e) EXPECT_NEAR(w.w[e] - w.w_tilde[e], 0.5, 1e-12);
}

TEST(Coupling, KernelMarginalAndDrift) {
  auto c = spread_kernel();
  EXPECT_TRUE(same_law(c.nu_tilde(), Distribution::uniform(1, 2)));
  EXPECT_TRUE(c.certifies_martingale());
  EXPECT_FALSE(c.pointwise_below());
  // A wrong declaration is rejected.
  EXPECT_THROW(Coupling::kernel(Distribution::uniform(q("1.25"), q("1.75")), {{q("-0.25"), q("1/2")}, {q("0.3"), q("1/2")}},
                                Distribution::uniform(1, 2)),
               std::invalid_argument);
  EXPECT_THROW(Coupling::kernel(Distribution::uniform(0, 1), {{-1, 1}}), std::invalid_argument);
  auto g = path_graph(20001);
  auto w = sample_weights(g, c, 5, 0);
  std::vector<double> diff, tilde;
  for (std::size_t e = 0; e < w.w.size(); ++e) {
    diff.push_back(w.w_tilde[e] - w.w[e]);
    tilde.push_back(w.w_tilde[e]);
  }
  auto est = estimate_mean(diff);
  EXPECT_LT(std::abs(est.mean), 3 * est.se);
  auto t = estimate_mean(tilde);
  EXPECT_LT(std::abs(t.mean - 1.5), 3 * t.se);
}

TEST(Coupling, SubsetSamplingMatchesFull) {
  auto c = spread_kernel();
  auto g = path_graph(50);
  auto full = sample_weights(g, c, 9, 2);
  WeightConfig part{std::vector<double>(49, -1), std::vector<double>(49, -1)};
  std::vector<EdgeId> some{40, 3, 17};
  sample_weights_into(part, some, c, 9, 2);
  for (EdgeId e : some) {
    EXPECT_EQ(part.w[static_cast<std::size_t>(e)], full.w[static_cast<std::size_t>(e)]);
    EXPECT_EQ(part.w_tilde[static_cast<std::size_t>(e)], full.w_tilde[static_cast<std::size_t>(e)]);
  }
  EXPECT_EQ(part.w[0], -1);
}

TEST(Dijkstra, SmallExamples) {
  auto p = path_graph(4);
  std::vector<double> w{1.0, 2.0, 0.5};
  EXPECT_DOUBLE_EQ(passage_time_geodesic(p, w, 0, 3).time, 3.5);
  Graph::Builder b(4);
  b.add_edge(0, 1);  // route A
  b.add_edge(1, 2);
  b.add_edge(0, 3);  // route B
  b.add_edge(3, 2);
  auto c4 = std::move(b).build();
  std::vector<double> wc{1.0, 1.0, 0.4, 0.3};
  auto r = passage_time_geodesic(c4, wc, 0, 2);
  EXPECT_NEAR(r.time, 0.7, 1e-15);
  EXPECT_EQ(r.path.edges()[0], 2);
  EXPECT_FALSE(r.tie_broken);
  std::vector<double> tie{1, 1, 1, 1};
  auto t = passage_time_geodesic(c4, tie, 0, 2);
  EXPECT_TRUE(t.tie_broken);
  EXPECT_EQ(t.path.edges()[0], 0);
}

TEST(Dijkstra, FrontierTouch) {
  auto lat = build_lattice_ball(2, 6);
  const auto& g = lat.graph();
  std::vector<double> w(static_cast<std::size_t>(g.edge_count()), 10.0);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    auto [u, v] = g.endpoints(e);
    if (g.is_frontier(u) || g.is_frontier(v)) w[static_cast<std::size_t>(e)] = 0.01;
  }
  auto x = *lat.locate({-4, 0}), y = *lat.locate({4, 0});
  EXPECT_TRUE(passage_time_geodesic(g, w, x, y).touched_frontier);
  std::vector<double> flat(w.size(), 1.0);
  EXPECT_FALSE(passage_time_geodesic(g, flat, x, y).touched_frontier);
}

TEST(Dijkstra, MatchesBruteForceAndIsMonotone) {
  std::mt19937_64 rng(2024);
  auto c = spread_kernel();
  for (int trial = 0; trial < 200; ++trial) {
    int n = 4 + static_cast<int>(rng() % 9);
    auto g = random_graph(rng, n, static_cast<int>(rng() % 8));
    auto w = sample_weights(g, c, 77, static_cast<std::uint64_t>(trial));
    auto x = static_cast<VertexId>(rng() % static_cast<unsigned>(n));
    auto y = static_cast<VertexId>(rng() % static_cast<unsigned>(n));
    auto r = passage_time_geodesic(g, w.w, x, y);
    EXPECT_NEAR(r.time, brute_force_passage_time(g, w.w, x, y), 1e-9);
    EXPECT_TRUE(r.path.self_avoiding());
    double sum = 0;
    for (EdgeId e : r.path.edges()) sum += w.w[static_cast<std::size_t>(e)];
    EXPECT_NEAR(sum, r.time, 1e-12);
    auto bumped = w.w;
    bumped[rng() % bumped.size()] += 0.7;
    EXPECT_GE(passage_time_geodesic(g, bumped, x, y).time, r.time - 1e-12);
  }
}

TEST(Variability, SpreadPair) {
  auto nt = Distribution::uniform(1, 2), n = Distribution::uniform(q("1.25"), q("1.75"));
  EXPECT_DOUBLE_EQ(nt.expected_min(1.5), 1.375);
  EXPECT_DOUBLE_EQ(n.expected_min(1.5), 1.4375);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.05 * i);
  EXPECT_TRUE(is_more_variable(nt, n, grid).holds);
  EXPECT_TRUE(is_more_variable(n, n, grid).holds);
  auto bad = is_more_variable(Distribution::atom(q("1.5")), nt, grid);
  EXPECT_FALSE(bad.holds);
  ASSERT_TRUE(bad.witness);
  EXPECT_GT(Distribution::atom(q("1.5")).expected_min(*bad.witness), nt.expected_min(*bad.witness));
}

TEST(Constants, SpreadKernel) {
  auto t = derive_technical_constants(spread_kernel());
  EXPECT_EQ(t.a, Rational(1, 5));
  EXPECT_EQ(t.b, Rational(1, 2));
  EXPECT_EQ(t.y0, Rational(3, 2));
  EXPECT_LT(t.epsilon * t.y0, t.a);
  EXPECT_GT(t.g, 0);
  EXPECT_TRUE(t.bullet1);
  EXPECT_TRUE(t.bullet2);
  EXPECT_TRUE(t.bullet3);
  EXPECT_TRUE(t.I0.contains(1.5));
  auto dominated = Coupling::quantile(Distribution::uniform(1, 2), Distribution::uniform(0, 1));
  EXPECT_THROW(derive_technical_constants(dominated), ConstantsUnavailable);
}

TEST(FeasiblePairs, LatticeTreeAndEmpty) {
  auto lat = build_lattice_ball(2, 8);
  const auto& g = lat.graph();
  std::vector<double> w(static_cast<std::size_t>(g.edge_count()), 1.0);
  auto x = *lat.locate({-3, 0}), y = *lat.locate({3, 0});
  auto geo = passage_time_geodesic(g, w, x, y);
  std::vector<EdgeMask> regions;
  for (auto c : {Element{-2, 0}, Element{2, 0}}) {
    regions.push_back(induced_edges(g, ball(g, *lat.locate(c), 3).members));
  }
  FeasibleParams p;
  auto res = scan_feasible_pairs(g, w, geo, regions, p);
  for (const auto& r : res) {
    ASSERT_TRUE(r.pair);
    EXPECT_TRUE(is_feasible_pair(geo.path, *r.pair, w, p));
  }
  p.I0 = BorelSet{};
  for (const auto& r : scan_feasible_pairs(g, w, geo, regions, p)) EXPECT_FALSE(r.pair);

  auto tree = build_regular_tree(3, 5);
  const auto& tg = tree.graph();
  std::vector<double> tw(static_cast<std::size_t>(tg.edge_count()), 1.0);
  auto tgeo = passage_time_geodesic(tg, tw, 0, tg.vertex_count() - 1);
  std::vector<EdgeMask> all{EdgeMask{}};
  EXPECT_FALSE(scan_feasible_pairs(tg, tw, tgeo, all, FeasibleParams{}).front().pair);
}

TEST(EdgeMeasure, CountsAndFraction) {
  auto p = path_graph(5);
  std::vector<double> w{0.1, 0.45, 0.5, 0.9};
  auto geo = passage_time_geodesic(p, w, 0, 4);
  auto m = empirical_edge_measure(geo, w, BorelSet::interval(0.4, 0.6), 4);
  EXPECT_EQ(m.count, 2u);
  EXPECT_DOUBLE_EQ(m.fraction, 0.5);
  EXPECT_DOUBLE_EQ(empirical_edge_measure(geo, w, BorelSet::everything(), 4).fraction, 1.0);
  EXPECT_EQ(empirical_edge_measure(geo, w, BorelSet::point(0.3), 4).count, 0u);
}

TEST(EdgeMeasure, SinglePathExpectation) {
  auto p = path_graph(21);
  auto c = Coupling::quantile(Distribution::uniform(0, 1), Distribution::uniform(0, 1));
  std::vector<double> fr;
  for (std::uint64_t r = 0; r < 400; ++r) {
    auto w = sample_weights(p, c, 1, r);
    fr.push_back(empirical_edge_measure(passage_time_geodesic(p, w.w, 0, 20), w.w, BorelSet::interval(0, 0.5), 20).fraction);
  }
  auto e = estimate_mean(fr);
  EXPECT_LT(std::abs(e.mean - 0.5), 3 * e.se);
}

TEST(Resampling, ClosedForms) {
  EXPECT_EQ(resamplable_mass(Distribution::uniform(0, 1), q("0.1"), q("0.05")), q("0.95"));
  EXPECT_EQ(resamplable_mass(Distribution::atom(1), q("0.3"), 1), Rational(1));
  auto mix = Distribution::parse("atom 0 1/2; unif 1 2 1/2");
  // Points of [2 - 2η, 2) see too little mass ahead of them.
  EXPECT_EQ(resamplable_mass(mix, q("0.5"), q("1/1000000")), 1 - q("1/1000000"));
  // The mass increases to 1 as η decreases.
  Rational prev = 0;
  for (auto eta : {q("0.2"), q("0.1"), q("0.01"), q("0.0001")}) {
    auto m = resamplable_mass(Distribution::uniform(0, 1), q("0.25"), eta);
    EXPECT_GE(m, prev);
    prev = m;
  }
  EXPECT_EQ(prev, q("0.9999"));
}

TEST(Disjointify, Colourings) {
  std::vector<std::vector<EdgeId>> disjoint{{1, 2}, {3}, {4, 5}};
  auto c1 = disjointify(disjoint);
  EXPECT_EQ(*std::max_element(c1.begin(), c1.end()), 0);
  std::vector<std::vector<EdgeId>> chain{{1, 2}, {2, 3}, {3, 4}, {4, 5}};
  auto c2 = disjointify(chain);
  EXPECT_EQ(*std::max_element(c2.begin(), c2.end()), 1);
  std::vector<std::vector<EdgeId>> clique{{1, 2}, {1, 3}, {1, 4}, {1, 5}};
  auto c3 = disjointify(clique);
  EXPECT_EQ(*std::max_element(c3.begin(), c3.end()), 3);
}

TEST(Stats, WilsonAndFit) {
  auto iv = wilson_interval(0, 100);
  EXPECT_NEAR(iv.lo, 0, 1e-15);
  EXPECT_GT(iv.hi, 0);
  auto all = wilson_interval(50, 50);
  EXPECT_EQ(all.hi, 1);
  std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9}, w{1, 1, 1, 1};
  auto f = weighted_linear_fit(x, y, w);
  EXPECT_NEAR(f.slope, 2, 1e-12);
  EXPECT_NEAR(f.intercept, 1, 1e-12);
}

TEST(Rng, CounterUniformIsOpenAndStable) {
  EXPECT_EQ(counter_uniform(1, 2, 3, 0), counter_uniform(1, 2, 3, 0));
  EXPECT_NE(counter_uniform(1, 2, 3, 0), counter_uniform(1, 2, 3, 1));
  double s = 0;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    double u = counter_uniform(42, 0, i, 0);
    ASSERT_GT(u, 0);
    ASSERT_LT(u, 1);
    s += u;
  }
  EXPECT_NEAR(s / 100000, 0.5, 0.005);
}
