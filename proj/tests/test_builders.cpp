#include "fpplab/builders.hpp"

#include <gtest/gtest.h>

#include <array>
#include <numbers>
#include <random>

using namespace fpplab;

namespace {

Element random_element(const GroupBackend& g, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(-4, 4);
  auto name = g.name();
  if (name.starts_with("zd")) {
    Element e = g.identity();
    for (auto& x : e) x = small(rng);
    return e;
  }
  if (name.starts_with("free")) {
    Element w;
    int len = std::uniform_int_distribution<int>(0, 8)(rng);
    int rank = static_cast<const FreeGroup&>(g).rank();
    for (int i = 0; i < len; ++i) {
      int l = std::uniform_int_distribution<int>(1, rank)(rng);
      w.push_back(rng() % 2 ? l : -l);
    }
    return g.canonical(w);
  }
  if (name == "dihedral") return {small(rng), static_cast<std::int64_t>(rng() % 2)};
  if (name == "heisenberg") return {small(rng), small(rng), small(rng)};
  if (name.starts_with("finite-by-lattice")) {
    auto& fb = static_cast<const FiniteByLattice&>(g);
    Element e = g.identity();
    e[0] = static_cast<std::int64_t>(rng() % static_cast<unsigned>(fb.fiber().order()));
    for (std::size_t i = 1; i < e.size(); ++i) e[i] = small(rng);
    return e;
  }
  if (name.starts_with("finite")) {
    return {static_cast<std::int64_t>(rng() % static_cast<unsigned>(static_cast<const FiniteGroup&>(g).order()))};
  }
  throw std::logic_error("no sampler for " + name);
}

using Mat = std::array<std::array<std::int64_t, 3>, 3>;

Mat heis_matrix(const Element& g) { return {{{1, g[0], g[2]}, {0, 1, g[1]}, {0, 0, 1}}}; }

Mat matmul(const Mat& a, const Mat& b) {
  Mat c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// S_3 as permutations of {0,1,2}, indexed in lexicographic order.
FiniteGroup symmetric3() {
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  std::vector<std::vector<int>> table(6, std::vector<int>(6));
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      std::array<int, 3> c{};
      for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];
      table[a][b] = static_cast<int>(std::find(perms.begin(), perms.end(), c) - perms.begin());
    }
  }
  return FiniteGroup(table);
}

}  // namespace

TEST(Groups, AlgebraLaws) {
  std::vector<std::shared_ptr<const GroupBackend>> backends{
      make_backend("zd 3"),  make_backend("free 2"), make_backend("dihedral"),
      make_backend("heisenberg"), make_backend("cyclic 5"), make_backend("finite-by-lattice 3 1 0,2,1"),
      std::make_shared<FiniteGroup>(symmetric3())};
  std::mt19937_64 rng(11);
  for (const auto& G : backends) {
    for (int i = 0; i < 1000; ++i) {
      auto a = random_element(*G, rng);
      auto b = random_element(*G, rng);
      auto c = random_element(*G, rng);
      ASSERT_EQ(G->multiply(G->multiply(a, b), c), G->multiply(a, G->multiply(b, c))) << G->name();
      ASSERT_EQ(G->multiply(a, G->inverse(a)), G->identity()) << G->name();
      ASSERT_EQ(G->multiply(G->inverse(a), a), G->identity()) << G->name();
      ASSERT_EQ(G->canonical(G->canonical(a)), G->canonical(a));
      ASSERT_EQ(G->parse(G->format(a)), a) << G->name() << " " << G->format(a);
    }
  }
}

TEST(Groups, FreeReduction) {
  FreeGroup F(2);
  EXPECT_EQ(F.canonical({1, 2, -2}), (Element{1}));
  EXPECT_EQ(F.parse("abB"), F.parse("a"));
  EXPECT_EQ(F.format(F.multiply(F.parse("ab"), F.parse("BA"))), "1");
}

TEST(Groups, HeisenbergMatchesMatrices) {
  Heisenberg H;
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> d(-20, 20);
  for (int i = 0; i < 100; ++i) {
    Element g{d(rng), d(rng), d(rng)}, h{d(rng), d(rng), d(rng)};
    EXPECT_EQ(heis_matrix(H.multiply(g, h)), matmul(heis_matrix(g), heis_matrix(h)));
  }
  // Commutator of the generators is the central z.
  Element x{1, 0, 0}, y{0, 1, 0};
  EXPECT_EQ(H.multiply(H.multiply(x, y), H.multiply(H.inverse(x), H.inverse(y))), (Element{0, 0, 1}));
}

TEST(Groups, DihedralNormalForm) {
  InfiniteDihedral D;
  Element a{0, 1}, b{1, 1};
  EXPECT_EQ(D.multiply(a, a), D.identity());
  EXPECT_EQ(D.multiply(a, b), (Element{-1, 0}));
  EXPECT_EQ(D.power(D.multiply(a, b), 3), (Element{-3, 0}));
}

TEST(Groups, SemidirectAction) {
  // ℤ/3 ⋊ ℤ with inversion: t f t^-1 = f^-1.
  auto G = make_backend("finite-by-lattice 3 1 0,2,1");
  Element t{0, 1}, f{1, 0};
  EXPECT_EQ(G->multiply(G->multiply(t, f), G->inverse(t)), (Element{2, 0}));
  EXPECT_THROW(make_backend("finite-by-lattice 3 1 0,1,1"), std::invalid_argument);
  EXPECT_THROW(FiniteGroup({{0, 1}, {1, 1}}), std::invalid_argument);
}

TEST(Groups, DirectProduct) {
  DirectProduct P(make_backend("free 2"), make_backend("zd 1"));
  auto g = P.parse("<ab|(3)>");
  EXPECT_EQ(P.format(g), "<ab|(3)>");
  EXPECT_EQ(P.multiply(g, P.inverse(g)), P.identity());
}

TEST(Lattice, SmallCounts) {
  auto l1 = build_lattice_ball(1, 3);
  EXPECT_EQ(l1.graph().vertex_count(), 7);
  EXPECT_EQ(l1.graph().edge_count(), 6);
  auto l22 = build_lattice_ball(2, 2);
  EXPECT_EQ(l22.graph().vertex_count(), 13);
  auto l21 = build_lattice_ball(2, 1);
  EXPECT_EQ(l21.graph().vertex_count(), 5);
  EXPECT_EQ(l21.graph().edge_count(), 4);
  EXPECT_THROW(build_lattice_ball(2, 0), std::invalid_argument);
  EXPECT_THROW(build_lattice_ball(2, 100, 1000), SizeLimitExceeded);
}

TEST(Lattice, FrontierIsSphere) {
  for (int d : {1, 2, 3}) {
    auto b = build_lattice_ball(d, 4);
    auto dist = bfs_distances(b.graph(), b.basepoint);
    for (VertexId v = 0; v < b.graph().vertex_count(); ++v) {
      std::int64_t l1 = 0;
      for (auto x : b.label(v)) l1 += std::abs(x);
      EXPECT_EQ(dist[v], l1);
      EXPECT_EQ(b.graph().is_frontier(v), l1 == 4);
      EXPECT_EQ(b.graph().degree(v) == 2 * d, l1 < 4);
    }
  }
}

TEST(Sector, Quadrant) {
  auto q = build_sector(0, std::numbers::pi / 2, 5);
  for (VertexId v = 0; v < q.graph().vertex_count(); ++v) {
    EXPECT_GE(q.label(v)[0], 0);
    EXPECT_GE(q.label(v)[1], 0);
  }
  EXPECT_EQ(q.graph().vertex_count(), 21);  // points with x,y >= 0 and x+y <= 5
}

TEST(Sector, FullTurnIsBall) {
  auto s = build_sector(0, 2 * std::numbers::pi, 6);
  auto b = build_lattice_ball(2, 6);
  ASSERT_EQ(s.graph().vertex_count(), b.graph().vertex_count());
  ASSERT_EQ(s.graph().edge_count(), b.graph().edge_count());
  for (VertexId v = 0; v < b.graph().vertex_count(); ++v) EXPECT_TRUE(s.locate(b.label(v)).has_value());
}

TEST(Sector, EighthPredicate) {
  auto s = build_sector(0, std::numbers::pi / 4, 4);
  int expected = 0;
  for (int x = -4; x <= 4; ++x) {
    for (int y = -4; y <= 4; ++y) {
      bool in = std::abs(x) + std::abs(y) <= 4 && 0 <= y && y <= x;
      expected += in;
      EXPECT_EQ(s.locate({x, y}).has_value(), in) << x << "," << y;
    }
  }
  EXPECT_EQ(s.graph().vertex_count(), expected);
}

TEST(Sector, FrontierHasMissingNeighbours) {
  auto h = build_half_space(5);
  for (VertexId v = 0; v < h.graph().vertex_count(); ++v) {
    auto l = h.label(v);
    EXPECT_EQ(h.graph().is_frontier(v), std::abs(l[0]) + std::abs(l[1]) == 5);
  }
}

TEST(Tree, Counts) {
  EXPECT_EQ(build_regular_tree(3, 1).graph().vertex_count(), 4);
  EXPECT_EQ(build_regular_tree(3, 2).graph().vertex_count(), 10);
  auto path = build_regular_tree(2, 5);
  EXPECT_EQ(path.graph().vertex_count(), 11);
  EXPECT_EQ(path.graph().max_degree(), 2);
  EXPECT_EQ(path.graph().frontier().size(), 2u);
}

TEST(Cayley, IntegersArePath) {
  auto Z = make_backend("zd 1");
  auto cb = build_cayley_ball(Z, parse_generators(*Z, "1", false), 3);
  EXPECT_EQ(cb.graph().vertex_count(), 7);
  EXPECT_EQ(cb.graph().edge_count(), 6);
  EXPECT_EQ(cb.graph().max_degree(), 2);
  EXPECT_EQ(cb.graph().frontier().size(), 2u);
}

TEST(Cayley, FigureOneBypasses) {
  auto F = make_backend("free 2");
  auto cb = build_cayley_ball(F, parse_generators(*F, "a b ab", true), 3);
  const auto& g = cb.graph();
  EXPECT_EQ(cb.alphabet().size(), 6u);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (cb.depth(v) < 3) EXPECT_EQ(g.degree(v), 6);
  }
  // Every edge between interior vertices lies on a triangle.
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    auto [u, v] = g.endpoints(e);
    if (cb.depth(u) == 3 || cb.depth(v) == 3) continue;
    auto paths = collect_self_avoiding_paths(g, u, v, 2);
    EXPECT_EQ(paths.size(), 2u);
    EXPECT_EQ(geodesic_count(g, u, v).count, 1u);
  }
  auto w = cb.parse_word("a b^-1 a b");
  auto p = cb.word_path(0, w);
  EXPECT_EQ(cb.path_word(p), w);
  EXPECT_EQ(F->format(cb.evaluate(w)), "aBab");
}

TEST(Cayley, DihedralReducedIsLine) {
  auto D = make_backend("dihedral");
  auto gens = parse_generators(*D, "a=(0,1) b=(1,1)", true);
  auto cb = build_cayley_ball(D, gens, 6);
  EXPECT_EQ(cb.graph().vertex_count(), 13);
  for (VertexId v = 0; v < cb.graph().vertex_count(); ++v) {
    if (!cb.graph().is_frontier(v)) EXPECT_EQ(cb.graph().degree(v), 2);
  }
  // Unreduced: order-2 generators give doubled edges.
  auto un = build_cayley_ball(D, parse_generators(*D, "a=(0,1) b=(1,1)", false), 6);
  EXPECT_EQ(un.graph().vertex_count(), 13);
  EXPECT_EQ(geodesic_count(un.graph(), 0, *un.find({0, 1})).count, 2u);
  // a·a returns along the twin edge; a·a^-1 backtracks along the same edge.
  auto twin = un.word_path(0, un.parse_word("a a"));
  EXPECT_NE(twin.edges()[0], twin.edges()[1]);
  EXPECT_EQ(twin.end(), 0);
  auto back = un.word_path(0, un.parse_word("a a^-1"));
  EXPECT_EQ(back.edges()[0], back.edges()[1]);
}

TEST(Cayley, RejectsIdentityGenerator) {
  auto Z = make_backend("zd 1");
  EXPECT_THROW(build_cayley_ball(Z, parse_generators(*Z, "0", false), 2), std::invalid_argument);
}

TEST(Cayley, FiniteGroupStopsGrowing) {
  auto C = make_backend("cyclic 4");
  auto cb = build_cayley_ball(C, parse_generators(*C, "1", true), 10);
  EXPECT_TRUE(cb.stopped_growing());
  EXPECT_EQ(cb.graph().vertex_count(), 4);
  EXPECT_EQ(cb.graph().edge_count(), 4);
  EXPECT_TRUE(cb.graph().frontier().empty());
}

TEST(Cayley, LeftTranslationIsAutomorphism) {
  struct Case {
    const char* group;
    const char* gens;
    bool reduced;
  };
  std::mt19937_64 rng(8);
  for (auto c : {Case{"free 2", "a b ab", true}, Case{"heisenberg", "x=(1,0,0) y=(0,1,0)", false},
                 Case{"dihedral", "a=(0,1) b=(2,1) c=(1,1)", true}, Case{"zd 2", "(1,0) (0,1)", false}}) {
    auto G = make_backend(c.group);
    auto cb = build_cayley_ball(G, parse_generators(*G, c.gens, c.reduced), 6);
    const int half = 3;
    auto center_ball = ball(cb.graph(), 0, half);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<VertexId> near;
      for (VertexId v : center_ball.members) near.push_back(v);
      VertexId h = near[rng() % near.size()];
      auto translated = ball(cb.graph(), h, half);
      ASSERT_EQ(translated.members.size(), center_ball.members.size()) << c.group;
      for (VertexId v : center_ball.members) {
        auto image = cb.find(G->multiply(cb.element(h), cb.element(v)));
        ASSERT_TRUE(image.has_value());
        for (std::size_t l = 0; l < cb.alphabet().size(); ++l) {
          if (cb.depth(v) >= half) continue;
          EdgeId e = cb.step_edge(v, static_cast<int>(l));
          EdgeId f = cb.step_edge(*image, static_cast<int>(l));
          ASSERT_GE(e, 0);
          ASSERT_GE(f, 0);
          EXPECT_EQ(*cb.find(G->multiply(cb.element(h), cb.element(cb.graph().opposite(e, v)))),
                    cb.graph().opposite(f, *image));
        }
      }
    }
  }
}

TEST(Doubling, Basics) {
  Graph::Builder b(2);
  b.add_edge(0, 1);
  auto one = std::move(b).build();
  auto twice = double_edges(one);
  EXPECT_EQ(twice.edge_count(), 2);
  auto lat = doubled(build_lattice_ball(2, 3));
  const auto& g = lat.graph();
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    EXPECT_EQ(geodesic_count(g, g.endpoints(e).u, g.endpoints(e).v).count, 2u);
  }
  EXPECT_EQ(g.frontier().size(), build_lattice_ball(2, 3).graph().frontier().size());
}

TEST(Build, FromSpec) {
  GraphSpec s;
  s.family = "cayley";
  s.group = "free 2";
  s.generators = "a b ab";
  s.reduced = true;
  s.radius = 2;
  auto g = build_graph(s);
  EXPECT_EQ(g.graph().degree(0), 6);
  EXPECT_NE(g.element_table().find("vertex 0 element 1\n"), std::string::npos);
  s.family = "bogus";
  EXPECT_THROW(build_graph(s), std::invalid_argument);
}
