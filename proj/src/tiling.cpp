#include "fpplab/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fpplab/parallel.hpp"
#include "fpplab/rng.hpp"

namespace fpplab {

namespace {

// Bounded BFS with reusable stamped buffers; visit(v, dist) for every vertex
// within `radius` (all of them when radius < 0), in BFS order.
class BoundedBfs {
 public:
  explicit BoundedBfs(std::size_t n) : stamp_(n, 0), dist_(n, 0) {}

  template <class Visit>
  void run(const Graph& g, VertexId source, int radius, Visit&& visit) {
    ++epoch_;
    queue_.clear();
    queue_.push_back(source);
    stamp_[static_cast<std::size_t>(source)] = epoch_;
    dist_[static_cast<std::size_t>(source)] = 0;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      VertexId u = queue_[head];
      int du = dist_[static_cast<std::size_t>(u)];
      visit(u, du);
      if (radius >= 0 && du >= radius) continue;
      for (EdgeId e : g.incident(u)) {
        VertexId v = g.opposite(e, u);
        auto vi = static_cast<std::size_t>(v);
        if (stamp_[vi] == epoch_) continue;
        stamp_[vi] = epoch_;
        dist_[vi] = du + 1;
        queue_.push_back(v);
      }
    }
  }

 private:
  std::vector<std::uint32_t> stamp_;
  std::vector<int> dist_;
  std::vector<VertexId> queue_;
  std::uint32_t epoch_ = 0;
};

bool is_bipartite(const Graph& g) {
  std::vector<int> side(static_cast<std::size_t>(g.vertex_count()), -1);
  std::vector<VertexId> stack;
  for (VertexId s = 0; s < g.vertex_count(); ++s) {
    if (side[static_cast<std::size_t>(s)] >= 0) continue;
    side[static_cast<std::size_t>(s)] = 0;
    stack.push_back(s);
    while (!stack.empty()) {
      VertexId u = stack.back();
      stack.pop_back();
      for (EdgeId e : g.incident(u)) {
        VertexId v = g.opposite(e, u);
        int want = 1 - side[static_cast<std::size_t>(u)];
        if (side[static_cast<std::size_t>(v)] < 0) {
          side[static_cast<std::size_t>(v)] = want;
          stack.push_back(v);
        } else if (side[static_cast<std::size_t>(v)] != want) {
          return false;
        }
      }
    }
  }
  return true;
}

// Weighted fit of log(estimate) on x over points with 0 < estimate < 1;
// weights are inverse delta-method variances of the log.
std::optional<LinearFit> log_fit(const std::vector<double>& xs, const std::vector<double>& est,
                                 const std::vector<double>& log_var) {
  std::vector<double> x, y, w;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(est[i] > 0) || !(log_var[i] > 0) || !std::isfinite(log_var[i])) continue;
    x.push_back(xs[i]);
    y.push_back(std::log(est[i]));
    w.push_back(1.0 / log_var[i]);
  }
  if (x.size() < 2) return std::nullopt;
  try {
    return weighted_linear_fit(x, y, w);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<VertexId> r_separated_net(const Graph& g, int R, VertexId basepoint) {
  if (R < 1) throw std::invalid_argument("r_separated_net needs R >= 1");
  if (!g.valid_vertex(basepoint)) throw std::invalid_argument("r_separated_net: bad basepoint");
  const auto n = static_cast<std::size_t>(g.vertex_count());
  auto dist = bfs_distances(g, basepoint);
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](VertexId v) {
    int d = dist[static_cast<std::size_t>(v)];
    return d < 0 ? std::numeric_limits<int>::max() : d;
  };
  std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) { return key(a) < key(b); });

  // covered[v]: some centre lies within R - 1 of v.
  std::vector<char> covered(n, 0);
  std::vector<VertexId> centers;
  BoundedBfs bfs(n);
  for (VertexId v : order) {
    if (covered[static_cast<std::size_t>(v)]) continue;
    centers.push_back(v);
    bfs.run(g, v, R - 1, [&](VertexId u, int) { covered[static_cast<std::size_t>(u)] = 1; });
  }
  return centers;
}

TilingAudit audit_tiling(const Graph& g, const VoronoiTiling& t) {
  TilingAudit a;
  const auto n = static_cast<std::size_t>(g.vertex_count());
  const auto k = t.centers.size();
  auto fail = [&](std::string msg) {
    if (a.failure.empty()) a.failure = std::move(msg);
  };

  a.partition = t.assignment.size() == n && t.center_distance.size() == n && k > 0;
  for (std::size_t v = 0; a.partition && v < n; ++v) {
    if (t.assignment[v] < 0 || static_cast<std::size_t>(t.assignment[v]) >= k) a.partition = false;
  }
  if (!a.partition) {
    fail("assignment is not a partition into the given tiles");
    return a;
  }

  std::vector<std::int32_t> center_index(n, -1);
  for (std::size_t i = 0; i < k; ++i) center_index[static_cast<std::size_t>(t.centers[i])] = static_cast<std::int32_t>(i);

  std::vector<std::vector<VertexId>> members(k);
  for (std::size_t v = 0; v < n; ++v) members[static_cast<std::size_t>(t.assignment[v])].push_back(static_cast<VertexId>(v));

  a.separation = a.coverage = a.within_ball = a.half_ball = true;
  std::vector<char> covered(n, 0);
  std::vector<int> dist_i(n, -1);
  const int half = t.R / 2 - 1;
  BoundedBfs bfs(n);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<VertexId> seen;
    bfs.run(g, t.centers[i], t.R, [&](VertexId u, int d) {
      auto ui = static_cast<std::size_t>(u);
      dist_i[ui] = d;
      seen.push_back(u);
      covered[ui] = 1;
      if (d < t.R && center_index[ui] >= 0 && static_cast<std::size_t>(center_index[ui]) != i) {
        a.separation = false;
        fail(fmt::format("centres {} and {} are closer than {}", i, center_index[ui], t.R));
      }
      if (d <= half && static_cast<std::size_t>(t.assignment[ui]) != i) {
        a.half_ball = false;
        fail(fmt::format("vertex {} at distance {} from centre {} belongs to tile {}", u, d, i, t.assignment[ui]));
      }
    });
    for (VertexId v : members[i]) {
      int d = dist_i[static_cast<std::size_t>(v)];
      if (d < 0 || d != t.center_distance[static_cast<std::size_t>(v)]) {
        a.within_ball = false;
        fail(fmt::format("vertex {} of tile {} is not within {} of its centre", v, i, t.R));
      }
    }
    for (VertexId u : seen) dist_i[static_cast<std::size_t>(u)] = -1;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!covered[v]) {
      a.coverage = false;
      fail(fmt::format("vertex {} is farther than {} from every centre", v, t.R));
      break;
    }
  }
  return a;
}

VoronoiTiling voronoi_tiles(const Graph& g, std::span<const VertexId> centers, int R, int sigma) {
  if (centers.empty()) throw std::invalid_argument("voronoi_tiles needs at least one centre");
  const auto n = static_cast<std::size_t>(g.vertex_count());
  VoronoiTiling t;
  t.R = R;
  t.sigma = sigma;
  t.centers.assign(centers.begin(), centers.end());
  t.assignment.assign(n, -1);
  t.center_distance.assign(n, -1);

  // Layered multi-source BFS. A vertex's owner is settled once its whole
  // parent layer has been scanned, so the minimum over parents is exact.
  std::vector<VertexId> layer, next;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    auto c = static_cast<std::size_t>(centers[i]);
    if (t.assignment[c] >= 0) throw std::invalid_argument("voronoi_tiles: repeated centre");
    t.assignment[c] = static_cast<std::int32_t>(i);
    t.center_distance[c] = 0;
    layer.push_back(centers[i]);
  }
  for (int d = 0; !layer.empty(); ++d) {
    next.clear();
    for (VertexId u : layer) {
      auto owner = t.assignment[static_cast<std::size_t>(u)];
      for (EdgeId e : g.incident(u)) {
        auto v = static_cast<std::size_t>(g.opposite(e, u));
        if (t.center_distance[v] < 0) {
          t.center_distance[v] = d + 1;
          t.assignment[v] = owner;
          next.push_back(static_cast<VertexId>(v));
        } else if (t.center_distance[v] == d + 1 && owner < t.assignment[v]) {
          t.assignment[v] = owner;
        }
      }
    }
    std::swap(layer, next);
  }

  auto audit = audit_tiling(g, t);
  if (!audit.ok()) throw std::logic_error("Voronoi tiling invariant violated: " + audit.failure);
  return t;
}

TileGraphs tile_graph_degrees(const Graph& g, const VoronoiTiling& t) {
  const auto k = t.centers.size();
  const auto n = static_cast<std::size_t>(g.vertex_count());
  TileGraphs out;
  out.adjacency.resize(k);
  out.enlarged_adjacency.resize(k);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto& ep = g.endpoints(e);
    auto a = t.assignment[static_cast<std::size_t>(ep.u)];
    auto b = t.assignment[static_cast<std::size_t>(ep.v)];
    if (a == b) continue;
    out.adjacency[static_cast<std::size_t>(a)].push_back(b);
    out.adjacency[static_cast<std::size_t>(b)].push_back(a);
  }

  std::vector<std::int32_t> center_index(n, -1);
  for (std::size_t i = 0; i < k; ++i) center_index[static_cast<std::size_t>(t.centers[i])] = static_cast<std::int32_t>(i);
  BoundedBfs bfs(n);
  for (std::size_t i = 0; i < k; ++i) {
    bfs.run(g, t.centers[i], 2 * t.sigma * t.R, [&](VertexId u, int) {
      auto j = center_index[static_cast<std::size_t>(u)];
      if (j >= 0 && static_cast<std::size_t>(j) != i) out.enlarged_adjacency[i].push_back(j);
    });
  }

  for (auto* adj : {&out.adjacency, &out.enlarged_adjacency}) {
    for (auto& row : *adj) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    out.max_degree = std::max(out.max_degree, static_cast<int>(out.adjacency[i].size()));
    out.max_enlarged_degree = std::max(out.max_enlarged_degree, static_cast<int>(out.enlarged_adjacency[i].size()));
  }
  return out;
}

int count_crossed_tiles(const Graph& g, const Path& path, const VoronoiTiling& t, std::span<const char> flags) {
  if (flags.size() != t.centers.size()) throw std::invalid_argument("count_crossed_tiles: one flag per tile");
  const int reach = t.sigma * t.R;
  auto from_start = bfs_distances(g, path.start(), reach);
  auto from_end = bfs_distances(g, path.end(), reach);
  std::vector<char> visited(t.centers.size(), 0);
  for (VertexId v : path.vertices()) visited[static_cast<std::size_t>(t.assignment[static_cast<std::size_t>(v)])] = 1;
  int count = 0;
  for (std::size_t i = 0; i < t.centers.size(); ++i) {
    auto o = static_cast<std::size_t>(t.centers[i]);
    if (visited[i] && flags[i] && from_start[o] < 0 && from_end[o] < 0) ++count;
  }
  return count;
}

DecayResult estimate_connection_decay(const Graph& g, VertexId basepoint, double p, std::span<const int> radii,
                                      std::uint64_t N, std::uint64_t seed, unsigned threads) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("open probability must lie in [0, 1]");
  if (radii.empty()) throw std::invalid_argument("estimate_connection_decay needs radii");
  const int rmax = *std::max_element(radii.begin(), radii.end());
  if (rmax < 0) throw std::invalid_argument("radii must be non-negative");
  auto dist = bfs_distances(g, basepoint, rmax);
  int reach = *std::max_element(dist.begin(), dist.end());
  if (reach < rmax) throw std::invalid_argument("graph does not contain the sphere of the largest radius");
  for (VertexId f : g.frontier()) {
    int d = dist[static_cast<std::size_t>(f)];
    if (d >= 0 && d < rmax) throw std::invalid_argument("truncation frontier lies inside the largest ball");
  }

  const auto n = static_cast<std::size_t>(g.vertex_count());
  const unsigned workers = std::max(1u, threads);
  std::vector<std::vector<std::uint32_t>> stamps(workers, std::vector<std::uint32_t>(n, 0));
  std::vector<std::vector<VertexId>> stacks(workers);
  std::vector<std::uint32_t> epochs(workers, 0);
  std::vector<int> max_reach(N, 0);

  parallel_for(N, workers, [&](std::size_t rep, unsigned w) {
    auto& stamp = stamps[w];
    auto& stack = stacks[w];
    auto epoch = ++epochs[w];
    stack.clear();
    stack.push_back(basepoint);
    stamp[static_cast<std::size_t>(basepoint)] = epoch;
    int best = 0;
    while (!stack.empty() && best < rmax) {
      VertexId u = stack.back();
      stack.pop_back();
      for (EdgeId e : g.incident(u)) {
        VertexId v = g.opposite(e, u);
        auto vi = static_cast<std::size_t>(v);
        if (stamp[vi] == epoch || dist[vi] < 0) continue;
        if (!(counter_uniform(seed, rep, static_cast<std::uint64_t>(e), kStreamPercolation) < p)) continue;
        stamp[vi] = epoch;
        best = std::max(best, dist[vi]);
        stack.push_back(v);
      }
    }
    max_reach[rep] = best;
  });

  DecayResult out;
  std::vector<double> xs, est, lv;
  for (int R : radii) {
    DecayRow row;
    row.R = R;
    row.n = N;
    row.hits = static_cast<std::uint64_t>(std::count_if(max_reach.begin(), max_reach.end(), [&](int m) { return m >= R; }));
    row.estimate = N ? static_cast<double>(row.hits) / static_cast<double>(N) : 0.0;
    row.ci = wilson_interval(row.hits, N);
    out.rows.push_back(row);
    xs.push_back(R);
    est.push_back(row.estimate);
    lv.push_back(row.hits ? (1 - row.estimate) / static_cast<double>(row.hits) : 0.0);
  }
  out.fit = log_fit(xs, est, lv);
  return out;
}

std::string decay_csv(const DecayResult& r) {
  std::string s = "R, estimate, ci_lo, ci_hi, N\n";
  for (const auto& row : r.rows) {
    s += fmt::format("{}, {:.6g}, {:.6g}, {:.6g}, {}\n", row.R, row.estimate, row.ci.lo, row.ci.hi, row.n);
  }
  return s;
}

long double irwin_hall_cdf(int n, long double t) {
  if (t <= 0) return 0;
  if (t >= n) return 1;
  long double sum = 0, binom = 1, fact = 1;
  for (int i = 2; i <= n; ++i) fact *= i;
  for (int k = 0; k <= static_cast<int>(std::floor(t)); ++k) {
    sum += (k % 2 ? -1 : 1) * binom * std::pow(t - k, static_cast<long double>(n));
    binom = binom * (n - k) / (k + 1);
  }
  return std::clamp(sum / fact, 0.0L, 1.0L);
}

namespace {

// Geodesic DAG from x to y with path counts; dag_out[u] lists edges u -> v.
struct GeodesicDag {
  int d = 0;
  std::vector<std::vector<EdgeId>> out, in;
  std::vector<long double> count;  // number of geodesics x -> v
};

GeodesicDag build_dag(const Graph& g, VertexId x, VertexId y) {
  GeodesicDag dag;
  auto dx = bfs_distances(g, x), dy = bfs_distances(g, y);
  dag.d = dx[static_cast<std::size_t>(y)];
  if (dag.d < 0) throw std::invalid_argument("pair is disconnected");
  const auto n = static_cast<std::size_t>(g.vertex_count());
  dag.out.resize(n);
  dag.in.resize(n);
  dag.count.assign(n, 0);
  std::vector<std::vector<VertexId>> layers(static_cast<std::size_t>(dag.d) + 1);
  for (std::size_t v = 0; v < n; ++v) {
    if (dx[v] >= 0 && dy[v] >= 0 && dx[v] + dy[v] == dag.d) layers[static_cast<std::size_t>(dx[v])].push_back(static_cast<VertexId>(v));
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    auto [u, v] = g.endpoints(e);
    for (int flip = 0; flip < 2; ++flip) {
      auto a = static_cast<std::size_t>(flip ? v : u), b = static_cast<std::size_t>(flip ? u : v);
      if (dx[a] >= 0 && dy[b] >= 0 && dx[a] + 1 + dy[b] == dag.d) {
        dag.out[a].push_back(e);
        dag.in[b].push_back(e);
      }
    }
  }
  dag.count[static_cast<std::size_t>(x)] = 1;
  for (const auto& layer : layers) {
    for (VertexId v : layer) {
      for (EdgeId e : dag.in[static_cast<std::size_t>(v)]) {
        dag.count[static_cast<std::size_t>(v)] += dag.count[static_cast<std::size_t>(g.opposite(e, v))];
      }
    }
  }
  return dag;
}

// Number of DAG paths u -> y with total scaled weight below `budget`.
double count_light_paths(const Graph& g, const GeodesicDag& dag, VertexId u, VertexId y, double budget,
                         const std::vector<double>& xw, std::uint64_t& nodes) {
  if (u == y) return 1;
  if (++nodes > 50'000'000) throw std::runtime_error("cheap-passage path count exceeded its node budget");
  double total = 0;
  for (EdgeId e : dag.out[static_cast<std::size_t>(u)]) {
    double rest = budget - xw[static_cast<std::size_t>(e)];
    if (rest > 0) total += count_light_paths(g, dag, g.opposite(e, u), y, rest, xw, nodes);
  }
  return total;
}

}  // namespace

CheapPassageResult estimate_cheap_passage_prob(const Graph& g, const Distribution& nu, double q,
                                               std::span<const std::pair<VertexId, VertexId>> pairs,
                                               std::uint64_t N, std::uint64_t seed, unsigned threads) {
  if (!(q > 0)) throw std::invalid_argument("cheap passage needs q > 0");
  CheapPassageResult out;
  out.q = q;
  out.inf = nu.inf_support();
  const unsigned workers = std::max(1u, threads);
  const bool single_uniform = nu.atoms().empty() && !nu.has_exp() && nu.uniforms().size() == 1;
  // Extra length of the shortest non-geodesic self-avoiding path: none in a
  // forest, at least 2 in a bipartite graph.
  int components = 0;
  {
    std::vector<char> seen(static_cast<std::size_t>(g.vertex_count()), 0);
    BoundedBfs bfs(seen.size());
    for (VertexId s = 0; s < g.vertex_count(); ++s) {
      if (seen[static_cast<std::size_t>(s)]) continue;
      ++components;
      bfs.run(g, s, -1, [&](VertexId u, int) { seen[static_cast<std::size_t>(u)] = 1; });
    }
  }
  const bool forest = g.edge_count() == g.vertex_count() - components;
  const double gap = forest ? std::numeric_limits<double>::infinity() : is_bipartite(g) ? 2 : 1;
  std::vector<DijkstraWorkspace> spaces(workers);

  std::vector<double> xs, est, lv;
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    auto [x, y] = pairs[pi];
    CheapPassageRow row;
    row.x = x;
    row.y = y;
    auto d = graph_distance(g, x, y);
    if (!d) throw std::invalid_argument("cheap passage pair is disconnected");
    row.d = *d;
    row.n = N;
    const double threshold = (out.inf + q) * row.d;

    // A path below the threshold has fewer than threshold/inf edges, so each
    // of its vertices v has d(x,v) + d(v,y) below that too.
    EdgeMask mask;
    std::vector<EdgeId> edges;
    if (out.inf > 0) {
      auto dx = bfs_distances(g, x), dy = bfs_distances(g, y);
      const double reach = threshold / out.inf;
      auto inside = [&](VertexId v) {
        auto i = static_cast<std::size_t>(v);
        return dx[i] >= 0 && dy[i] >= 0 && dx[i] + dy[i] < reach;
      };
      mask.assign(static_cast<std::size_t>(g.edge_count()), 0);
      for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (inside(g.endpoints(e).u) && inside(g.endpoints(e).v)) {
          mask[static_cast<std::size_t>(e)] = 1;
          edges.push_back(e);
        }
      }
    } else {
      edges.resize(static_cast<std::size_t>(g.edge_count()));
      std::iota(edges.begin(), edges.end(), 0);
    }
    std::vector<std::vector<double>> wbuf(workers, std::vector<double>(static_cast<std::size_t>(g.edge_count()), 0.0));
    std::vector<char> hit(N, 0);
    parallel_for(N, workers, [&](std::size_t rep, unsigned w) {
      auto& wt = wbuf[w];
      for (EdgeId e : edges) {
        wt[static_cast<std::size_t>(e)] = nu.quantile(counter_uniform(seed ^ (pi * 0x9e3779b97f4a7c15ULL), rep,
                                                                       static_cast<std::uint64_t>(e), kStreamWeight));
      }
      auto geo = passage_time_geodesic(g, wt, x, y, mask.empty() ? nullptr : &mask, &spaces[w]);
      hit[rep] = geo.time < threshold;
    });
    row.hits = static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), 1));
    row.fraction = N ? static_cast<double>(row.hits) / static_cast<double>(N) : 0.0;
    row.ci = wilson_interval(row.hits, N);

    if (single_uniform && out.inf > 0 && q * row.d <= out.inf * gap) {
      // Only geodesics can beat the threshold. Sample a geodesic uniformly,
      // its scaled weights from the conditional law given the event, the rest
      // from ν, and weight by K·p₁ / #(light geodesics). This is unbiased.
      const auto& u = nu.uniforms().front();
      const double width = to_double(u.hi - u.lo);
      const double t = q * row.d / width;
      auto dag = build_dag(g, x, y);
      const long double K = dag.count[static_cast<std::size_t>(y)];
      const long double p1 = irwin_hall_cdf(row.d, t);
      std::vector<double> ratio(N, 0.0);
      std::vector<std::vector<double>> xbuf(workers, std::vector<double>(static_cast<std::size_t>(g.edge_count()), 0.0));
      const std::uint64_t pseed = seed ^ (pi * 0x9e3779b97f4a7c15ULL);
      parallel_for(N, workers, [&](std::size_t rep, unsigned w) {
        auto& xw = xbuf[w];
        for (std::size_t v = 0; v < dag.out.size(); ++v) {
          for (EdgeId e : dag.out[v]) xw[static_cast<std::size_t>(e)] = counter_uniform(pseed, rep, static_cast<std::uint64_t>(e), kStreamRareWeight);
        }
        std::vector<EdgeId> chosen;
        VertexId v = y;
        for (std::uint64_t step = 0; v != x; ++step) {
          long double r = counter_uniform(pseed, rep, step, kStreamRarePath) * dag.count[static_cast<std::size_t>(v)];
          const auto& in = dag.in[static_cast<std::size_t>(v)];
          EdgeId pick = in.back();
          for (EdgeId e : in) {
            r -= dag.count[static_cast<std::size_t>(g.opposite(e, v))];
            if (r < 0) {
              pick = e;
              break;
            }
          }
          chosen.push_back(pick);
          v = g.opposite(pick, v);
        }
        // Uniform point of {s >= 0, Σs < t} ∩ [0,1]^d by normalized exponentials and rejection.
        const std::size_t m = chosen.size();
        std::vector<double> ex(m + 1);
        for (std::uint64_t attempt = 0;; ++attempt) {
          if (attempt > 100000) throw std::runtime_error("cheap-passage conditional sampler stalled");
          double total = 0;
          for (std::size_t i = 0; i <= m; ++i) {
            ex[i] = -std::log(counter_uniform(pseed, rep, attempt * (m + 1) + i, kStreamRareSimplex));
            total += ex[i];
          }
          bool ok = true;
          for (std::size_t i = 0; i < m; ++i) {
            ex[i] = t * ex[i] / total;
            if (ex[i] > 1) ok = false;
          }
          if (ok) break;
        }
        for (std::size_t i = 0; i < m; ++i) xw[static_cast<std::size_t>(chosen[i])] = ex[i];
        std::uint64_t nodes = 0;
        // The sampled geodesic is light by construction; max() guards rounding.
        double light = std::max(1.0, count_light_paths(g, dag, x, y, t, xw, nodes));
        ratio[rep] = static_cast<double>(K * p1 / static_cast<long double>(light));
      });
      row.rare = estimate_mean(ratio);
    }

    out.rows.push_back(row);
    xs.push_back(row.d);
    est.push_back(row.best_estimate());
    if (row.rare) {
      lv.push_back(row.rare->mean > 0 ? (row.rare->se * row.rare->se) / (row.rare->mean * row.rare->mean) : 0.0);
    } else {
      lv.push_back(row.hits ? (1 - row.fraction) / static_cast<double>(row.hits) : 0.0);
    }
  }
  out.fit = log_fit(xs, est, lv);
  return out;
}

}  // namespace fpplab
