#include "fpplab/graph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>

namespace fpplab {

EdgeId Graph::Builder::add_edge(VertexId u, VertexId v) {
  if (u == v) throw std::invalid_argument("self-loops are not allowed (vertex " + std::to_string(u) + ")");
  if (u < 0 || v < 0 || u >= vertex_count_ || v >= vertex_count_) {
    throw std::invalid_argument("edge endpoint out of range");
  }
  edges_.push_back({u, v});
  return static_cast<EdgeId>(edges_.size() - 1);
}

void Graph::Builder::mark_frontier(VertexId v) {
  if (v < 0 || v >= vertex_count_) throw std::invalid_argument("frontier vertex out of range");
  frontier_.push_back(v);
}

Graph Graph::Builder::build() && {
  Graph g;
  g.vertex_count_ = vertex_count_;
  g.edges_ = std::move(edges_);
  const auto n = static_cast<std::size_t>(vertex_count_);
  std::vector<std::int64_t> deg(n + 1, 0);
  for (const auto& e : g.edges_) {
    ++deg[static_cast<std::size_t>(e.u) + 1];
    ++deg[static_cast<std::size_t>(e.v) + 1];
  }
  for (std::size_t i = 1; i <= n; ++i) deg[i] += deg[i - 1];
  g.offsets_ = deg;
  g.incidence_.assign(static_cast<std::size_t>(deg[n]), 0);
  auto fill = deg;
  for (std::size_t id = 0; id < g.edges_.size(); ++id) {
    const auto& e = g.edges_[id];
    g.incidence_[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.u)]++)] = static_cast<EdgeId>(id);
    g.incidence_[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.v)]++)] = static_cast<EdgeId>(id);
  }
  // Edge ids are appended in increasing order, so each incidence list is sorted.
  g.frontier_mask_.assign(n, 0);
  std::sort(frontier_.begin(), frontier_.end());
  frontier_.erase(std::unique(frontier_.begin(), frontier_.end()), frontier_.end());
  for (auto v : frontier_) g.frontier_mask_[static_cast<std::size_t>(v)] = 1;
  g.frontier_ = std::move(frontier_);
  return g;
}

std::int32_t Graph::max_degree() const {
  std::int32_t best = 0;
  for (VertexId v = 0; v < vertex_count_; ++v) best = std::max(best, degree(v));
  return best;
}

bool operator==(const Graph& a, const Graph& b) {
  if (a.vertex_count_ != b.vertex_count_ || a.edges_.size() != b.edges_.size()) return false;
  for (std::size_t i = 0; i < a.edges_.size(); ++i) {
    if (a.edges_[i].u != b.edges_[i].u || a.edges_[i].v != b.edges_[i].v) return false;
  }
  return a.frontier_ == b.frontier_;
}

bool is_connected(const Graph& g) {
  if (g.vertex_count() == 0) return true;
  auto d = bfs_distances(g, 0);
  return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

// ---------------------------------------------------------------- Path

Path Path::trivial(VertexId v) {
  Path p;
  p.vertices_ = {v};
  return p;
}

Path Path::from_edges(const Graph& g, VertexId start, std::vector<EdgeId> edges) {
  if (!g.valid_vertex(start)) throw std::invalid_argument("path start out of range");
  Path p;
  p.vertices_.clear();
  p.vertices_.reserve(edges.size() + 1);
  p.vertices_.push_back(start);
  VertexId cur = start;
  for (auto e : edges) {
    if (!g.valid_edge(e)) throw std::invalid_argument("path edge out of range");
    const auto& ep = g.endpoints(e);
    if (!ep.contains(cur)) {
      throw std::invalid_argument("edge " + std::to_string(e) + " is not incident to vertex " +
                                  std::to_string(cur));
    }
    cur = ep.other(cur);
    p.vertices_.push_back(cur);
  }
  p.edges_ = std::move(edges);
  return p;
}

Path Path::from_vertices(const Graph& g, std::span<const VertexId> vertices) {
  if (vertices.empty()) throw std::invalid_argument("empty vertex sequence");
  std::vector<EdgeId> edges;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    EdgeId found = -1;
    for (auto e : g.incident(vertices[i])) {
      if (g.opposite(e, vertices[i]) == vertices[i + 1]) {
        found = e;
        break;
      }
    }
    if (found < 0) throw std::invalid_argument("vertices are not adjacent");
    edges.push_back(found);
  }
  return from_edges(g, vertices.front(), std::move(edges));
}

bool Path::self_avoiding() const {
  std::vector<VertexId> vs(vertices_);
  std::sort(vs.begin(), vs.end());
  return std::adjacent_find(vs.begin(), vs.end()) == vs.end();
}

bool Path::has_repeated_edges() const {
  std::vector<EdgeId> es(edges_);
  std::sort(es.begin(), es.end());
  return std::adjacent_find(es.begin(), es.end()) != es.end();
}

std::vector<EdgeId> Path::edge_set() const {
  std::vector<EdgeId> es(edges_);
  std::sort(es.begin(), es.end());
  es.erase(std::unique(es.begin(), es.end()), es.end());
  return es;
}

Path Path::subpath(std::size_t first, std::size_t count) const {
  if (first + count > edges_.size()) throw std::out_of_range("subpath out of range");
  Path p;
  p.edges_.assign(edges_.begin() + static_cast<std::ptrdiff_t>(first),
                  edges_.begin() + static_cast<std::ptrdiff_t>(first + count));
  p.vertices_.assign(vertices_.begin() + static_cast<std::ptrdiff_t>(first),
                     vertices_.begin() + static_cast<std::ptrdiff_t>(first + count + 1));
  return p;
}

Path Path::reversed() const {
  Path p;
  p.edges_.assign(edges_.rbegin(), edges_.rend());
  p.vertices_.assign(vertices_.rbegin(), vertices_.rend());
  return p;
}

bool operator<(const Path& a, const Path& b) {
  if (a.start() != b.start()) return a.start() < b.start();
  return a.edges_ < b.edges_;
}

std::string format_path(const Path& p) {
  std::ostringstream os;
  os << "start " << p.start() << " edges";
  for (auto e : p.edges()) os << ' ' << e;
  return os.str();
}

// ---------------------------------------------------------------- metric

std::vector<int> bfs_distances(const Graph& g, VertexId source, int max_radius, const EdgeMask& mask) {
  std::vector<int> dist(static_cast<std::size_t>(g.vertex_count()), -1);
  std::vector<VertexId> queue;
  queue.reserve(static_cast<std::size_t>(g.vertex_count()));
  dist[static_cast<std::size_t>(source)] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    VertexId v = queue[head];
    int dv = dist[static_cast<std::size_t>(v)];
    if (max_radius >= 0 && dv >= max_radius) continue;
    for (auto e : g.incident(v)) {
      if (!mask.empty() && !mask[static_cast<std::size_t>(e)]) continue;
      VertexId w = g.opposite(e, v);
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dv + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

std::optional<int> graph_distance(const Graph& g, VertexId u, VertexId v) {
  if (!g.valid_vertex(u) || !g.valid_vertex(v)) throw std::invalid_argument("vertex out of range");
  if (u == v) return 0;
  int d = bfs_distances(g, u)[static_cast<std::size_t>(v)];
  if (d < 0) return std::nullopt;
  return d;
}

BallView ball(const Graph& g, VertexId x, int radius) {
  if (radius < 0) throw std::invalid_argument("ball radius must be non-negative");
  BallView b;
  b.center = x;
  b.radius = radius;
  auto dist = bfs_distances(g, x, radius);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    int d = dist[static_cast<std::size_t>(v)];
    if (d < 0) continue;
    b.members.push_back(v);
    if (d == radius) b.shell.push_back(v);
    if (g.is_frontier(v)) b.touches_frontier = true;
  }
  return b;
}

// ---------------------------------------------------------------- enumeration

EnumerationStats enumerate_self_avoiding_paths(const Graph& g, VertexId u, VertexId v,
                                               const EnumerationLimits& limits,
                                               const std::function<bool(const Path&)>& visit) {
  if (limits.max_len < 0) throw std::invalid_argument("max_len must be non-negative");
  EnumerationStats stats;
  const EdgeMask empty;
  const EdgeMask& mask = limits.mask ? *limits.mask : empty;
  // Distances to the target only prune branches that cannot reach v in time;
  // the visiting order is unaffected.
  auto to_target = bfs_distances(g, v, limits.max_len, mask);
  if (to_target[static_cast<std::size_t>(u)] < 0) return stats;
  if (u == v) {
    ++stats.paths;
    if (!visit(Path::trivial(u))) stats.stopped_early = true;
    return stats;
  }

  std::vector<char> on_path(static_cast<std::size_t>(g.vertex_count()), 0);
  std::vector<EdgeId> edges;
  struct Frame {
    VertexId vertex;
    std::size_t next;
  };
  std::vector<Frame> stack{{u, 0}};
  on_path[static_cast<std::size_t>(u)] = 1;

  while (!stack.empty()) {
    auto& frame = stack.back();
    auto inc = g.incident(frame.vertex);
    if (frame.next == inc.size()) {
      on_path[static_cast<std::size_t>(frame.vertex)] = 0;
      stack.pop_back();
      if (!edges.empty()) edges.pop_back();
      continue;
    }
    EdgeId e = inc[frame.next++];
    if (!mask.empty() && !mask[static_cast<std::size_t>(e)]) continue;
    VertexId w = g.opposite(e, frame.vertex);
    if (on_path[static_cast<std::size_t>(w)]) continue;
    int remaining = to_target[static_cast<std::size_t>(w)];
    if (remaining < 0 || static_cast<int>(edges.size()) + 1 + remaining > limits.max_len) continue;
    if (++stats.expansions > limits.budget) throw BudgetExceeded(stats.expansions - 1, stats.paths);
    if (w == v) {
      edges.push_back(e);
      ++stats.paths;
      bool keep_going = visit(Path::from_edges(g, u, edges));
      edges.pop_back();
      if (!keep_going) {
        stats.stopped_early = true;
        return stats;
      }
      continue;
    }
    edges.push_back(e);
    on_path[static_cast<std::size_t>(w)] = 1;
    stack.push_back({w, 0});
  }
  return stats;
}

std::vector<Path> collect_self_avoiding_paths(const Graph& g, VertexId u, VertexId v, int max_len) {
  std::vector<Path> out;
  enumerate_self_avoiding_paths(g, u, v, {.max_len = max_len}, [&](const Path& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

Path loop_erase(const Graph& g, const Path& p) {
  std::vector<EdgeId> kept;
  std::vector<VertexId> verts{p.start()};
  std::vector<std::int64_t> position(static_cast<std::size_t>(g.vertex_count()), -1);
  position[static_cast<std::size_t>(p.start())] = 0;
  auto vs = p.vertices();
  auto es = p.edges();
  for (std::size_t i = 0; i < es.size(); ++i) {
    VertexId w = vs[i + 1];
    auto pos = position[static_cast<std::size_t>(w)];
    if (pos >= 0) {
      // Erase the loop that returns to w.
      while (static_cast<std::int64_t>(verts.size()) > pos + 1) {
        position[static_cast<std::size_t>(verts.back())] = -1;
        verts.pop_back();
        kept.pop_back();
      }
    } else {
      kept.push_back(es[i]);
      verts.push_back(w);
      position[static_cast<std::size_t>(w)] = static_cast<std::int64_t>(verts.size()) - 1;
    }
  }
  return Path::from_edges(g, p.start(), std::move(kept));
}

PathSetSizes path_set_difference_sizes(const Path& p, const Path& q) {
  auto a = p.edge_set();
  auto b = q.edge_set();
  std::vector<EdgeId> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return {a.size() - common.size(), b.size() - common.size(), common.size()};
}

// ---------------------------------------------------------------- geodesics

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b, std::uint64_t cap, bool& saturated) {
  if (a >= cap || b >= cap || a > cap - b) {
    saturated = true;
    return cap;
  }
  return a + b;
}

}  // namespace

GeodesicCounts geodesic_counts_from(const Graph& g, VertexId u, int max_radius, std::uint64_t cap) {
  GeodesicCounts out;
  out.distance = bfs_distances(g, u, max_radius);
  const auto n = static_cast<std::size_t>(g.vertex_count());
  out.count.assign(n, 0);
  out.saturated.assign(n, 0);
  std::vector<VertexId> order;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (out.distance[static_cast<std::size_t>(v)] >= 0) order.push_back(v);
  }
  std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
    return out.distance[static_cast<std::size_t>(a)] < out.distance[static_cast<std::size_t>(b)];
  });
  out.count[static_cast<std::size_t>(u)] = 1;
  for (VertexId w : order) {
    int dw = out.distance[static_cast<std::size_t>(w)];
    if (dw == 0) continue;
    std::uint64_t c = 0;
    bool sat = false;
    for (auto e : g.incident(w)) {
      VertexId x = g.opposite(e, w);
      if (out.distance[static_cast<std::size_t>(x)] == dw - 1) {
        c = saturating_add(c, out.count[static_cast<std::size_t>(x)], cap, sat);
        if (out.saturated[static_cast<std::size_t>(x)]) sat = true;
      }
    }
    out.count[static_cast<std::size_t>(w)] = c;
    out.saturated[static_cast<std::size_t>(w)] = sat ? 1 : 0;
  }
  return out;
}

Path lexicographic_geodesic(const Graph& g, VertexId u, VertexId v, std::span<const int> distance_to_v) {
  int remaining = distance_to_v[static_cast<std::size_t>(u)];
  if (remaining < 0) throw std::invalid_argument("target unreachable");
  std::vector<EdgeId> edges;
  VertexId cur = u;
  while (cur != v) {
    EdgeId chosen = -1;
    for (auto e : g.incident(cur)) {
      if (distance_to_v[static_cast<std::size_t>(g.opposite(e, cur))] == remaining - 1) {
        chosen = e;
        break;
      }
    }
    edges.push_back(chosen);
    cur = g.opposite(chosen, cur);
    --remaining;
  }
  return Path::from_edges(g, u, std::move(edges));
}

GeodesicCount geodesic_count(const Graph& g, VertexId u, VertexId v, std::uint64_t cap) {
  auto to_v = bfs_distances(g, v);
  int d = to_v[static_cast<std::size_t>(u)];
  if (d < 0) throw std::invalid_argument("geodesic_count: vertices are not connected");
  auto counts = geodesic_counts_from(g, u, d, cap);
  GeodesicCount out;
  out.distance = d;
  out.count = counts.count[static_cast<std::size_t>(v)];
  out.saturated = counts.saturated[static_cast<std::size_t>(v)] != 0;
  out.witness = lexicographic_geodesic(g, u, v, to_v);
  return out;
}

// ---------------------------------------------------------------- blocks

EdgeMask relevant_edges(const Graph& g, VertexId x, VertexId y) {
  const auto n = static_cast<std::size_t>(g.vertex_count());
  EdgeMask mask(static_cast<std::size_t>(g.edge_count()), 0);
  if (x == y) return mask;

  // Iterative Tarjan over the component of x; blocks are edge sets.
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<int> block_of_edge(static_cast<std::size_t>(g.edge_count()), -1);
  std::vector<EdgeId> edge_stack;
  int timer = 0;
  int blocks = 0;
  struct Frame {
    VertexId v;
    EdgeId parent_edge;
    std::size_t next;
  };
  std::vector<Frame> stack{{x, -1, 0}};
  disc[static_cast<std::size_t>(x)] = low[static_cast<std::size_t>(x)] = timer++;
  while (!stack.empty()) {
    auto& f = stack.back();
    auto inc = g.incident(f.v);
    if (f.next < inc.size()) {
      EdgeId e = inc[f.next++];
      if (e == f.parent_edge) continue;
      VertexId w = g.opposite(e, f.v);
      auto wi = static_cast<std::size_t>(w);
      auto vi = static_cast<std::size_t>(f.v);
      if (disc[wi] < 0) {
        edge_stack.push_back(e);
        disc[wi] = low[wi] = timer++;
        stack.push_back({w, e, 0});
      } else if (disc[wi] < disc[vi]) {
        edge_stack.push_back(e);
        low[vi] = std::min(low[vi], disc[wi]);
      }
      continue;
    }
    Frame done = f;
    stack.pop_back();
    if (stack.empty()) break;
    auto& parent = stack.back();
    auto pi = static_cast<std::size_t>(parent.v);
    auto di = static_cast<std::size_t>(done.v);
    low[pi] = std::min(low[pi], low[di]);
    if (low[di] >= disc[pi]) {
      while (true) {
        EdgeId e = edge_stack.back();
        edge_stack.pop_back();
        block_of_edge[static_cast<std::size_t>(e)] = blocks;
        if (e == done.parent_edge) break;
      }
      ++blocks;
    }
  }
  if (disc[static_cast<std::size_t>(y)] < 0) return mask;

  // Bipartite vertex/block tree; nodes [0, n) are vertices, [n, n + blocks) blocks.
  std::vector<std::vector<int>> block_vertices(static_cast<std::size_t>(blocks));
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    int b = block_of_edge[static_cast<std::size_t>(e)];
    if (b < 0) continue;
    block_vertices[static_cast<std::size_t>(b)].push_back(g.endpoints(e).u);
    block_vertices[static_cast<std::size_t>(b)].push_back(g.endpoints(e).v);
  }
  std::vector<std::vector<int>> vertex_blocks(n);
  for (int b = 0; b < blocks; ++b) {
    auto& vs = block_vertices[static_cast<std::size_t>(b)];
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    for (int v : vs) vertex_blocks[static_cast<std::size_t>(v)].push_back(b);
  }
  const auto total = n + static_cast<std::size_t>(blocks);
  std::vector<int> parent(total, -2);
  std::deque<int> queue{x};
  parent[static_cast<std::size_t>(x)] = -1;
  while (!queue.empty()) {
    int node = queue.front();
    queue.pop_front();
    if (node == y) break;
    const auto& next = node < static_cast<int>(n) ? vertex_blocks[static_cast<std::size_t>(node)]
                                                   : block_vertices[static_cast<std::size_t>(node) - n];
    for (int m : next) {
      int id = node < static_cast<int>(n) ? m + static_cast<int>(n) : m;
      if (parent[static_cast<std::size_t>(id)] == -2) {
        parent[static_cast<std::size_t>(id)] = node;
        queue.push_back(id);
      }
    }
  }
  std::vector<char> on_route(static_cast<std::size_t>(blocks), 0);
  for (int node = y; node != -1; node = parent[static_cast<std::size_t>(node)]) {
    if (node >= static_cast<int>(n)) on_route[static_cast<std::size_t>(node) - n] = 1;
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    int b = block_of_edge[static_cast<std::size_t>(e)];
    if (b >= 0 && on_route[static_cast<std::size_t>(b)]) mask[static_cast<std::size_t>(e)] = 1;
  }
  return mask;
}

// ---------------------------------------------------------------- text format

void write_graph(std::ostream& out, const Graph& g) {
  out << "vertices " << g.vertex_count() << '\n';
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    out << "edge " << e << ' ' << g.endpoints(e).u << ' ' << g.endpoints(e).v << '\n';
  }
  if (!g.frontier().empty()) {
    out << "frontier";
    for (auto v : g.frontier()) out << ' ' << v;
    out << '\n';
  }
}

Graph read_graph(std::istream& in) {
  std::string line;
  std::optional<Graph::Builder> builder;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("graph text line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "vertices") {
      std::int32_t n = -1;
      if (builder || !(ls >> n) || n < 0) fail("bad vertices header");
      builder.emplace(n);
    } else if (tag == "edge") {
      if (!builder) fail("edge before vertices header");
      EdgeId id = -1;
      VertexId u = -1, v = -1;
      if (!(ls >> id >> u >> v)) fail("bad edge line");
      if (id != builder->edge_count()) fail("edge ids must be dense and ascending");
      builder->add_edge(u, v);
    } else if (tag == "frontier") {
      if (!builder) fail("frontier before vertices header");
      VertexId v = 0;
      while (ls >> v) builder->mark_frontier(v);
    } else {
      fail("unknown tag '" + tag + "'");
    }
  }
  if (!builder) fail("missing vertices header");
  return std::move(*builder).build();
}

std::string graph_to_text(const Graph& g) {
  std::ostringstream os;
  write_graph(os, g);
  return os.str();
}

Graph graph_from_text(const std::string& text) {
  std::istringstream is(text);
  return read_graph(is);
}

EdgeMask induced_edges(const Graph& g, std::span<const VertexId> members) {
  std::vector<char> in(static_cast<std::size_t>(g.vertex_count()), 0);
  for (VertexId v : members) in[static_cast<std::size_t>(v)] = 1;
  EdgeMask m(static_cast<std::size_t>(g.edge_count()), 0);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto& ep = g.endpoints(e);
    m[static_cast<std::size_t>(e)] = in[static_cast<std::size_t>(ep.u)] && in[static_cast<std::size_t>(ep.v)];
  }
  return m;
}

}  // namespace fpplab
