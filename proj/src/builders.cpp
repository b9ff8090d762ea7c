#include "fpplab/builders.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fpplab {

std::optional<VertexId> BuiltGraph::locate(const Element& label) const {
  if (cayley && labels.empty()) return cayley->find(label);
  auto it = index.find(label);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

const Element& BuiltGraph::label(VertexId v) const {
  if (cayley && labels.empty()) return cayley->element(v);
  return labels[static_cast<std::size_t>(v)];
}

std::string BuiltGraph::format_label(VertexId v) const {
  if (cayley) return cayley->backend().format(label(v));
  std::string out = "(";
  const auto& l = label(v);
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(l[i]);
  }
  return out + ")";
}

std::string BuiltGraph::element_table() const {
  std::string out;
  for (VertexId v = 0; v < graph().vertex_count(); ++v) {
    out += "vertex " + std::to_string(v) + " element " + format_label(v) + "\n";
  }
  return out;
}

namespace {

// Induced subgraph of ℤ^d on the origin's component of {p : |p|_1 <= L and keep(p)}.
// Frontier: vertices with an admissible lattice neighbour that was cut off.
BuiltGraph lattice_region(const std::string& family, int d, int radius, std::size_t cap,
                          const std::function<bool(const Element&)>& keep) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (radius < 1) throw std::invalid_argument("truncation radius must be >= 1");
  BuiltGraph out;
  out.family = family;
  out.radius = radius;
  auto l1 = [](const Element& p) {
    std::int64_t s = 0;
    for (auto x : p) s += x < 0 ? -x : x;
    return s;
  };
  // BFS from the origin keeps exactly the origin's component.
  out.labels.push_back(Element(static_cast<std::size_t>(d), 0));
  out.index.emplace(out.labels.back(), 0);
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::vector<char> frontier{0};
  for (std::size_t head = 0; head < out.labels.size(); ++head) {
    for (int axis = 0; axis < d; ++axis) {
      for (int sign : {1, -1}) {
        Element q = out.labels[head];
        q[static_cast<std::size_t>(axis)] += sign;
        if (!keep(q)) continue;
        if (l1(q) > radius) {
          frontier[head] = 1;
          continue;
        }
        auto [it, fresh] = out.index.emplace(q, static_cast<VertexId>(out.labels.size()));
        if (fresh) {
          if (out.labels.size() >= cap) throw SizeLimitExceeded(family + " truncation exceeds vertex cap");
          out.labels.push_back(q);
          frontier.push_back(0);
        }
        // Each undirected edge once: from the endpoint discovered first.
        if (it->second > static_cast<VertexId>(head)) edges.emplace_back(static_cast<VertexId>(head), it->second);
      }
    }
  }
  Graph::Builder b(static_cast<std::int32_t>(out.labels.size()));
  for (auto [u, v] : edges) b.add_edge(u, v);
  for (std::size_t v = 0; v < frontier.size(); ++v) {
    if (frontier[v]) b.mark_frontier(static_cast<VertexId>(v));
  }
  out.plain = std::move(b).build();
  return out;
}

}  // namespace

BuiltGraph build_lattice_ball(int dimension, int radius, std::size_t max_vertices) {
  return lattice_region("lattice", dimension, radius, max_vertices, [](const Element&) { return true; });
}

BuiltGraph build_sector(double theta, double theta2, int radius, std::size_t max_vertices) {
  if (!(theta < theta2)) throw std::invalid_argument("sector needs theta < theta'");
  constexpr double tol = 1e-12;
  auto keep = [=](const Element& p) {
    if (p[0] == 0 && p[1] == 0) return true;
    double a = std::atan2(static_cast<double>(p[1]), static_cast<double>(p[0]));
    while (a < theta - tol) a += 2 * std::numbers::pi;
    return a <= theta2 + tol;
  };
  auto out = lattice_region("sector", 2, radius, max_vertices, keep);
  if (out.graph().vertex_count() <= 1) throw std::invalid_argument("sector contains no lattice edges near the origin");
  return out;
}

BuiltGraph build_half_space(int radius, std::size_t max_vertices) {
  auto out = build_sector(0.0, std::numbers::pi, radius, max_vertices);
  out.family = "half_space";
  return out;
}

BuiltGraph build_regular_tree(int degree, int radius, std::size_t max_vertices) {
  if (degree < 2) throw std::invalid_argument("tree degree must be >= 2");
  if (radius < 1) throw std::invalid_argument("truncation radius must be >= 1");
  BuiltGraph out;
  out.family = "regular_tree";
  out.radius = radius;
  out.labels.push_back({});
  out.index.emplace(Element{}, 0);
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::size_t layer_start = 0;
  for (int depth = 0; depth < radius; ++depth) {
    std::size_t layer_end = out.labels.size();
    for (std::size_t v = layer_start; v < layer_end; ++v) {
      int children = depth == 0 ? degree : degree - 1;
      for (int c = 0; c < children; ++c) {
        if (out.labels.size() >= max_vertices) throw SizeLimitExceeded("tree truncation exceeds vertex cap");
        Element l = out.labels[v];
        l.push_back(c);
        out.index.emplace(l, static_cast<VertexId>(out.labels.size()));
        edges.emplace_back(static_cast<VertexId>(v), static_cast<VertexId>(out.labels.size()));
        out.labels.push_back(std::move(l));
      }
    }
    layer_start = layer_end;
  }
  Graph::Builder b(static_cast<std::int32_t>(out.labels.size()));
  for (auto [u, v] : edges) b.add_edge(u, v);
  for (std::size_t v = layer_start; v < out.labels.size(); ++v) b.mark_frontier(static_cast<VertexId>(v));
  out.plain = std::move(b).build();
  return out;
}

BuiltGraph build_cayley(std::shared_ptr<const GroupBackend> backend, const GeneratorSpec& gens, int radius,
                        std::size_t max_vertices) {
  if (radius < 1) throw std::invalid_argument("truncation radius must be >= 1");
  BuiltGraph out;
  out.family = "cayley";
  out.radius = radius;
  out.cayley = std::make_shared<const CayleyBall>(build_cayley_ball(std::move(backend), gens, radius, max_vertices));
  return out;
}

Graph double_edges(const Graph& g) {
  Graph::Builder b(g.vertex_count());
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    b.add_edge(g.endpoints(e).u, g.endpoints(e).v);
  }
  // First occurrence of each unordered pair, in edge-id order.
  std::vector<char> seen_edge(static_cast<std::size_t>(g.edge_count()), 0);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (seen_edge[static_cast<std::size_t>(e)]) continue;
    auto [u, v] = g.endpoints(e);
    for (auto f : g.incident(u)) {
      if (g.opposite(f, u) == v) seen_edge[static_cast<std::size_t>(f)] = 1;
    }
    b.add_edge(u, v);
  }
  for (auto v : g.frontier()) b.mark_frontier(v);
  return std::move(b).build();
}

BuiltGraph doubled(const BuiltGraph& inner) {
  BuiltGraph out = inner;
  out.family = "doubled(" + inner.family + ")";
  out.plain = double_edges(inner.graph());
  out.doubled = true;
  if (inner.cayley && inner.labels.empty()) {
    for (VertexId v = 0; v < inner.graph().vertex_count(); ++v) {
      out.labels.push_back(inner.cayley->element(v));
      out.index.emplace(out.labels.back(), v);
    }
  }
  return out;
}

BuiltGraph build_graph(const GraphSpec& spec) {
  BuiltGraph g;
  if (spec.family == "lattice") {
    g = build_lattice_ball(spec.dimension, spec.radius, spec.max_vertices);
  } else if (spec.family == "sector") {
    g = build_sector(spec.theta, spec.theta2, spec.radius, spec.max_vertices);
  } else if (spec.family == "half_space") {
    g = build_half_space(spec.radius, spec.max_vertices);
  } else if (spec.family == "regular_tree") {
    g = build_regular_tree(spec.tree_degree, spec.radius, spec.max_vertices);
  } else if (spec.family == "cayley") {
    auto backend = make_backend(spec.group);
    g = build_cayley(backend, parse_generators(*backend, spec.generators, spec.reduced), spec.radius,
                     spec.max_vertices);
  } else {
    throw std::invalid_argument("unknown graph family '" + spec.family + "'");
  }
  return spec.doubled ? doubled(g) : g;
}

}  // namespace fpplab
