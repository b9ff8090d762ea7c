#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpplab {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

/// Edge mask over edge ids; an empty mask means "all edges allowed".
using EdgeMask = std::vector<char>;

struct Endpoints {
  VertexId u = 0;
  VertexId v = 0;

  VertexId other(VertexId x) const { return x == u ? v : u; }
  bool contains(VertexId x) const { return x == u || x == v; }
};

/// Immutable locally finite multigraph. Parallel edges are allowed, self-loops
/// are not. Vertices and edges carry dense ids; incidence lists are sorted by
/// edge id so every traversal order is reproducible.
///
/// A truncation of an infinite graph carries a frontier: the vertices whose
/// neighbourhood in the ambient graph may be incomplete.
class Graph {
 public:
  class Builder {
   public:
    explicit Builder(std::int32_t vertex_count = 0) : vertex_count_(vertex_count) {}

    VertexId add_vertex() { return vertex_count_++; }
    std::int32_t vertex_count() const { return vertex_count_; }
    std::int32_t edge_count() const { return static_cast<std::int32_t>(edges_.size()); }

    /// Throws std::invalid_argument on self-loops or out-of-range endpoints.
    EdgeId add_edge(VertexId u, VertexId v);
    void mark_frontier(VertexId v);

    Graph build() &&;

   private:
    std::int32_t vertex_count_;
    std::vector<Endpoints> edges_;
    std::vector<VertexId> frontier_;
  };

  Graph() = default;

  std::int32_t vertex_count() const { return vertex_count_; }
  std::int32_t edge_count() const { return static_cast<std::int32_t>(edges_.size()); }

  const Endpoints& endpoints(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }
  VertexId opposite(EdgeId e, VertexId v) const { return endpoints(e).other(v); }

  std::span<const EdgeId> incident(VertexId v) const {
    auto b = offsets_[static_cast<std::size_t>(v)];
    auto e = offsets_[static_cast<std::size_t>(v) + 1];
    return {incidence_.data() + b, static_cast<std::size_t>(e - b)};
  }
  std::int32_t degree(VertexId v) const { return static_cast<std::int32_t>(incident(v).size()); }
  std::int32_t max_degree() const;

  bool is_frontier(VertexId v) const { return frontier_mask_[static_cast<std::size_t>(v)] != 0; }
  std::span<const VertexId> frontier() const { return frontier_; }

  bool valid_vertex(VertexId v) const { return v >= 0 && v < vertex_count_; }
  bool valid_edge(EdgeId e) const { return e >= 0 && e < edge_count(); }

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  std::int32_t vertex_count_ = 0;
  std::vector<Endpoints> edges_;
  std::vector<std::int64_t> offsets_{0};
  std::vector<EdgeId> incidence_;
  std::vector<VertexId> frontier_;
  std::vector<char> frontier_mask_;
};

bool is_connected(const Graph& g);

/// Walk of a start vertex followed by consecutive edges. Stores edge ids so
/// parallel edges stay distinguishable; the vertex sequence is derived once at
/// construction.
class Path {
 public:
  Path() = default;

  /// Throws std::invalid_argument when consecutive edges do not chain.
  static Path from_edges(const Graph& g, VertexId start, std::vector<EdgeId> edges);
  /// Follows the smallest-id edge between each consecutive vertex pair.
  static Path from_vertices(const Graph& g, std::span<const VertexId> vertices);
  static Path trivial(VertexId v);

  VertexId start() const { return vertices_.front(); }
  VertexId end() const { return vertices_.back(); }
  std::size_t length() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

  std::span<const EdgeId> edges() const { return edges_; }
  std::span<const VertexId> vertices() const { return vertices_; }

  bool self_avoiding() const;
  bool has_repeated_edges() const;
  /// Sorted distinct edge ids.
  std::vector<EdgeId> edge_set() const;

  /// Sub-walk covering edges [first, first + count).
  Path subpath(std::size_t first, std::size_t count) const;
  Path reversed() const;

  friend bool operator==(const Path& a, const Path& b) {
    return a.vertices_.front() == b.vertices_.front() && a.edges_ == b.edges_;
  }
  friend bool operator<(const Path& a, const Path& b);

 private:
  std::vector<EdgeId> edges_;
  std::vector<VertexId> vertices_{0};
};

std::string format_path(const Path& p);

struct BallView {
  VertexId center = 0;
  int radius = 0;
  std::vector<VertexId> members;  // ascending ids
  std::vector<VertexId> shell;    // ascending ids
  bool touches_frontier = false;
};

/// Hop distances from source; -1 marks unreachable (or beyond max_radius).
std::vector<int> bfs_distances(const Graph& g, VertexId source, int max_radius = -1,
                               const EdgeMask& mask = {});

/// BFS edge distance; std::nullopt when v is unreachable from u.
std::optional<int> graph_distance(const Graph& g, VertexId u, VertexId v);

/// B(x,R) and S(x,R). Throws std::invalid_argument for R < 0.
BallView ball(const Graph& g, VertexId x, int radius);

/// Mask of edges with both endpoints in `members` (ascending ids).
EdgeMask induced_edges(const Graph& g, std::span<const VertexId> members);

/// Raised when an enumeration exhausts its node-expansion budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::uint64_t expansions, std::uint64_t found)
      : std::runtime_error("path enumeration budget exceeded after " +
                           std::to_string(expansions) + " expansions (" + std::to_string(found) +
                           " paths found)"),
        expansions_(expansions),
        found_(found) {}

  std::uint64_t expansions() const { return expansions_; }
  std::uint64_t paths_found() const { return found_; }

 private:
  std::uint64_t expansions_;
  std::uint64_t found_;
};

struct EnumerationLimits {
  int max_len = 0;
  std::uint64_t budget = std::numeric_limits<std::uint64_t>::max();
  /// Optional restriction of the search to a subset of edges.
  const EdgeMask* mask = nullptr;
};

struct EnumerationStats {
  std::uint64_t expansions = 0;
  std::uint64_t paths = 0;
  bool stopped_early = false;
};

/// Visits the self-avoiding u->v paths of length <= max_len exactly once each,
/// in lexicographic order of their edge-id sequences. The visitor returns false
/// to stop. Throws BudgetExceeded when the expansion budget runs out.
EnumerationStats enumerate_self_avoiding_paths(const Graph& g, VertexId u, VertexId v,
                                               const EnumerationLimits& limits,
                                               const std::function<bool(const Path&)>& visit);

std::vector<Path> collect_self_avoiding_paths(const Graph& g, VertexId u, VertexId v, int max_len);

/// Chronological loop erasure.
Path loop_erase(const Graph& g, const Path& p);

struct PathSetSizes {
  std::size_t only_first = 0;   // |p \ q|
  std::size_t only_second = 0;  // |q \ p|
  std::size_t common = 0;       // |p ∩ q|
};

/// Edge-set cardinalities of two walks.
PathSetSizes path_set_difference_sizes(const Path& p, const Path& q);

struct GeodesicCount {
  std::uint64_t count = 0;
  bool saturated = false;
  int distance = -1;
  Path witness;
};

inline constexpr std::uint64_t kGeodesicCountCap = std::numeric_limits<std::uint64_t>::max();

/// Number of edge-geodesics from u to v (parallel edges counted separately),
/// saturating at cap. The witness is the geodesic with the smallest edge-id
/// sequence. Throws std::invalid_argument when v is unreachable.
GeodesicCount geodesic_count(const Graph& g, VertexId u, VertexId v,
                             std::uint64_t cap = kGeodesicCountCap);

/// Geodesic counts from u to every vertex within max_radius, computed in one
/// layered pass. Entries beyond the radius are zero.
struct GeodesicCounts {
  std::vector<int> distance;
  std::vector<std::uint64_t> count;
  std::vector<char> saturated;
};
GeodesicCounts geodesic_counts_from(const Graph& g, VertexId u, int max_radius,
                                    std::uint64_t cap = kGeodesicCountCap);

/// Smallest edge-id sequence among the geodesics u -> v given distances to v.
Path lexicographic_geodesic(const Graph& g, VertexId u, VertexId v,
                            std::span<const int> distance_to_v);

/// Edges that can lie on a self-avoiding x->y path: the union of the blocks
/// (biconnected components) on the block-cut tree path from x to y.
EdgeMask relevant_edges(const Graph& g, VertexId x, VertexId y);

/// Line-oriented text format: "vertices N", "edge <id> <u> <v>" per edge,
/// then an optional "frontier <v>..." line.
void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);
std::string graph_to_text(const Graph& g);
Graph graph_from_text(const std::string& text);

}  // namespace fpplab
