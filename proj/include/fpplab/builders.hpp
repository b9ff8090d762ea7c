#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fpplab/cayley.hpp"
#include "fpplab/graph.hpp"
#include "fpplab/groups.hpp"

namespace fpplab {

/// A finite truncation plus enough labelling to find vertices again.
/// Lattice-like families label vertices by coordinates, trees by the branch
/// sequence from the root, Cayley balls by group elements.
struct BuiltGraph {
  std::string family;
  Graph plain;
  std::shared_ptr<const CayleyBall> cayley;  // set for Cayley families
  VertexId basepoint = 0;
  int radius = 0;
  std::vector<Element> labels;
  std::unordered_map<Element, VertexId, ElementHash> index;

  const Graph& graph() const { return cayley && !doubled ? cayley->graph() : plain; }
  std::optional<VertexId> locate(const Element& label) const;
  const Element& label(VertexId v) const;
  std::string format_label(VertexId v) const;
  /// "vertex <id> element <label>" lines.
  std::string element_table() const;

  bool doubled = false;
};

/// Family descriptor read from the experiment config.
struct GraphSpec {
  std::string family = "lattice";  // lattice | sector | half_space | regular_tree | cayley
  int dimension = 2;
  double theta = 0.0;
  double theta2 = 0.0;
  int tree_degree = 3;
  std::string group;       // backend description, see make_backend
  std::string generators;  // space separated symbols
  bool reduced = false;
  bool doubled = false;
  int radius = 1;
  std::size_t max_vertices = kDefaultVertexCap;
};

BuiltGraph build_lattice_ball(int dimension, int radius, std::size_t max_vertices = kDefaultVertexCap);

/// Component of the origin in ℤ² ∩ {θ ≤ arg ≤ θ′} ∩ B(0, L) (ℓ¹ ball).
BuiltGraph build_sector(double theta, double theta2, int radius, std::size_t max_vertices = kDefaultVertexCap);

/// Sector with θ = 0, θ′ = π, i.e. the upper half plane.
BuiltGraph build_half_space(int radius, std::size_t max_vertices = kDefaultVertexCap);

/// k-regular tree rooted at vertex 0, truncated at depth L.
BuiltGraph build_regular_tree(int degree, int radius, std::size_t max_vertices = kDefaultVertexCap);

BuiltGraph build_cayley(std::shared_ptr<const GroupBackend> backend, const GeneratorSpec& gens, int radius,
                        std::size_t max_vertices = kDefaultVertexCap);

/// Adds one parallel twin per adjacent vertex pair. Original edges keep
/// their ids; twins follow in order of first occurrence.
Graph double_edges(const Graph& g);
BuiltGraph doubled(const BuiltGraph& inner);

BuiltGraph build_graph(const GraphSpec& spec);

}  // namespace fpplab
