#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fpplab/graph.hpp"
#include "fpplab/groups.hpp"

namespace fpplab {

/// Generating multiset S with its evaluation into the group.
struct GeneratorSpec {
  std::vector<std::string> symbols;
  std::vector<Element> images;
  bool reduced = false;
};

/// Parses "a b ab" or "a=(0,1) b=(2,1)" against a backend.
GeneratorSpec parse_generators(const GroupBackend& backend, std::string_view symbols, bool reduced);

/// One letter of the alphabet A used to walk the Cayley graph.
///  unreduced: A = S ⊔ S⁻¹, letter 2i is s_i and 2i+1 is s_i⁻¹.
///  reduced:   A = distinct elements of f(S) ∪ f(S)⁻¹ in order of first appearance.
struct Letter {
  Element value;
  std::string name;
  int symbol = 0;  // generator index the letter came from
  bool inverted = false;
};

using Word = std::vector<int>;

/// Induced subgraph of the Cayley graph on the ball B(1, L).
class CayleyBall {
 public:
  const Graph& graph() const { return graph_; }
  const GroupBackend& backend() const { return *backend_; }
  std::shared_ptr<const GroupBackend> backend_ptr() const { return backend_; }
  const std::vector<Letter>& alphabet() const { return alphabet_; }
  const GeneratorSpec& generators() const { return spec_; }
  int radius() const { return radius_; }
  /// True when the ball stopped growing before reaching the requested radius.
  bool stopped_growing() const { return stopped_growing_; }

  VertexId identity_vertex() const { return 0; }
  const Element& element(VertexId v) const { return elements_[static_cast<std::size_t>(v)]; }
  std::optional<VertexId> find(const Element& g) const;
  int depth(VertexId v) const { return depth_[static_cast<std::size_t>(v)]; }

  /// Edge used by letter `letter` out of v, or -1 when the step leaves the ball.
  EdgeId step_edge(VertexId v, int letter) const {
    return step_edge_[static_cast<std::size_t>(v) * alphabet_.size() + static_cast<std::size_t>(letter)];
  }
  /// The letter read when traversing e away from v.
  int letter_of(EdgeId e, VertexId from) const;

  Element evaluate(std::span<const int> word) const;
  /// Throws std::out_of_range when the walk leaves the ball.
  Path word_path(VertexId start, std::span<const int> word) const;
  Word path_word(const Path& p) const;

  /// Space separated letter names; "x^-1" is accepted for any letter x.
  Word parse_word(std::string_view text) const;
  std::string format_word(std::span<const int> word) const;
  int inverse_letter(int letter) const { return inverse_letter_[static_cast<std::size_t>(letter)]; }

  /// "vertex <id> element <canonical-string>" per vertex.
  std::string element_table() const;

 private:
  friend CayleyBall build_cayley_ball(std::shared_ptr<const GroupBackend>, const GeneratorSpec&, int,
                                      std::size_t);

  Graph graph_;
  std::shared_ptr<const GroupBackend> backend_;
  GeneratorSpec spec_;
  std::vector<Letter> alphabet_;
  std::vector<int> inverse_letter_;
  std::vector<Element> elements_;
  std::vector<int> depth_;
  std::unordered_map<Element, VertexId, ElementHash> index_;
  std::vector<EdgeId> step_edge_;
  // Per edge: the vertex it leaves from and the letter read in that direction.
  std::vector<VertexId> edge_tail_;
  std::vector<int> edge_letter_;
  int radius_ = 0;
  bool stopped_growing_ = false;
};

/// Thrown when a builder would exceed its vertex cap.
class SizeLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultVertexCap = 8'000'000;

/// Throws std::invalid_argument if a generator evaluates to the identity.
CayleyBall build_cayley_ball(std::shared_ptr<const GroupBackend> backend, const GeneratorSpec& gens, int radius,
                             std::size_t max_vertices = kDefaultVertexCap);

}  // namespace fpplab
