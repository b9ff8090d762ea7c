#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpplab/cayley.hpp"
#include "fpplab/graph.hpp"
#include "fpplab/rational.hpp"

namespace fpplab {

/// |π'\π| <= (1+ε)|π\π'|, same endpoints, different edge sets. Exact arithmetic.
bool is_epsilon_detour(const Path& pi, const Path& detour, const Rational& epsilon);

/// Smallest ε for which `detour` qualifies, i.e. |π'\π|/|π\π'| - 1 (clamped at 0).
/// Empty when π\π' is empty (no ε works).
std::optional<Rational> tight_epsilon(const Path& pi, const Path& detour);

inline constexpr std::uint64_t kDefaultSearchBudget = 50'000'000;

struct DetourVerdict {
  Rational epsilon;
  std::optional<Path> detour;
  bool exhaustive = true;
  std::uint64_t expansions = 0;
};

/// Lexicographically first self-avoiding ε-detour of length <= |π| + ⌊ε|π|⌋.
DetourVerdict find_epsilon_detour(const Graph& g, const Path& pi, const Rational& epsilon,
                                  std::uint64_t budget = kDefaultSearchBudget, const EdgeMask* mask = nullptr);

enum class CertificateOutcome { Certified, Refuted, Inconclusive };
std::string to_string(CertificateOutcome o);

struct DetourWitness {
  Path geodesic;
  Path detour;
};

struct DetourCertificate {
  Rational epsilon;
  int C = 0;
  std::vector<VertexId> bases;
  CertificateOutcome outcome = CertificateOutcome::Inconclusive;
  std::vector<DetourWitness> witnesses;  // one per unique geodesic examined
  std::optional<Path> counterexample;
  std::string reason;
  std::uint64_t unique_geodesics = 0;
  std::uint64_t non_unique_targets = 0;
  std::uint64_t expansions = 0;
  bool budget_hit = false;
};

/// Frontier clearance a base needs so that every search stays exact.
int certification_margin(const Rational& epsilon, int C);

/// Checks every unique geodesic of length C that starts at a base. Stops at
/// the first refutation. Bases closer than certification_margin to the
/// frontier make the result inconclusive.
DetourCertificate certify_admits_detours(const Graph& g, const Rational& epsilon, int C,
                                         const std::vector<VertexId>& bases,
                                         std::uint64_t budget = kDefaultSearchBudget);

/// For π that is not a unique geodesic: a geodesic different from π, which
/// is a 0-detour. Throws std::invalid_argument if π is a unique geodesic.
Path loop_erase_detour(const Graph& g, const Path& pi);

// ---------------------------------------------------------------- constructions

class HypothesisViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The finite piece of a Cayley graph spanned by a few words read from the
/// identity. Edges are identified the way the Cayley graph identifies them,
/// so edge-set comparisons match the full graph.
class WordGraph {
 public:
  WordGraph(const CayleyBall& context, const std::vector<Word>& words);
  const Graph& graph() const { return graph_; }
  Path path(std::size_t i) const { return paths_[i]; }
  const Element& element(VertexId v) const { return elements_[static_cast<std::size_t>(v)]; }

 private:
  Graph graph_;
  std::vector<Element> elements_;
  std::vector<Path> paths_;
};

/// Output of an explicit detour construction, validated on construction.
struct Construction {
  std::string kind;
  Word original;
  Word detour;
  std::size_t only_original = 0;  // |π \ π'|
  std::size_t only_detour = 0;    // |π' \ π|
  std::int64_t length_increase = 0;
  Rational proven_increase;            // bound on |π'| - |π| from the argument
  Rational proven_difference;          // lower bound on |π \ π'| from the argument
  std::optional<Rational> proof_epsilon;  // proven_increase / proven_difference when the latter is > 0
  std::optional<Rational> tight;
  bool endpoints_match = false;
  bool bounds_hold = false;
  bool valid_at_proof_epsilon = false;
  bool self_avoiding = false;
  std::string note;

  /// Endpoints agree, the proven bounds hold, and the detour qualifies at
  /// the proof ε (or at the tight ε when the proof bound is vacuous).
  bool sound() const;
};

/// Cayley graph of ℤ: π' = s π s⁻¹ for the first letter s with s, s⁻¹ absent from π.
Construction z_detour(const CayleyBall& cb, const Word& pi);

/// ℤ/2 ∗ ℤ/2 with at least three distinct involutions in a reduced graph:
/// (ac) π (ca)^{±1} when π alternates two letters, otherwise (ab) π (ba)^{±1}.
Construction dihedral_detour(const CayleyBall& cb, const Word& pi);

/// Geodesic words to the conjugates of z (first entry is z itself with w).
struct ConjugationData {
  Element z;
  std::vector<std::pair<Element, Word>> conjugate_words;
};

struct ConjugationResult {
  bool factor_form = false;  // π contains a geodesic factor to a conjugate of z^{±1}
  std::size_t factor_position = 0;
  std::optional<Construction> construction;
};

/// w π (w^{ρ(π)})⁻¹ unless π contains a factor evaluating to a conjugate of z^{±1}.
ConjugationResult conjugation_detour(const CayleyBall& cb, const ConjugationData& data, const Word& pi);

/// π = η^M: α η^{M+r} α⁻¹ η^{-r}, with l the least power making ρ(η)^l central
/// and r the least non-negative shift making M + r divisible by l.
Construction power_case_detour(const CayleyBall& cb, const Word& eta, int M, const Word& alpha,
                               int max_power = 64);

/// Finite normal subgroup F (listed elements). Loop-erases π in Γ/F, keeps the
/// longest surviving run π', and splices γ₁ π' γ₂ back in. `cb` must contain
/// B(1, ℓ) with ℓ = max |f|.
Construction normal_subgroup_detour(const CayleyBall& cb, const std::vector<Element>& F, const Word& pi);

/// Geodesic word from the identity to g found by BFS inside the ball,
/// choosing the smallest letter at each step.
std::optional<Word> geodesic_word(const CayleyBall& cb, const Element& g);

/// Formal inverse a_n⁻¹ ... a_1⁻¹.
Word formal_inverse(const CayleyBall& cb, const Word& w);

}  // namespace fpplab
