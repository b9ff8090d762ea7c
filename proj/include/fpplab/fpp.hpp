#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpplab/detours.hpp"
#include "fpplab/distribution.hpp"
#include "fpplab/graph.hpp"
#include "fpplab/rational.hpp"

namespace fpplab {

/// Per-edge weights of both coupled layers, indexed by edge id.
struct WeightConfig {
  std::vector<double> w;
  std::vector<double> w_tilde;
};

/// Stream ids of the counter-based generator.
inline constexpr std::uint64_t kStreamWeight = 0;
inline constexpr std::uint64_t kStreamKernel = 1;

WeightConfig sample_weights(const Graph& g, const Coupling& coupling, std::uint64_t seed, std::uint64_t replicate);

/// Draws only the listed edges into `out`, which must already have one slot
/// per edge. Values agree with sample_weights on those edges.
void sample_weights_into(WeightConfig& out, std::span<const EdgeId> edges, const Coupling& coupling,
                         std::uint64_t seed, std::uint64_t replicate);

struct GeodesicResult {
  Path path;
  double time = 0;
  bool touched_frontier = false;
  bool tie_broken = false;
};

/// Reusable Dijkstra buffers; one per worker avoids O(V) clears per call.
class DijkstraWorkspace {
 public:
  void prepare(std::size_t vertices);

 private:
  friend GeodesicResult passage_time_geodesic(const Graph&, const std::function<double(EdgeId)>&, VertexId,
                                              VertexId, const EdgeMask*, DijkstraWorkspace*);
  std::vector<double> dist_;
  std::vector<EdgeId> pred_;
  std::vector<std::uint32_t> stamp_;
  std::vector<char> done_;
  std::uint32_t epoch_ = 0;
};

/// Least-time path by Dijkstra. On equal arrival times the smaller
/// predecessor edge id wins. Throws std::invalid_argument when y is unreachable.
GeodesicResult passage_time_geodesic(const Graph& g, std::span<const double> weights, VertexId x, VertexId y,
                                     const EdgeMask* mask = nullptr, DijkstraWorkspace* ws = nullptr);

/// Same search with weights computed on demand. Only edges the search
/// relaxes are evaluated, possibly more than once, so `weight` must be pure.
GeodesicResult passage_time_geodesic(const Graph& g, const std::function<double(EdgeId)>& weight, VertexId x,
                                     VertexId y, const EdgeMask* mask = nullptr, DijkstraWorkspace* ws = nullptr);

/// Brute-force minimum of T over all self-avoiding x→y paths. Small graphs only.
double brute_force_passage_time(const Graph& g, std::span<const double> weights, VertexId x, VertexId y);

struct VariabilityCheck {
  bool holds = false;
  double mean_tilde = 0, mean = 0;
  std::optional<double> witness;  // a t with E min(ν̃,t) > E min(ν,t)
  std::vector<double> grid;       // every t examined, ascending
};

/// E ν̃ <= E ν and E min(ν̃,t) <= E min(ν,t) at every t of `t_grid` and every
/// breakpoint of either law. A necessary battery for "ν̃ more variable than ν".
VariabilityCheck is_more_variable(const Distribution& nu_tilde, const Distribution& nu,
                                  std::span<const double> t_grid = {});

/// Constants of the technical lemma for a kernel coupling.
struct TechnicalConstants {
  Rational epsilon, a, b, g, delta0, y0;
  BorelSet I0;
  /// Bullet 3 checked at the extremes of I₀ and at sampled points for k = 1..k_max.
  bool bullet1 = false, bullet2 = false, bullet3 = false;
  int k_max = 5;
};

class ConstantsUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// a = (4/5)·max shift, b = P(shift > a), y₀ = centre of the first uniform
/// piece (first atom otherwise), ε = a/(2y₀), δ₀ = (a − εy₀)/(2(2+ε)),
/// g = half of a − (εy₀ + 2δ₀ + εδ₀), I₀ = [y₀ − δ₀/2, y₀ + δ₀/2).
/// Throws ConstantsUnavailable when P(w̃ > w) = 0 or the coupling is not a kernel.
TechnicalConstants derive_technical_constants(const Coupling& coupling, int k_max = 5, std::uint64_t seed = 1);

struct FeasiblePair {
  std::size_t alpha_first = 0;  // index of the first geodesic edge in α
  std::size_t alpha_length = 0;
  Path alpha;
  Path gamma;
  std::size_t region = 0;
};

struct RegionScan {
  std::optional<FeasiblePair> pair;
  bool budget_hit = false;
};

struct FeasibleParams {
  Rational epsilon{1};
  int C = 2;
  BorelSet I0 = BorelSet::everything();
  std::uint64_t budget = 2'000'000;
};

/// Independent re-check of the four defining conditions.
bool is_feasible_pair(const Path& geodesic, const FeasiblePair& fp, std::span<const double> w,
                      const FeasibleParams& params);

/// For each region (edge mask), the first feasible pair with α ⊆ region,
/// |α| <= C, γ inside the region and |γ| <= C(1+ε). Order: α start, then |α|,
/// then lexicographic γ.
std::vector<RegionScan> scan_feasible_pairs(const Graph& g, std::span<const double> w, const GeodesicResult& geo,
                                            std::span<const EdgeMask> regions, const FeasibleParams& params);

struct EdgeMeasure {
  std::size_t count = 0;
  double fraction = 0;  // count / d(x,y)
};

EdgeMeasure empirical_edge_measure(const GeodesicResult& geo, std::span<const double> w, const BorelSet& A,
                                   int graph_distance);

/// ν-measure of { p : ν([p, p+δ)) >= η }, exact for atom/uniform mixtures.
Rational resamplable_mass(const Distribution& nu, const Rational& delta, const Rational& eta);

/// Greedy colouring of the overlap graph in index order. Regions of one
/// colour are pairwise disjoint. Regions are sorted edge-id lists.
std::vector<int> disjointify(std::span<const std::vector<EdgeId>> regions);

}  // namespace fpplab
