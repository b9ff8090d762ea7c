#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpplab/distribution.hpp"
#include "fpplab/fpp.hpp"
#include "fpplab/graph.hpp"
#include "fpplab/stats.hpp"

namespace fpplab {

inline constexpr std::uint64_t kStreamPercolation = 2;
inline constexpr std::uint64_t kStreamRareWeight = 3;
inline constexpr std::uint64_t kStreamRarePath = 4;
inline constexpr std::uint64_t kStreamRareSimplex = 5;

struct VoronoiTiling {
  int R = 1;
  int sigma = 3;
  std::vector<VertexId> centers;          // in selection order
  std::vector<std::int32_t> assignment;   // vertex -> tile index
  std::vector<int> center_distance;       // d(v, centre of its tile)

  std::size_t tile_count() const { return centers.size(); }
};

/// Greedy maximal R-separated set: vertices are scanned in BFS order from
/// the basepoint (ties by vertex id) and kept when at distance >= R from
/// every centre kept so far. Throws std::invalid_argument for R < 1.
std::vector<VertexId> r_separated_net(const Graph& g, int R, VertexId basepoint);

struct TilingAudit {
  bool partition = false;
  bool separation = false;
  bool coverage = false;
  bool within_ball = false;  // tile i inside B(o_i, R)
  bool half_ball = false;    // B(o_i, R/2 - 1) inside tile i
  std::string failure;

  bool ok() const { return partition && separation && coverage && within_ball && half_ball; }
};

/// Recomputes every tiling invariant with one BFS per centre.
TilingAudit audit_tiling(const Graph& g, const VoronoiTiling& t);

/// Each vertex goes to the nearest centre, ties to the smaller index.
/// The result is audited; a failed audit throws std::logic_error.
VoronoiTiling voronoi_tiles(const Graph& g, std::span<const VertexId> centers, int R, int sigma = 3);

struct TileGraphs {
  std::vector<std::vector<std::int32_t>> adjacency;           // tiles joined by an edge
  std::vector<std::vector<std::int32_t>> enlarged_adjacency;  // B(o_i,ΣR) ∩ B(o_j,ΣR) ≠ ∅
  int max_degree = 0;
  int max_enlarged_degree = 0;
};

TileGraphs tile_graph_degrees(const Graph& g, const VoronoiTiling& t);

/// Tiles i with flags[i] that the path visits while both of its endpoints
/// lie outside B(o_i, ΣR).
int count_crossed_tiles(const Graph& g, const Path& path, const VoronoiTiling& t, std::span<const char> flags);

struct DecayRow {
  int R = 0;
  std::uint64_t hits = 0;
  std::uint64_t n = 0;
  double estimate = 0;
  Interval ci;
};

struct DecayResult {
  std::vector<DecayRow> rows;
  std::optional<LinearFit> fit;  // log estimate against R
};

/// Bernoulli(p) bond percolation: P(o connects to S(o,R)) for each radius,
/// all radii read off the same replicates. The graph must contain
/// B(o, max R) without frontier vertices strictly inside it.
DecayResult estimate_connection_decay(const Graph& g, VertexId basepoint, double p, std::span<const int> radii,
                                      std::uint64_t N, std::uint64_t seed, unsigned threads = 1);

/// "R, estimate, ci_lo, ci_hi, N" rows with a header line.
std::string decay_csv(const DecayResult& r);

struct CheapPassageRow {
  VertexId x = 0, y = 0;
  int d = 0;
  std::uint64_t hits = 0;
  std::uint64_t n = 0;
  double fraction = 0;
  Interval ci;
  /// Union-of-geodesics importance estimate of the same probability, when
  /// the threshold only admits geodesic paths and ν is one uniform piece.
  std::optional<Estimate> rare;

  double best_estimate() const { return rare ? rare->mean : fraction; }
};

struct CheapPassageResult {
  double q = 0;
  double inf = 0;
  std::vector<CheapPassageRow> rows;
  std::optional<LinearFit> fit;  // log best_estimate against d
};

/// Fraction of replicates with T(x,y) < (inf + q)·d(x,y), per pair.
CheapPassageResult estimate_cheap_passage_prob(const Graph& g, const Distribution& nu, double q,
                                               std::span<const std::pair<VertexId, VertexId>> pairs,
                                               std::uint64_t N, std::uint64_t seed, unsigned threads = 1);

/// P(U_1 + ... + U_n < t) for iid uniform[0,1].
long double irwin_hall_cdf(int n, long double t);

}  // namespace fpplab
