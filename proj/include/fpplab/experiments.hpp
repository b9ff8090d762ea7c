#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fpplab/builders.hpp"
#include "fpplab/distribution.hpp"
#include "fpplab/graph.hpp"
#include "fpplab/rational.hpp"

namespace fpplab {

inline constexpr const char* kReportSchema = "fpplab.report/1";

/// Malformed or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "key = value" lines; '#' starts a comment. Unknown keys are rejected.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string str(const std::string& key, const std::string& fallback = "") const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  double real(const std::string& key, double fallback) const;
  Rational rational(const std::string& key, const Rational& fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<int> int_list(const std::string& key, std::vector<int> fallback) const;

  /// Mandatory.
  std::uint64_t seed() const;
  std::uint64_t replicates(std::uint64_t fallback) const;
  GraphSpec graph_spec() const;
  Distribution nu() const;
  Distribution nu_tilde() const;
  Coupling coupling() const;
  BorelSet borel(const std::string& key) const;

  /// Canonical "key = value" lines in key order.
  std::string echo() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct ReportRow {
  std::string experiment;
  int d = 0;
  double estimate = 0;
  double se = 0;
  std::uint64_t n = 0;
  double contamination = 0;
};

struct Report {
  std::string experiment;
  std::string config_echo;
  std::vector<ReportRow> rows;
  std::vector<std::string> lines;  // human-readable findings
  nlohmann::json record = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> extra_files;  // name, contents
  int exit_code = 0;
};

/// A truncated graph with an (x, y) pair at graph distance d.
struct PairInstance {
  BuiltGraph built;
  VertexId x = 0, y = 0;
  int d = 0;
};

/// Truncation radius for distance d: κ·d for polynomial-growth families,
/// d/2 + margin for trees and Cayley balls; graph.radius overrides.
int truncation_radius(const ExperimentConfig& cfg, int d);

/// x = s^-⌊d/2⌋, y = s^⌈d/2⌉ along the first axis or generator s; on trees
/// two leaves of depth ⌊d/2⌋, ⌈d/2⌉ on different branches. `diagonal` splits
/// each lattice half-displacement between e1 and e2.
std::pair<VertexId, VertexId> place_pair(const BuiltGraph& b, int d, bool diagonal = false);
/// The "direction" key: axis (default) or diagonal.
bool diagonal_direction(const ExperimentConfig& cfg);
PairInstance make_instance(const ExperimentConfig& cfg, int d);

/// Least Δ such that removing B(z, Δ) separates x from y; a removed
/// endpoint counts as separated. `needed_frontier` reports whether the last
/// surviving bypass had to use frontier vertices.
struct BottleneckResult {
  int delta = 0;
  bool needed_frontier = false;
};
BottleneckResult bottleneck_delta(const Graph& g, VertexId x, VertexId y, VertexId z);

Report run_build(const ExperimentConfig& cfg);
Report run_certification(const ExperimentConfig& cfg);
Report run_gap_experiment(const ExperimentConfig& cfg, unsigned threads);
Report run_time_constant(const ExperimentConfig& cfg, unsigned threads);
Report run_feasible_pair_census(const ExperimentConfig& cfg, unsigned threads);
Report run_empirical_measure(const ExperimentConfig& cfg, unsigned threads);
Report run_bottleneck_scan(const ExperimentConfig& cfg);
Report run_percolation_scan(const ExperimentConfig& cfg, unsigned threads);
Report run_cheap_passage(const ExperimentConfig& cfg, unsigned threads);

/// Dispatch on the subcommand name. Throws ConfigError for unknown names or
/// when the config names a different experiment.
Report run_experiment(const std::string& name, const ExperimentConfig& cfg, unsigned threads);
const std::vector<std::string>& experiment_names();

std::string render_text(const Report& r);
std::string render_csv(const Report& r);
std::string render_record(const Report& r);
/// report.txt, report.csv, report.json and any extra files.
void write_report(const Report& r, const std::filesystem::path& dir);

}  // namespace fpplab
