#include "fpplab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

#include "fpplab/detours.hpp"
#include "fpplab/fpp.hpp"
#include "fpplab/parallel.hpp"
#include "fpplab/rng.hpp"
#include "fpplab/stats.hpp"
#include "fpplab/tiling.hpp"

namespace fpplab {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "experiment",      "seed",          "replicates",      "distances",       "truncation",
      "margin",          "graph.family",  "graph.dimension", "graph.theta",     "graph.theta2",
      "graph.tree_degree", "graph.group", "graph.generators", "graph.reduced",  "graph.doubled",
      "graph.radius",    "graph.max_vertices", "nu",         "nu_tilde",        "coupling",
      "epsilon",         "C",             "budget",          "I0",              "A",
      "q",               "p",             "radii",           "tile_radius",     "sigma",
      "t_grid",          "target",        "contamination_threshold", "override_variability",
      "k_max",           "direction"};
  return keys;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> tokens(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError(fmt::format("config key '{}': {}", key, why));
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t salt) { return splitmix64(seed ^ splitmix64(salt)); }

std::string fmt_double(double x) { return fmt::format("{:.10g}", x); }

ReportRow row_from(const std::string& experiment, int d, const Estimate& e, double contamination) {
  return {experiment, d, e.mean, e.se, e.n, contamination};
}

Report start_report(const std::string& name, const ExperimentConfig& cfg) {
  Report r;
  r.experiment = name;
  r.config_echo = cfg.echo();
  r.record["schema"] = kReportSchema;
  r.record["experiment"] = name;
  nlohmann::json c = nlohmann::json::object();
  for (const auto& [k, v] : cfg.values()) c[k] = v;
  r.record["config"] = c;
  return r;
}

void finish_rows(Report& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"d", row.d}, {"estimate", row.estimate}, {"se", row.se}, {"n", row.n},
                    {"contamination", row.contamination}});
  }
  r.record["rows"] = rows;
  r.record["findings"] = r.lines;
  r.record["exit_code"] = r.exit_code;
}

std::vector<int> distances_of(const ExperimentConfig& cfg) {
  auto ds = cfg.int_list("distances", {10, 20, 30});
  if (ds.empty()) bad("distances", "empty schedule");
  for (int d : ds) {
    if (d < 1) bad("distances", "distances must be positive");
  }
  return ds;
}

}  // namespace

// ---------------------------------------------------------------- config

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto body = trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    if (cfg.has(key)) throw ConfigError(fmt::format("line {}: duplicate key '{}'", lineno, key));
    cfg.set(key, value);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
  values_[key] = value;
}

std::string ExperimentConfig::str(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::int64_t ExperimentConfig::integer(const std::string& key, std::int64_t fallback) const {
  if (!has(key)) return fallback;
  const auto& v = values_.at(key);
  std::size_t used = 0;
  try {
    auto x = std::stoll(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  bad(key, "expected an integer, got '" + v + "'");
}

double ExperimentConfig::real(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  return to_double(rational(key, Rational(0)));
}

Rational ExperimentConfig::rational(const std::string& key, const Rational& fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_rational(values_.at(key));
  } catch (const std::exception& e) {
    bad(key, e.what());
  }
}

bool ExperimentConfig::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = values_.at(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, "expected true or false");
}

std::vector<int> ExperimentConfig::int_list(const std::string& key, std::vector<int> fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  for (const auto& t : tokens(values_.at(key))) {
    try {
      std::size_t used = 0;
      int x = std::stoi(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      out.push_back(x);
    } catch (const std::exception&) {
      bad(key, "expected whitespace-separated integers");
    }
  }
  return out;
}

std::uint64_t ExperimentConfig::seed() const {
  if (!has("seed")) throw ConfigError("config key 'seed' is mandatory");
  const auto& v = values_.at("seed");
  try {
    std::size_t used = 0;
    auto s = std::stoull(v, &used);
    if (used == v.size() && v.front() != '-') return s;
  } catch (const std::exception&) {
  }
  bad("seed", "expected an unsigned 64-bit integer");
}

std::uint64_t ExperimentConfig::replicates(std::uint64_t fallback) const {
  auto n = integer("replicates", static_cast<std::int64_t>(fallback));
  if (n < 1) bad("replicates", "must be positive");
  return static_cast<std::uint64_t>(n);
}

GraphSpec ExperimentConfig::graph_spec() const {
  GraphSpec s;
  s.family = str("graph.family", s.family);
  s.dimension = static_cast<int>(integer("graph.dimension", s.dimension));
  s.theta = real("graph.theta", s.theta);
  s.theta2 = real("graph.theta2", s.theta2);
  s.tree_degree = static_cast<int>(integer("graph.tree_degree", s.tree_degree));
  s.group = str("graph.group");
  s.generators = str("graph.generators");
  s.reduced = flag("graph.reduced", s.reduced);
  s.doubled = flag("graph.doubled", s.doubled);
  s.radius = static_cast<int>(integer("graph.radius", s.radius));
  s.max_vertices = static_cast<std::size_t>(integer("graph.max_vertices", static_cast<std::int64_t>(s.max_vertices)));
  static const std::set<std::string> families{"lattice", "sector", "half_space", "regular_tree", "cayley"};
  if (!families.count(s.family)) bad("graph.family", "unknown family '" + s.family + "'");
  if (s.family == "cayley" && (s.group.empty() || s.generators.empty())) {
    bad("graph.group", "cayley graphs need graph.group and graph.generators");
  }
  return s;
}

Distribution ExperimentConfig::nu() const {
  if (!has("nu")) throw ConfigError("config key 'nu' is required for this experiment");
  try {
    return Distribution::parse(values_.at("nu"));
  } catch (const std::exception& e) {
    bad("nu", e.what());
  }
}

Distribution ExperimentConfig::nu_tilde() const {
  if (!has("nu_tilde")) throw ConfigError("config key 'nu_tilde' is required for this experiment");
  try {
    return Distribution::parse(values_.at("nu_tilde"));
  } catch (const std::exception& e) {
    bad("nu_tilde", e.what());
  }
}

Coupling ExperimentConfig::coupling() const {
  if (!has("coupling")) throw ConfigError("config key 'coupling' is required for this experiment");
  auto toks = tokens(values_.at("coupling"));
  for (auto& t : toks) {
    if (!t.empty() && t.back() == ';') t.pop_back();
  }
  toks.erase(std::remove(toks.begin(), toks.end(), std::string{}), toks.end());
  const std::string kind = toks.empty() ? "" : toks.front();
  try {
    if (kind == "quantile" && toks.size() == 1) return Coupling::quantile(nu(), nu_tilde());
    if (kind == "independent" && toks.size() == 1) return Coupling::independent(nu(), nu_tilde());
    if (kind == "kernel" && toks.size() >= 3 && toks.size() % 2 == 1) {
      std::vector<KernelShift> shifts;
      for (std::size_t i = 1; i < toks.size(); i += 2) {
        shifts.push_back({parse_rational(toks[i]), parse_rational(toks[i + 1])});
      }
      std::optional<Distribution> declared;
      if (has("nu_tilde")) declared = nu_tilde();
      return Coupling::kernel(nu(), shifts, declared);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    bad("coupling", e.what());
  }
  bad("coupling", "expected 'quantile', 'independent' or 'kernel <delta> <prob> ...'");
}

BorelSet ExperimentConfig::borel(const std::string& key) const {
  if (!has(key)) throw ConfigError("config key '" + key + "' is required for this experiment");
  try {
    return BorelSet::parse(values_.at(key));
  } catch (const std::exception& e) {
    bad(key, e.what());
  }
}

std::string ExperimentConfig::echo() const {
  std::string s;
  for (const auto& [k, v] : values_) s += k + " = " + v + "\n";
  return s;
}

// ---------------------------------------------------------------- instances

bool diagonal_direction(const ExperimentConfig& cfg) {
  auto dir = cfg.str("direction", "axis");
  if (dir != "axis" && dir != "diagonal") bad("direction", "expected axis or diagonal");
  return dir == "diagonal";
}

int truncation_radius(const ExperimentConfig& cfg, int d) {
  if (cfg.has("graph.radius")) return static_cast<int>(cfg.integer("graph.radius", 1));
  auto family = cfg.str("graph.family", "lattice");
  if (family == "regular_tree" || family == "cayley") {
    return (d + 1) / 2 + static_cast<int>(cfg.integer("margin", 2));
  }
  auto kappa = cfg.rational("truncation", Rational(3));
  return static_cast<int>(ceil_of(kappa * Rational(d)));
}

std::pair<VertexId, VertexId> place_pair(const BuiltGraph& b, int d, bool diagonal) {
  const int left = d / 2, right = d - d / 2;
  std::optional<VertexId> x, y;
  if (b.family == "regular_tree") {
    Element ex(static_cast<std::size_t>(left), 0), ey(static_cast<std::size_t>(right), 0);
    if (!ey.empty()) ey[0] = 1;
    x = b.locate(ex);
    y = b.locate(ey);
  } else if (b.cayley) {
    const auto& cb = *b.cayley;
    Word wx(static_cast<std::size_t>(left), cb.inverse_letter(0)), wy(static_cast<std::size_t>(right), 0);
    x = cb.find(cb.evaluate(wx));
    y = cb.find(cb.evaluate(wy));
  } else {
    const auto dim = b.label(b.basepoint).size();
    if (diagonal && dim < 2) throw ConfigError("direction = diagonal needs dimension >= 2");
    // Each half of the displacement goes along e1, or is split between e1 and e2.
    auto offset = [&](int len, int sign) {
      Element v(dim, 0);
      v[0] = sign * (diagonal ? (len + 1) / 2 : len);
      if (diagonal) v[1] = sign * (len / 2);
      return v;
    };
    x = b.locate(offset(left, -1));
    y = b.locate(offset(right, 1));
    if (!x) {  // one-sided families: start at the origin instead
      x = b.basepoint;
      y = b.locate(offset(d, 1));
    }
  }
  if (!x || !y) throw ConfigError(fmt::format("truncation radius {} is too small for distance {}", b.radius, d));
  auto dist = graph_distance(b.graph(), *x, *y);
  if (!dist || *dist != d) {
    throw ConfigError(fmt::format("placed pair has graph distance {} instead of {}", dist ? *dist : -1, d));
  }
  return {*x, *y};
}

PairInstance make_instance(const ExperimentConfig& cfg, int d) {
  auto spec = cfg.graph_spec();
  spec.radius = truncation_radius(cfg, d);
  PairInstance inst;
  try {
    inst.built = build_graph(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  auto [x, y] = place_pair(inst.built, d, diagonal_direction(cfg));
  inst.x = x;
  inst.y = y;
  inst.d = d;
  return inst;
}

BottleneckResult bottleneck_delta(const Graph& g, VertexId x, VertexId y, VertexId z) {
  auto dz = bfs_distances(g, z);
  const auto n = static_cast<std::size_t>(g.vertex_count());
  std::vector<char> seen(n);
  auto connected = [&](int delta, bool avoid_frontier) {
    auto removed = [&](VertexId v) {
      int d = dz[static_cast<std::size_t>(v)];
      return (d >= 0 && d <= delta) || (avoid_frontier && g.is_frontier(v));
    };
    if (removed(x) || removed(y)) return false;
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<VertexId> stack{x};
    seen[static_cast<std::size_t>(x)] = 1;
    while (!stack.empty()) {
      VertexId u = stack.back();
      stack.pop_back();
      if (u == y) return true;
      for (EdgeId e : g.incident(u)) {
        VertexId v = g.opposite(e, u);
        if (seen[static_cast<std::size_t>(v)] || removed(v)) continue;
        seen[static_cast<std::size_t>(v)] = 1;
        stack.push_back(v);
      }
    }
    return false;
  };
  BottleneckResult r;
  while (connected(r.delta, false)) ++r.delta;
  if (r.delta > 0) r.needed_frontier = !connected(r.delta - 1, true);
  return r;
}

// ---------------------------------------------------------------- experiments

Report run_build(const ExperimentConfig& cfg) {
  Report r = start_report("build", cfg);
  BuiltGraph b;
  try {
    b = build_graph(cfg.graph_spec());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto& g = b.graph();
  r.lines.push_back(fmt::format("family {} radius {}: {} vertices, {} edges, {} frontier vertices, max degree {}",
                                b.family, b.radius, g.vertex_count(), g.edge_count(), g.frontier().size(),
                                g.max_degree()));
  r.record["vertices"] = g.vertex_count();
  r.record["edges"] = g.edge_count();
  r.record["frontier"] = g.frontier().size();
  r.extra_files.emplace_back("graph.txt", graph_to_text(g));
  r.extra_files.emplace_back("vertices.txt", b.element_table());
  finish_rows(r);
  return r;
}

Report run_certification(const ExperimentConfig& cfg) {
  Report r = start_report("certify-detours", cfg);
  const auto eps = cfg.rational("epsilon", Rational(1));
  const int C = static_cast<int>(cfg.integer("C", 2));
  if (eps <= Rational(0) || C < 1) throw ConfigError("certification needs epsilon > 0 and C >= 1");
  const auto budget = static_cast<std::uint64_t>(cfg.integer("budget", static_cast<std::int64_t>(kDefaultSearchBudget)));
  auto spec = cfg.graph_spec();
  if (!cfg.has("graph.radius")) spec.radius = certification_margin(eps, C) + 1;
  BuiltGraph b;
  try {
    b = build_graph(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  auto cert = certify_admits_detours(b.graph(), eps, C, {b.basepoint}, budget);
  r.lines.push_back(fmt::format("outcome {} at epsilon {} C {} (margin {}, radius {})", to_string(cert.outcome),
                                to_string(eps), C, certification_margin(eps, C), spec.radius));
  r.lines.push_back(fmt::format("unique geodesics checked {}, non-unique targets {}, expansions {}",
                                cert.unique_geodesics, cert.non_unique_targets, cert.expansions));
  if (!cert.reason.empty()) r.lines.push_back("reason: " + cert.reason);
  if (cert.counterexample) r.lines.push_back("counterexample: " + format_path(*cert.counterexample));
  nlohmann::json witnesses = nlohmann::json::array();
  for (const auto& w : cert.witnesses) {
    witnesses.push_back({{"geodesic", format_path(w.geodesic)}, {"detour", format_path(w.detour)}});
  }
  r.record["outcome"] = to_string(cert.outcome);
  r.record["witnesses"] = witnesses;
  r.record["budget_hit"] = cert.budget_hit;
  if (cert.counterexample) r.record["counterexample"] = format_path(*cert.counterexample);
  r.rows.push_back({"certify-detours", C, cert.outcome == CertificateOutcome::Certified ? 1.0 : 0.0, 0.0,
                    cert.unique_geodesics, 0.0});
  if (cert.outcome == CertificateOutcome::Inconclusive) r.exit_code = cert.budget_hit ? 4 : 3;
  finish_rows(r);
  return r;
}

namespace {

struct PassageSample {
  double t = 0, t_tilde = 0;
  bool contaminated = false;
};

// Paired passage times for one distance; the w̃ layer is skipped when
// `paired` is false.
std::vector<PassageSample> passage_samples(const PairInstance& inst, const Coupling& coupling, bool paired,
                                           std::uint64_t N, std::uint64_t seed, unsigned threads) {
  const auto& g = inst.built.graph();
  const unsigned workers = std::max(1u, threads);
  // Geodesics are self-avoiding, so they stay in the blocks between x and y.
  const EdgeMask mask = relevant_edges(g, inst.x, inst.y);
  std::vector<DijkstraWorkspace> spaces(workers);
  std::vector<PassageSample> out(N);
  parallel_for(N, workers, [&](std::size_t rep, unsigned wk) {
    // Same draws as sample_weights_into, evaluated only where Dijkstra looks.
    auto layer = [&](bool tilde) {
      return [&, tilde](EdgeId e) {
        const auto idx = static_cast<std::uint64_t>(e);
        auto [w, wt] = coupling.draw(counter_uniform(seed, rep, idx, kStreamWeight),
                                     counter_uniform(seed, rep, idx, kStreamKernel));
        return tilde ? wt : w;
      };
    };
    auto a = passage_time_geodesic(g, layer(false), inst.x, inst.y, &mask, &spaces[wk]);
    out[rep].t = a.time;
    out[rep].contaminated = a.touched_frontier;
    if (paired) {
      auto b = passage_time_geodesic(g, layer(true), inst.x, inst.y, &mask, &spaces[wk]);
      out[rep].t_tilde = b.time;
      out[rep].contaminated = out[rep].contaminated || b.touched_frontier;
    }
  });
  return out;
}

double contamination_of(const std::vector<PassageSample>& s) {
  auto c = std::count_if(s.begin(), s.end(), [](const PassageSample& p) { return p.contaminated; });
  return s.empty() ? 0.0 : static_cast<double>(c) / static_cast<double>(s.size());
}

}  // namespace

Report run_gap_experiment(const ExperimentConfig& cfg, unsigned threads) {
  Report r = start_report("fpp-gap", cfg);
  auto coupling = cfg.coupling();
  std::vector<double> grid;
  for (const auto& t : tokens(cfg.str("t_grid"))) {
    try {
      grid.push_back(to_double(parse_rational(t)));
    } catch (const std::exception& e) {
      bad("t_grid", e.what());
    }
  }
  auto var = is_more_variable(coupling.nu_tilde(), coupling.nu(), grid);
  r.lines.push_back(fmt::format("variability check {}: E nu_tilde {} vs E nu {}", var.holds ? "passed" : "FAILED",
                                fmt_double(var.mean_tilde), fmt_double(var.mean)));
  r.record["variability"] = {{"holds", var.holds}, {"mean_tilde", var.mean_tilde}, {"mean", var.mean}};
  if (!var.holds && !cfg.flag("override_variability", false)) {
    throw ConfigError("nu_tilde is not more variable than nu; set override_variability = true to run anyway");
  }
  const auto N = cfg.replicates(1000);
  const double threshold = cfg.real("contamination_threshold", 0.01);
  nlohmann::json detail = nlohmann::json::array();
  for (int d : distances_of(cfg)) {
    auto inst = make_instance(cfg, d);
    auto samples = passage_samples(inst, coupling, true, N, derived_seed(cfg.seed(), static_cast<std::uint64_t>(d)), threads);
    std::vector<double> diff(N), t(N), tt(N);
    for (std::size_t i = 0; i < N; ++i) {
      diff[i] = (samples[i].t - samples[i].t_tilde) / d;
      t[i] = samples[i].t / d;
      tt[i] = samples[i].t_tilde / d;
    }
    auto e = estimate_mean(diff), et = estimate_mean(t), ett = estimate_mean(tt);
    double contamination = contamination_of(samples);
    r.rows.push_back(row_from("fpp-gap", d, e, contamination));
    r.lines.push_back(fmt::format("d {}: gap/d {} (se {}, {:.2f} se), E T/d {}, E T~/d {}, contamination {}", d,
                                  fmt_double(e.mean), fmt_double(e.se), e.se > 0 ? e.mean / e.se : 0.0,
                                  fmt_double(et.mean), fmt_double(ett.mean), fmt_double(contamination)));
    if (contamination > threshold) {
      r.lines.push_back(fmt::format("d {}: FLAGGED contamination {} exceeds {}", d, fmt_double(contamination),
                                    fmt_double(threshold)));
    }
    detail.push_back({{"d", d}, {"time", et.mean}, {"time_se", et.se}, {"time_tilde", ett.mean},
                      {"time_tilde_se", ett.se}, {"flagged", contamination > threshold}});
  }
  bool monotone = true;
  for (std::size_t i = 1; i < r.rows.size(); ++i) monotone = monotone && r.rows[i].estimate >= r.rows[i - 1].estimate;
  r.lines.push_back(std::string("gap/d non-decreasing over the schedule: ") + (monotone ? "yes" : "no"));
  r.record["per_distance"] = detail;
  finish_rows(r);
  return r;
}

Report run_time_constant(const ExperimentConfig& cfg, unsigned threads) {
  Report r = start_report("time-constant", cfg);
  auto nu = cfg.nu();
  auto coupling = Coupling::quantile(nu, nu);
  const auto N = cfg.replicates(1000);
  std::optional<double> target;
  if (cfg.has("target")) target = cfg.real("target", 0);
  for (int d : distances_of(cfg)) {
    auto inst = make_instance(cfg, d);
    auto samples = passage_samples(inst, coupling, false, N, derived_seed(cfg.seed(), static_cast<std::uint64_t>(d)), threads);
    std::vector<double> t(N);
    for (std::size_t i = 0; i < N; ++i) t[i] = samples[i].t / d;
    auto e = estimate_mean(t);
    double contamination = contamination_of(samples);
    r.rows.push_back(row_from("time-constant", d, e, contamination));
    std::string cmp;
    if (target) {
      double z = e.se > 0 ? (e.mean - *target) / e.se : (e.mean == *target ? 0.0 : INFINITY);
      cmp = fmt::format(", target {} at {:.2f} se", fmt_double(*target), z);
    }
    r.lines.push_back(fmt::format("d {}: E T/d {} (se {}){}, contamination {}", d, fmt_double(e.mean),
                                  fmt_double(e.se), cmp, fmt_double(contamination)));
  }
  if (target) r.record["target"] = *target;
  finish_rows(r);
  return r;
}

Report run_feasible_pair_census(const ExperimentConfig& cfg, unsigned threads) {
  Report r = start_report("feasible-pairs", cfg);
  auto nu = cfg.nu();
  FeasibleParams params;
  params.epsilon = cfg.rational("epsilon", Rational(1));
  params.C = static_cast<int>(cfg.integer("C", 2));
  params.budget = static_cast<std::uint64_t>(cfg.integer("budget", 2'000'000));
  const auto i0 = cfg.str("I0", "support");
  if (i0 == "support") {
    params.I0 = BorelSet::everything();
  } else if (i0 == "constants") {
    try {
      auto k = derive_technical_constants(cfg.coupling(), static_cast<int>(cfg.integer("k_max", 5)), cfg.seed());
      params.I0 = k.I0;
      r.lines.push_back(fmt::format("I0 from the coupling constants: {} (epsilon {}, a {}, b {})", k.I0.to_string(),
                                    to_string(k.epsilon), to_string(k.a), to_string(k.b)));
    } catch (const ConstantsUnavailable& e) {
      throw ConfigError(std::string("I0 = constants: ") + e.what());
    }
  } else {
    params.I0 = cfg.borel("I0");
  }
  const int R = static_cast<int>(cfg.integer("tile_radius", 4));
  const int region_radius = R + static_cast<int>(floor_of(Rational(params.C) * (2 + params.epsilon)));
  const auto N = cfg.replicates(20);
  auto coupling = Coupling::quantile(nu, nu);
  bool budget_hit = false;
  for (int d : distances_of(cfg)) {
    auto inst = make_instance(cfg, d);
    const auto& g = inst.built.graph();
    auto tiling = voronoi_tiles(g, r_separated_net(g, R, inst.built.basepoint), R,
                                static_cast<int>(cfg.integer("sigma", 3)));
    std::vector<EdgeMask> region_masks(tiling.tile_count());
    std::vector<std::vector<EdgeId>> region_edges(tiling.tile_count());
    for (std::size_t i = 0; i < tiling.tile_count(); ++i) {
      region_masks[i] = induced_edges(g, ball(g, tiling.centers[i], region_radius).members);
      for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (region_masks[i][static_cast<std::size_t>(e)]) region_edges[i].push_back(e);
      }
    }
    const auto seed = derived_seed(cfg.seed(), static_cast<std::uint64_t>(d));
    const unsigned workers = std::max(1u, threads);
    std::vector<WeightConfig> buf(workers);
    std::vector<DijkstraWorkspace> spaces(workers);
    std::vector<double> per_d(N), disjoint_per_d(N);
    std::vector<char> contaminated(N), hit(N);
    std::vector<EdgeId> all(static_cast<std::size_t>(g.edge_count()));
    for (std::size_t e = 0; e < all.size(); ++e) all[e] = static_cast<EdgeId>(e);
    parallel_for(N, workers, [&](std::size_t rep, unsigned wk) {
      auto& wc = buf[wk];
      wc.w.assign(all.size(), 0.0);
      wc.w_tilde.assign(all.size(), 0.0);
      sample_weights_into(wc, all, coupling, seed, rep);
      auto geo = passage_time_geodesic(g, wc.w, inst.x, inst.y, nullptr, &spaces[wk]);
      contaminated[rep] = geo.touched_frontier;
      std::vector<std::size_t> visited;
      for (VertexId v : geo.path.vertices()) visited.push_back(static_cast<std::size_t>(tiling.assignment[static_cast<std::size_t>(v)]));
      std::sort(visited.begin(), visited.end());
      visited.erase(std::unique(visited.begin(), visited.end()), visited.end());
      std::vector<EdgeMask> masks;
      std::vector<std::vector<EdgeId>> edges;
      for (auto i : visited) {
        masks.push_back(region_masks[i]);
        edges.push_back(region_edges[i]);
      }
      auto scans = scan_feasible_pairs(g, wc.w, geo, masks, params);
      auto colours = disjointify(edges);
      int count = 0;
      std::map<int, int> per_colour;
      for (std::size_t i = 0; i < scans.size(); ++i) {
        if (scans[i].budget_hit) hit[rep] = 1;
        if (!scans[i].pair) continue;
        ++count;
        ++per_colour[colours[i]];
      }
      int best = 0;
      for (const auto& [c, k] : per_colour) best = std::max(best, k);
      per_d[rep] = static_cast<double>(count) / d;
      disjoint_per_d[rep] = static_cast<double>(best) / d;
    });
    auto e = estimate_mean(per_d), ed = estimate_mean(disjoint_per_d);
    double contamination = static_cast<double>(std::count(contaminated.begin(), contaminated.end(), 1)) / static_cast<double>(N);
    budget_hit = budget_hit || std::count(hit.begin(), hit.end(), 1) > 0;
    r.rows.push_back(row_from("feasible-pairs", d, e, contamination));
    r.lines.push_back(fmt::format("d {}: regions with a feasible pair per unit distance {} (se {}), pairwise disjoint {} (se {})",
                                  d, fmt_double(e.mean), fmt_double(e.se), fmt_double(ed.mean), fmt_double(ed.se)));
  }
  if (budget_hit) {
    r.lines.push_back("enumeration budget exhausted in at least one region");
    r.exit_code = 4;
  }
  r.record["region_radius"] = region_radius;
  finish_rows(r);
  return r;
}

Report run_empirical_measure(const ExperimentConfig& cfg, unsigned threads) {
  Report r = start_report("empirical-measure", cfg);
  auto nu = cfg.nu();
  auto A = cfg.borel("A");
  auto coupling = Coupling::quantile(nu, nu);
  const auto N = cfg.replicates(1000);
  const double mass = nu.mass_of(A);
  r.lines.push_back(fmt::format("nu(A) = {}", fmt_double(mass)));
  for (int d : distances_of(cfg)) {
    auto inst = make_instance(cfg, d);
    const auto& g = inst.built.graph();
    const auto seed = derived_seed(cfg.seed(), static_cast<std::uint64_t>(d));
    const unsigned workers = std::max(1u, threads);
    const EdgeMask mask = relevant_edges(g, inst.x, inst.y);
    std::vector<std::vector<double>> buf(workers, std::vector<double>(static_cast<std::size_t>(g.edge_count()), 0.0));
    std::vector<DijkstraWorkspace> spaces(workers);
    std::vector<double> frac(N);
    std::vector<char> contaminated(N);
    parallel_for(N, workers, [&](std::size_t rep, unsigned wk) {
      auto weight = [&](EdgeId e) {
        const auto idx = static_cast<std::uint64_t>(e);
        return coupling.draw(counter_uniform(seed, rep, idx, kStreamWeight), counter_uniform(seed, rep, idx, kStreamKernel)).first;
      };
      auto geo = passage_time_geodesic(g, weight, inst.x, inst.y, &mask, &spaces[wk]);
      for (EdgeId e : geo.path.edges()) buf[wk][static_cast<std::size_t>(e)] = weight(e);
      frac[rep] = empirical_edge_measure(geo, buf[wk], A, d).fraction;
      contaminated[rep] = geo.touched_frontier;
    });
    auto e = estimate_mean(frac);
    double contamination = static_cast<double>(std::count(contaminated.begin(), contaminated.end(), 1)) / static_cast<double>(N);
    r.rows.push_back(row_from("empirical-measure", d, e, contamination));
    r.lines.push_back(fmt::format("d {}: geodesic edges in A per unit distance {} (se {}), contamination {}", d,
                                  fmt_double(e.mean), fmt_double(e.se), fmt_double(contamination)));
  }
  r.record["nu_A"] = mass;
  finish_rows(r);
  return r;
}

Report run_bottleneck_scan(const ExperimentConfig& cfg) {
  Report r = start_report("bottleneck", cfg);
  nlohmann::json detail = nlohmann::json::array();
  for (int d : distances_of(cfg)) {
    auto inst = make_instance(cfg, d);
    const auto& g = inst.built.graph();
    auto geo = lexicographic_geodesic(g, inst.x, inst.y, bfs_distances(g, inst.y));
    int worst = 0;
    std::uint64_t needed = 0;
    std::vector<int> deltas;
    for (VertexId z : geo.vertices()) {
      auto b = bottleneck_delta(g, inst.x, inst.y, z);
      deltas.push_back(b.delta);
      worst = std::max(worst, b.delta);
      needed += b.needed_frontier;
    }
    double contamination = static_cast<double>(needed) / static_cast<double>(deltas.size());
    r.rows.push_back({"bottleneck", d, static_cast<double>(worst), 0.0, deltas.size(), contamination});
    r.lines.push_back(fmt::format("d {}: max delta {} over {} geodesic vertices; bypass needed the frontier at {}",
                                  d, worst, deltas.size(), needed));
    detail.push_back({{"d", d}, {"deltas", deltas}});
  }
  r.record["per_distance"] = detail;
  finish_rows(r);
  return r;
}

Report run_percolation_scan(const ExperimentConfig& cfg, unsigned threads) {
  Report r = start_report("percolation-scan", cfg);
  const double p = cfg.real("p", 0.25);
  if (!(p >= 0 && p <= 1)) bad("p", "open probability must lie in [0, 1]");
  auto radii = cfg.int_list("radii", {5, 10, 15, 20});
  if (radii.empty()) bad("radii", "empty");
  auto spec = cfg.graph_spec();
  if (!cfg.has("graph.radius")) spec.radius = *std::max_element(radii.begin(), radii.end());
  BuiltGraph b;
  try {
    b = build_graph(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto N = cfg.replicates(100000);
  DecayResult res;
  try {
    res = estimate_connection_decay(b.graph(), b.basepoint, p, radii, N, cfg.seed(), threads);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (const auto& row : res.rows) {
    double se = std::sqrt(row.estimate * (1 - row.estimate) / static_cast<double>(row.n));
    r.rows.push_back({"percolation-scan", row.R, row.estimate, se, row.n, 0.0});
    r.lines.push_back(fmt::format("R {}: P(o <-> S(o,R)) {} in [{}, {}]", row.R, fmt_double(row.estimate),
                                  fmt_double(row.ci.lo), fmt_double(row.ci.hi)));
  }
  if (res.fit) {
    r.lines.push_back(fmt::format("log-linear slope {} (95% CI [{}, {}])", fmt_double(res.fit->slope),
                                  fmt_double(res.fit->slope_ci.lo), fmt_double(res.fit->slope_ci.hi)));
    r.record["slope"] = {{"estimate", res.fit->slope}, {"ci_lo", res.fit->slope_ci.lo}, {"ci_hi", res.fit->slope_ci.hi}};
  }
  r.extra_files.emplace_back("percolation.csv", decay_csv(res));
  finish_rows(r);
  return r;
}

Report run_cheap_passage(const ExperimentConfig& cfg, unsigned threads) {
  Report r = start_report("cheap-passage", cfg);
  auto nu = cfg.nu();
  const double q = cfg.real("q", 0.05);
  if (!(q > 0)) bad("q", "must be positive");
  auto ds = distances_of(cfg);
  auto inst = make_instance(cfg, *std::max_element(ds.begin(), ds.end()));
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (int d : ds) pairs.push_back(place_pair(inst.built, d, diagonal_direction(cfg)));
  const auto N = cfg.replicates(1000);
  auto res = estimate_cheap_passage_prob(inst.built.graph(), nu, q, pairs, N, cfg.seed(), threads);
  DecayResult csv;
  for (const auto& row : res.rows) {
    double est = row.best_estimate();
    double se = row.rare ? row.rare->se : std::sqrt(row.fraction * (1 - row.fraction) / static_cast<double>(row.n));
    r.rows.push_back({"cheap-passage", row.d, est, se, row.n, 0.0});
    std::string rare = row.rare ? fmt::format(", importance estimate {} (se {})", fmt_double(row.rare->mean),
                                              fmt_double(row.rare->se))
                                : std::string{};
    r.lines.push_back(fmt::format("d {}: plain fraction {} ({} of {}){}", row.d, fmt_double(row.fraction), row.hits,
                                  row.n, rare));
    DecayRow dr;
    dr.R = row.d;
    dr.n = row.n;
    dr.estimate = est;
    dr.ci = row.rare ? Interval{std::max(0.0, est - 1.959963984540054 * se), est + 1.959963984540054 * se} : row.ci;
    csv.rows.push_back(dr);
  }
  if (res.fit) {
    r.lines.push_back(fmt::format("log-linear slope in d {} (95% CI [{}, {}])", fmt_double(res.fit->slope),
                                  fmt_double(res.fit->slope_ci.lo), fmt_double(res.fit->slope_ci.hi)));
  }
  r.extra_files.emplace_back("decay.csv", decay_csv(csv));
  finish_rows(r);
  return r;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"build",      "certify-detours",  "fpp-gap",
                                              "time-constant", "feasible-pairs", "empirical-measure",
                                              "bottleneck", "percolation-scan", "cheap-passage"};
  return names;
}

Report run_experiment(const std::string& name, const ExperimentConfig& cfg, unsigned threads) {
  if (cfg.has("experiment") && cfg.str("experiment") != name) {
    throw ConfigError(fmt::format("config is for experiment '{}', not '{}'", cfg.str("experiment"), name));
  }
  cfg.seed();
  if (name == "build") return run_build(cfg);
  if (name == "certify-detours") return run_certification(cfg);
  if (name == "fpp-gap") return run_gap_experiment(cfg, threads);
  if (name == "time-constant") return run_time_constant(cfg, threads);
  if (name == "feasible-pairs") return run_feasible_pair_census(cfg, threads);
  if (name == "empirical-measure") return run_empirical_measure(cfg, threads);
  if (name == "bottleneck") return run_bottleneck_scan(cfg);
  if (name == "percolation-scan") return run_percolation_scan(cfg, threads);
  if (name == "cheap-passage") return run_cheap_passage(cfg, threads);
  throw ConfigError("unknown experiment '" + name + "'");
}

// ---------------------------------------------------------------- rendering

std::string render_text(const Report& r) {
  std::string s = fmt::format("{}\nexperiment: {}\n\n[config]\n{}\n[findings]\n", kReportSchema, r.experiment,
                              r.config_echo);
  for (const auto& l : r.lines) s += l + "\n";
  s += fmt::format("\nexit code {}\n", r.exit_code);
  return s;
}

std::string render_csv(const Report& r) {
  std::string s = "experiment, d, estimate, se, n, contamination\n";
  for (const auto& row : r.rows) {
    s += fmt::format("{}, {}, {}, {}, {}, {}\n", row.experiment, row.d, fmt_double(row.estimate), fmt_double(row.se),
                     row.n, fmt_double(row.contamination));
  }
  return s;
}

std::string render_record(const Report& r) { return r.record.dump(2) + "\n"; }

void write_report(const Report& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << body;
  };
  put("report.txt", render_text(r));
  put("report.csv", render_csv(r));
  put("report.json", render_record(r));
  for (const auto& [name, body] : r.extra_files) put(name, body);
}

}  // namespace fpplab
