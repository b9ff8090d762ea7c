// fpplab command-line runner. Exit codes: 0 ok, 1 internal error, 2 config
// error, 3 inconclusive certificate, 4 budget exceeded.

#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <fmt/format.h>
#include <iostream>
#include <optional>
#include <string>

#include "fpplab/experiments.hpp"
#include "fpplab/graph.hpp"

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out = "out";
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-passage percolation laboratory"};
  app.require_subcommand(1);
  GlobalOptions opt;
  app.add_option("--config", opt.config, "Experiment config file")->check(CLI::ExistingFile);
  app.add_option("--seed", opt.seed, "Override the config seed");
  app.add_option("--threads", opt.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--out", opt.out, "Output directory");
  app.fallthrough();

  std::vector<CLI::App*> subs;
  for (const auto& name : fpplab::experiment_names()) subs.push_back(app.add_subcommand(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string name;
  for (auto* s : subs) {
    if (s->parsed()) name = s->get_name();
  }

  try {
    if (opt.config.empty()) throw fpplab::ConfigError("--config is required");
    auto cfg = fpplab::ExperimentConfig::load(opt.config);
    if (opt.seed) cfg.set("seed", std::to_string(*opt.seed));
    auto start = std::chrono::steady_clock::now();
    auto report = fpplab::run_experiment(name, cfg, opt.threads);
    fpplab::write_report(report, opt.out);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << fpplab::render_text(report);
    // Wall-clock stays out of the report files so they remain reproducible.
    std::cerr << fmt::format("{} finished in {:.2f} s; reports in {}\n", name, secs, opt.out);
    return report.exit_code;
  } catch (const fpplab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const fpplab::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
