#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mcs/config.hpp"
#include "mcs/errors.hpp"
#include "mcs/experiment.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
};

mcs::ExperimentConfig load(const Overrides& o) {
  mcs::ExperimentConfig config = o.config.empty() ? mcs::ExperimentConfig{} : mcs::load_config(o.config);
  if (o.seed) config.run.seed = *o.seed;
  if (o.out) config.run.output = *o.out;
  if (o.threads) config.run.threads = *o.threads;
  return config;
}

int execute(const mcs::ExperimentConfig& config) {
  config.validate();
  const auto result = mcs::run_experiment(config, config.run.threads);
  for (const auto& notice : result.notices) std::cerr << "notice: " << notice << '\n';
  mcs::write_experiment(config.run.output, config, result);
  std::cout << "wrote " << result.records.size() << " rows to "
            << (std::filesystem::path(config.run.output) / "runs.csv").string() << '\n';
  return 0;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Base seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicular mining-cluster offloading simulator"};
  app.require_subcommand(1);

  Overrides run_opts;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("--config", run_opts.config, "Config file")->required()->check(CLI::ExistingFile);
  add_common(run, run_opts);

  Overrides sweep_opts;
  std::string sweep_var;
  std::vector<double> grid;
  auto* sweep = app.add_subcommand("sweep", "Sweep one variable over a grid");
  sweep->add_option("--config", sweep_opts.config, "Config file (defaults if omitted)")
      ->check(CLI::ExistingFile);
  sweep->add_option("--var", sweep_var, "clusters | delta | epsilon")
      ->required()
      ->check(CLI::IsMember({"clusters", "delta", "epsilon"}));
  sweep->add_option("--grid", grid, "Comma separated values")->required()->delimiter(',');
  add_common(sweep, sweep_opts);

  int instances = 200;
  std::uint64_t validate_seed = 1;
  std::vector<double> deltas{1e-5, 1e-4, 1e-3};
  std::string validate_out = "validation.csv";
  auto* validate = app.add_subcommand("validate", "Audit the auction against the exact optimum");
  validate->add_option("--instances", instances, "Random instances per delta")
      ->check(CLI::PositiveNumber);
  validate->add_option("--seed", validate_seed, "Seed");
  validate->add_option("--deltas", deltas, "Bid increments")->delimiter(',');
  validate->add_option("--out", validate_out, "CSV file");

  Overrides trace_opts;
  auto* trace = app.add_subcommand("trace", "Per-round trace of one auction");
  trace->add_option("--config", trace_opts.config, "Config file")->required()->check(CLI::ExistingFile);
  add_common(trace, trace_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return execute(load(run_opts));

    if (*sweep) {
      auto config = load(sweep_opts);
      config.run.sweep_var = *mcs::parse_sweep_var(sweep_var);
      config.run.sweep_grid = grid;
      return execute(config);
    }

    if (*validate) {
      const auto records = mcs::run_validation(instances, validate_seed, deltas);
      std::ofstream out(validate_out);
      if (!out) throw std::runtime_error("cannot open " + validate_out);
      mcs::write_validation_csv(out, records);
      int failed = 0;
      for (const auto& r : records) failed += r.passed() ? 0 : 1;
      std::cout << records.size() << " audits, " << failed << " failed, written to " << validate_out
                << '\n';
      return failed == 0 ? 0 : 1;
    }

    if (*trace) {
      const auto config = load(trace_opts);
      config.validate();
      const auto rounds = mcs::trace_first_run(config);
      std::filesystem::create_directories(config.run.output);
      const auto path = std::filesystem::path(config.run.output) / "trace.ndjson";
      std::ofstream out(path);
      if (!out) throw std::runtime_error("cannot open " + path.string());
      mcs::write_trace_ndjson(out, rounds);
      std::cout << rounds.size() << " rounds written to " << path.string() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
