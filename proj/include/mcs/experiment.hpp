#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "mcs/auction.hpp"
#include "mcs/config.hpp"
#include "mcs/metrics.hpp"

namespace mcs {

// Seed of one replication: a splitmix64 hash of (base, sweep point,
// replication). Independent of execution order.
std::uint64_t replication_seed(std::uint64_t base, std::size_t sweep_index,
                               std::size_t replication);

struct RunRecord {
  std::size_t sweep_index = 0;
  double sweep_value = 0.0;  // NaN when not sweeping
  int replication = 0;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::auction;
  int vehicles = 0;
  int clusters = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  std::string status = "ok";  // ok | undefined_jain
  MetricsReport metrics;
  std::optional<std::int64_t> round_bound;  // auction rows only
  double matching_weight = 0.0;
  std::optional<double> oracle_weight;  // auction rows when bruteforce is selected
};

struct ExperimentResult {
  std::vector<RunRecord> records;  // sorted by (sweep point, replication, algorithm)
  std::vector<std::string> notices;
};

// Runs every sweep point x replication x selected algorithm. Infeasible
// sweep points and oversized exhaustive searches are skipped with a notice.
ExperimentResult run_experiment(const ExperimentConfig& config, int threads = 1);

// Column names of runs.csv, in order.
const std::vector<std::string>& runs_csv_columns();
void write_runs_csv(std::ostream& out, const ExperimentConfig& config,
                    std::span<const RunRecord> records);

// Config echo, metric definitions, notices and per-(sweep point, algorithm)
// aggregates.
nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentResult& result);

// Writes runs.csv and summary.json (and trace.ndjson when the config asks
// for it) into dir, creating it if needed.
void write_experiment(const std::filesystem::path& dir, const ExperimentConfig& config,
                      const ExperimentResult& result);

// Auction trace of the first sweep point's first replication.
std::vector<RoundTrace> trace_first_run(const ExperimentConfig& config);

// Random instance for oracle audits: 1-6 vehicles, 1-3 clusters with 1-3
// slots each, default channel model.
ProblemInstance random_small_instance(Rng& rng);

struct AuditRecord {
  int instance = 0;
  int vehicles = 0;
  int clusters = 0;
  int slots = 0;
  double delta = 0.0;
  double auction_weight = 0.0;
  double oracle_weight = 0.0;
  std::int64_t rounds = 0;
  std::int64_t round_bound = 0;
  bool feasible = true;

  double gap() const { return oracle_weight - auction_weight; }
  double allowance() const { return vehicles * delta; }
  bool passed() const { return feasible && gap() <= allowance() && rounds <= round_bound; }
};

// Auction vs exact max-weight matching on `instances` random small instances
// for every delta.
std::vector<AuditRecord> run_validation(int instances, std::uint64_t seed,
                                        std::span<const double> deltas);
void write_validation_csv(std::ostream& out, std::span<const AuditRecord> records);

// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace mcs
