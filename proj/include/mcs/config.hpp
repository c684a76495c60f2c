#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "mcs/channel.hpp"
#include "mcs/scenario.hpp"

namespace mcs {

enum class Algorithm { auction, auction_infinite, nearest, nearest_infinite, bruteforce };

const char* to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view name);

enum class SweepVar { none, clusters, delta, epsilon };

const char* to_string(SweepVar var);
std::optional<SweepVar> parse_sweep_var(std::string_view name);

struct AuctionConfig {
  double delta = 1e-4;
  std::optional<double> c_override;
};

struct RunConfig {
  std::uint64_t seed = 1;
  int replications = 10;
  std::vector<Algorithm> algorithms{Algorithm::auction, Algorithm::nearest};
  SweepVar sweep_var = SweepVar::none;
  std::vector<double> sweep_grid;  // empty only when sweep_var is none
  std::string output = "results";
  bool trace = false;
  int threads = 1;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  ChannelParams channel;
  AuctionConfig auction;
  RunConfig run;

  // Every violated constraint, empty when valid.
  std::vector<std::string> problems() const;
  // Throws ConfigError listing all problems.
  void validate() const;

  // Sweep values to visit; a single NaN placeholder when not sweeping.
  std::vector<double> sweep_points() const;
  // Copy with the sweep variable set to value.
  ExperimentConfig at_sweep_point(double value) const;
};

// Parses the sectioned key = value format ([scenario], [channel], [auction],
// [run]). Missing keys take defaults; unknown sections or keys are rejected.
// Throws ConfigError with the line number on syntax errors and with the full
// list of violations on invalid values.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical echo of every field, defaults included.
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace mcs
