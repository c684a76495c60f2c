#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mcs/experiment.hpp"
#include "schema_check.hpp"

namespace fs = std::filesystem;

namespace {

mcs::ExperimentConfig small_sweep(int replications) {
  auto c = mcs::parse_config(R"([scenario]
vehicles = 12
slots = 3
[run]
algorithms = ["auction", "nearest"]
sweep_var = "clusters"
sweep_grid = [10, 20, 30, 40, 50]
)");
  c.run.replications = replications;
  return c;
}

std::string csv(const mcs::ExperimentConfig& c, const mcs::ExperimentResult& r) {
  std::ostringstream out;
  mcs::write_runs_csv(out, c, r.records);
  return out.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mcs_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MCS_SIM_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Seeds, DistinctAcrossPointsAndReplications) {
  std::set<std::uint64_t> seen;
  for (std::size_t p = 0; p < 20; ++p)
    for (std::size_t r = 0; r < 200; ++r) seen.insert(mcs::replication_seed(1, p, r));
  EXPECT_EQ(seen.size(), 4000u);
  EXPECT_NE(mcs::replication_seed(1, 0, 0), mcs::replication_seed(2, 0, 0));
}

TEST(Experiment, RowCountAndOrder) {
  const auto c = small_sweep(3);
  const auto r = mcs::run_experiment(c);
  ASSERT_EQ(r.records.size(), 2u * 5u * 3u);
  for (std::size_t k = 1; k < r.records.size(); ++k) {
    const auto& a = r.records[k - 1];
    const auto& b = r.records[k];
    EXPECT_LE(std::tie(a.sweep_index, a.replication), std::tie(b.sweep_index, b.replication));
  }
  const auto text = csv(c, r);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 30);
  EXPECT_EQ(text.substr(0, text.find('\n')).find("sweep_var,sweep_index,sweep_value"), 0u);
}

TEST(Experiment, ThreadCountDoesNotChangeOutput) {
  const auto c = small_sweep(4);
  EXPECT_EQ(csv(c, mcs::run_experiment(c, 1)), csv(c, mcs::run_experiment(c, 3)));
}

TEST(Experiment, SameConfigSameBytes) {
  const auto c = small_sweep(2);
  EXPECT_EQ(csv(c, mcs::run_experiment(c)), csv(c, mcs::run_experiment(c)));
}

TEST(Experiment, AuctionRowsStayWithinRoundBound) {
  const auto r = mcs::run_experiment(small_sweep(3));
  for (const auto& rec : r.records) {
    if (rec.algorithm != mcs::Algorithm::auction) continue;
    ASSERT_TRUE(rec.round_bound);
    EXPECT_LE(rec.metrics.rounds, *rec.round_bound);
  }
}

TEST(Experiment, InfeasibleBandwidthIsReportedAndSkipped) {
  auto c = mcs::parse_config("[scenario]\nvehicles = 10\n[channel]\nn_max = 8\n[run]\nreplications = 2\n");
  const auto r = mcs::run_experiment(c);
  EXPECT_TRUE(r.records.empty());
  ASSERT_FALSE(r.notices.empty());
}

TEST(Experiment, OracleColumnsWhenBruteForceSelected) {
  auto c = mcs::parse_config(R"([scenario]
vehicles = 5
clusters = 2
slots = 2
[run]
replications = 4
algorithms = ["auction", "bruteforce"]
)");
  const auto r = mcs::run_experiment(c);
  ASSERT_EQ(r.records.size(), 8u);
  for (const auto& rec : r.records) {
    if (rec.algorithm != mcs::Algorithm::auction) continue;
    ASSERT_TRUE(rec.oracle_weight);
    EXPECT_LE(*rec.oracle_weight - rec.matching_weight, rec.vehicles * rec.delta + 1e-9);
  }
}

TEST(Experiment, BruteForceSizeGuardLeavesNotice) {
  auto c = mcs::parse_config("[scenario]\nvehicles = 30\n[run]\nreplications = 1\n"
                             "algorithms = [\"nearest\", \"bruteforce\"]\n");
  const auto r = mcs::run_experiment(c);
  EXPECT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.notices.size(), 1u);
}

TEST(Experiment, SummaryMatchesPublishedSchema) {
  auto c = mcs::parse_config(R"([scenario]
vehicles = 5
clusters = 2
slots = 2
[run]
replications = 3
algorithms = ["auction", "auction-infinite", "nearest", "nearest-infinite", "bruteforce"]
sweep_var = "delta"
sweep_grid = [1e-4, 1e-3]
)");
  const auto summary = mcs::summary_json(c, mcs::run_experiment(c));
  const auto schema = nlohmann::json::parse(slurp(fs::path(MCS_SOURCE_DIR) / "docs/summary.schema.json"));
  const auto problem = schema::check(summary, schema);
  EXPECT_FALSE(problem) << *problem;
  EXPECT_EQ(summary.at("groups").size(), 2u * 5u);
}

TEST(Experiment, WritesArtifacts) {
  const auto dir = scratch("artifacts");
  auto c = small_sweep(1);
  c.run.trace = true;
  mcs::write_experiment(dir, c, mcs::run_experiment(c));
  EXPECT_TRUE(fs::exists(dir / "runs.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
  EXPECT_TRUE(fs::exists(dir / "trace.ndjson"));
  EXPECT_NO_THROW(nlohmann::json::parse(slurp(dir / "summary.json")));
}

TEST(Validation, GapWithinAllowance) {
  const std::vector<double> deltas{1e-3};
  const auto records = mcs::run_validation(40, 3, deltas);
  ASSERT_EQ(records.size(), 40u);
  for (const auto& r : records) EXPECT_TRUE(r.passed()) << r.instance << " gap " << r.gap();
  std::ostringstream out;
  mcs::write_validation_csv(out, records);
  const auto text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 41);
}

TEST(Cli, RunSweepValidateTrace) {
  const auto dir = scratch("cli");
  const auto cfg = dir / "c.toml";
  std::ofstream(cfg) << "[scenario]\nvehicles = 6\nclusters = 3\nslots = 2\n[run]\nreplications = 2\n";
  const auto d = dir.string();
  EXPECT_EQ(run_cli("run --config " + cfg.string() + " --out " + d + "/a"), 0);
  EXPECT_EQ(run_cli("run --config " + cfg.string() + " --out " + d + "/b --threads 2"), 0);
  EXPECT_EQ(slurp(dir / "a/runs.csv"), slurp(dir / "b/runs.csv"));
  EXPECT_EQ(run_cli("sweep --config " + cfg.string() + " --var delta --grid 1e-4,1e-3 --out " + d +
                    "/s"),
            0);
  const auto sweep = slurp(dir / "s/runs.csv");
  EXPECT_EQ(std::count(sweep.begin(), sweep.end(), '\n'), 1 + 2 * 2 * 2);
  EXPECT_EQ(run_cli("validate --instances 5 --out " + d + "/v.csv"), 0);
  EXPECT_TRUE(fs::exists(dir / "v.csv"));
  EXPECT_EQ(run_cli("trace --config " + cfg.string() + " --out " + d + "/t"), 0);
  EXPECT_TRUE(fs::exists(dir / "t/trace.ndjson"));
}

TEST(Cli, FailuresExitNonZero) {
  const auto dir = scratch("cli_bad");
  const auto bad = dir / "bad.toml";
  std::ofstream(bad) << "[auction]\ndelta = -1\n";
  EXPECT_NE(run_cli("run --config " + bad.string() + " --out " + dir.string()), 0);
  EXPECT_NE(run_cli("run --config " + (dir / "missing.toml").string()), 0);
  EXPECT_NE(run_cli("sweep --var vehicles --grid 1,2"), 0);
  EXPECT_NE(run_cli("frobnicate"), 0);
}
