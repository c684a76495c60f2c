#include "mcs/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "mcs/baseline.hpp"
#include "mcs/errors.hpp"

namespace mcs {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool uses_infinite(Algorithm a) {
  return a == Algorithm::auction_infinite || a == Algorithm::nearest_infinite;
}

struct Task {
  std::size_t sweep_index;
  double sweep_value;
  int replication;
};

struct TaskOutput {
  std::vector<RunRecord> records;
  std::vector<std::string> notices;
};

TaskOutput run_task(const ExperimentConfig& point, const Task& task) {
  TaskOutput out;
  const std::uint64_t seed = replication_seed(point.run.seed, task.sweep_index, task.replication);
  Rng rng(seed);
  const ProblemInstance base = generate_instance(point.scenario, point.channel, rng);

  std::optional<ProblemInstance> infinite;
  auto instance_for = [&](Algorithm a) -> const ProblemInstance& {
    if (!uses_infinite(a) || point.channel.mode == Blocklength::infinite) return base;
    if (!infinite) {
      ChannelParams params = point.channel;
      params.mode = Blocklength::infinite;
      infinite = base.with_params(params);
    }
    return *infinite;
  };
  const bool want_oracle = std::find(point.run.algorithms.begin(), point.run.algorithms.end(),
                                     Algorithm::bruteforce) != point.run.algorithms.end();

  for (const Algorithm algo : point.run.algorithms) {
    const ProblemInstance& inst = instance_for(algo);
    RunRecord rec;
    rec.sweep_index = task.sweep_index;
    rec.sweep_value = task.sweep_value;
    rec.replication = task.replication;
    rec.seed = seed;
    rec.algorithm = algo;
    rec.vehicles = static_cast<int>(inst.num_vehicles());
    rec.clusters = static_cast<int>(inst.num_clusters());
    rec.delta = point.auction.delta;
    rec.epsilon = point.channel.epsilon;

    Matching matching;
    std::optional<AuctionResult> auction;
    switch (algo) {
      case Algorithm::auction:
      case Algorithm::auction_infinite: {
        AuctionOptions opts;
        opts.delta = point.auction.delta;
        opts.c_override = point.auction.c_override;
        auction = run_auction(inst, opts);
        matching = auction->matching;
        break;
      }
      case Algorithm::nearest:
      case Algorithm::nearest_infinite:
        matching = nearest_cluster(inst);
        break;
      case Algorithm::bruteforce:
        try {
          matching = brute_force_optimal(inst).matching;
        } catch (const SizeGuardError& e) {
          out.notices.push_back("sweep point " + std::to_string(task.sweep_index) +
                                ", replication " + std::to_string(task.replication) +
                                ": bruteforce skipped (" + e.what() + ")");
          continue;
        }
        break;
    }

    const auto edges = expand_graph(inst);
    rec.matching_weight = matching_weight(matching, edges);
    const auto gains = offloading_gains(matching, inst);
    try {
      rec.metrics.jain_index = jain_fairness(gains);
    } catch (const UndefinedMetricError&) {
      rec.metrics.jain_index = std::nan("");
      rec.status = "undefined_jain";
    }
    rec.metrics.mismanagement_ratio = mismanagement_ratio(matching, inst.num_vehicles());
    rec.metrics.sum_log_utility = objective_value(matching, inst);
    rec.metrics.mean_rate_bits_per_s = mean_rate_bits_per_s(matching, inst);
    if (auction) {
      rec.metrics.rounds = auction->rounds;
      rec.metrics.available_clusters_per_vehicle =
          available_clusters_per_vehicle(inst, auction->final_prices, auction->c);
      rec.round_bound = auction->round_bound;
      if (want_oracle) {
        try {
          rec.oracle_weight =
              max_weight_matching_oracle(edges, inst.num_vehicles(), inst.clusters()).value;
        } catch (const SizeGuardError&) {
        }
      }
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::string csv_number(double v) { return std::isnan(v) ? std::string() : format_double(v); }

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::uint64_t replication_seed(std::uint64_t base, std::size_t sweep_index,
                               std::size_t replication) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ static_cast<std::uint64_t>(sweep_index));
  h = splitmix64(h ^ static_cast<std::uint64_t>(replication));
  return h;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int threads) {
  config.validate();
  ExperimentResult result;

  std::vector<Task> tasks;
  std::vector<ExperimentConfig> points;
  const auto sweep = config.sweep_points();
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    points.push_back(config.at_sweep_point(sweep[k]));
    const auto& p = points.back();
    if (p.scenario.vehicles > p.channel.n_max) {
      result.notices.push_back("sweep point " + std::to_string(k) + ": infeasible bandwidth (" +
                               std::to_string(p.scenario.vehicles) + " vehicles > n_max " +
                               std::to_string(p.channel.n_max) + "), skipped");
      continue;
    }
    for (int r = 0; r < config.run.replications; ++r) tasks.push_back({k, sweep[k], r});
  }

  std::vector<TaskOutput> outputs(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      try {
        outputs[t] = run_task(points[tasks[t].sweep_index], tasks[t]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  // Tasks are already in (sweep point, replication) order and each keeps
  // the configured algorithm order.
  for (auto& out : outputs) {
    for (auto& rec : out.records) result.records.push_back(std::move(rec));
    for (auto& n : out.notices) result.notices.push_back(std::move(n));
  }
  return result;
}

const std::vector<std::string>& runs_csv_columns() {
  static const std::vector<std::string> columns{
      "sweep_var",      "sweep_index",    "sweep_value",      "replication",
      "seed",           "algorithm",      "status",           "vehicles",
      "clusters",       "delta",          "epsilon",          "jain_index",
      "mismanagement_ratio", "sum_log_utility", "mean_rate_bps", "available_clusters_per_vehicle",
      "rounds",         "round_bound",    "matching_weight",  "oracle_weight",
      "oracle_gap",     "gap_allowance"};
  return columns;
}

void write_runs_csv(std::ostream& out, const ExperimentConfig& config,
                    std::span<const RunRecord> records) {
  const auto& columns = runs_csv_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  const char* sweep_var = to_string(config.run.sweep_var);
  for (const auto& r : records) {
    const bool is_auction =
        r.algorithm == Algorithm::auction || r.algorithm == Algorithm::auction_infinite;
    out << sweep_var << ',' << r.sweep_index << ',' << csv_number(r.sweep_value) << ','
        << r.replication << ',' << r.seed << ',' << to_string(r.algorithm) << ',' << r.status
        << ',' << r.vehicles << ',' << r.clusters << ',' << format_double(r.delta) << ','
        << format_double(r.epsilon) << ',' << csv_number(r.metrics.jain_index) << ','
        << format_double(r.metrics.mismanagement_ratio) << ','
        << format_double(r.metrics.sum_log_utility) << ','
        << format_double(r.metrics.mean_rate_bits_per_s) << ',';
    if (is_auction) out << format_double(r.metrics.available_clusters_per_vehicle);
    out << ',';
    if (is_auction) out << r.metrics.rounds;
    out << ',';
    if (r.round_bound) out << *r.round_bound;
    out << ',' << format_double(r.matching_weight) << ',';
    if (r.oracle_weight)
      out << format_double(*r.oracle_weight) << ','
          << format_double(*r.oracle_weight - r.matching_weight) << ','
          << format_double(r.vehicles * r.delta);
    else
      out << ",,";
    out << '\n';
  }
}

nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentResult& result) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["config"] = to_json(config);
  j["artifact_defaults"] = {"scenario.area_m",  "scenario.vehicles", "scenario.slots",
                            "scenario.path_loss_exp", "channel.b0_hz", "channel.slot_s",
                            "channel.sigma2",   "channel.n_max"};
  j["metric_definitions"] = {
      {"jain_index", "Jain index over per-vehicle offloading gain R*Omega, unassigned = 0"},
      {"mismanagement_ratio", "unassigned vehicles / offloading vehicles"},
      {"sum_log_utility", "sum over assigned vehicles of ln(Omega / S_j), nats"},
      {"mean_rate_bps", "mean Omega / T over assigned vehicles, bit/s"},
      {"available_clusters_per_vehicle",
       "mean count of feasible clusters with c + ln Omega - p_j > 0 at auction termination"},
      {"rounds", "auction rounds including the final round without changes"}};
  j["notices"] = result.notices;

  // Group ok rows by (sweep point, algorithm), preserving first-seen order.
  std::map<std::pair<std::size_t, int>, std::vector<MetricsReport>> groups;
  std::map<std::pair<std::size_t, int>, double> sweep_values;
  for (const auto& r : result.records) {
    if (r.status != "ok") continue;
    const auto key = std::pair{r.sweep_index, static_cast<int>(r.algorithm)};
    groups[key].push_back(r.metrics);
    sweep_values[key] = r.sweep_value;
  }
  auto stats = [](const FieldStats& s) {
    return nlohmann::json{{"mean", s.mean},
                          {"stddev", s.stddev},
                          {"std_error", s.std_error()},
                          {"count", s.count}};
  };
  j["groups"] = nlohmann::json::array();
  for (const auto& [key, reports] : groups) {
    const auto summary = aggregate(reports);
    const double value = sweep_values[key];
    nlohmann::json g;
    g["sweep_index"] = key.first;
    g["sweep_value"] = std::isnan(value) ? nlohmann::json() : nlohmann::json(value);
    g["algorithm"] = to_string(static_cast<Algorithm>(key.second));
    g["metrics"] = {{"jain_index", stats(summary.jain_index)},
                    {"mismanagement_ratio", stats(summary.mismanagement_ratio)},
                    {"sum_log_utility", stats(summary.sum_log_utility)},
                    {"mean_rate_bps", stats(summary.mean_rate_bits_per_s)},
                    {"available_clusters_per_vehicle",
                     stats(summary.available_clusters_per_vehicle)},
                    {"rounds", stats(summary.rounds)}};
    j["groups"].push_back(std::move(g));
  }
  return j;
}

std::vector<RoundTrace> trace_first_run(const ExperimentConfig& config) {
  config.validate();
  const auto point = config.at_sweep_point(config.sweep_points().front());
  Rng rng(replication_seed(point.run.seed, 0, 0));
  const auto instance = generate_instance(point.scenario, point.channel, rng);
  AuctionOptions opts;
  opts.delta = point.auction.delta;
  opts.c_override = point.auction.c_override;
  opts.capture_trace = true;
  return run_auction(instance, opts).trace;
}

void write_experiment(const std::filesystem::path& dir, const ExperimentConfig& config,
                      const ExperimentResult& result) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "runs.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (dir / "runs.csv").string());
    write_runs_csv(csv, config, result.records);
  }
  {
    std::ofstream js(dir / "summary.json", std::ios::binary);
    if (!js) throw std::runtime_error("cannot write " + (dir / "summary.json").string());
    js << summary_json(config, result).dump(2) << '\n';
  }
  if (config.run.trace) {
    std::ofstream tr(dir / "trace.ndjson", std::ios::binary);
    write_trace_ndjson(tr, trace_first_run(config));
  }
}

ProblemInstance random_small_instance(Rng& rng) {
  std::uniform_int_distribution<int> vehicles(1, 6);
  std::uniform_int_distribution<int> clusters(1, 3);
  std::uniform_int_distribution<int> slots(1, 3);
  ScenarioConfig scenario;
  scenario.vehicles = vehicles(rng);
  scenario.clusters = clusters(rng);
  scenario.slots = slots(rng);
  return generate_instance(scenario, ChannelParams{}, rng);
}

std::vector<AuditRecord> run_validation(int instances, std::uint64_t seed,
                                        std::span<const double> deltas) {
  if (instances < 1) throw ValidationError("validation needs at least one instance");
  std::vector<AuditRecord> records;
  for (int k = 0; k < instances; ++k) {
    Rng rng(replication_seed(seed, 0, static_cast<std::size_t>(k)));
    const auto instance = random_small_instance(rng);
    const auto edges = expand_graph(instance);
    const double optimum =
        max_weight_matching_oracle(edges, instance.num_vehicles(), instance.clusters()).value;
    for (double delta : deltas) {
      AuctionOptions opts;
      opts.delta = delta;
      const auto result = run_auction(instance, opts);
      AuditRecord rec;
      rec.instance = k;
      rec.vehicles = static_cast<int>(instance.num_vehicles());
      rec.clusters = static_cast<int>(instance.num_clusters());
      rec.slots = instance.clusters().front().v_slots;
      rec.delta = delta;
      rec.auction_weight = matching_weight(result.matching, edges);
      rec.oracle_weight = optimum;
      rec.rounds = result.rounds;
      rec.round_bound = result.round_bound;
      rec.feasible = !feasibility_violation(result.matching, instance).has_value();
      records.push_back(rec);
    }
  }
  return records;
}

void write_validation_csv(std::ostream& out, std::span<const AuditRecord> records) {
  out << "instance,vehicles,clusters,slots,delta,auction_weight,oracle_weight,oracle_gap,"
         "gap_allowance,rounds,round_bound,feasible,passed\n";
  for (const auto& r : records) {
    out << r.instance << ',' << r.vehicles << ',' << r.clusters << ',' << r.slots << ','
        << format_double(r.delta) << ',' << format_double(r.auction_weight) << ','
        << format_double(r.oracle_weight) << ',' << format_double(r.gap()) << ','
        << format_double(r.allowance()) << ',' << r.rounds << ',' << r.round_bound << ','
        << (r.feasible ? "true" : "false") << ',' << (r.passed() ? "true" : "false") << '\n';
  }
}

}  // namespace mcs
