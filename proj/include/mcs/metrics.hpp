#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mcs/matching_graph.hpp"
#include "mcs/scenario.hpp"

namespace mcs {

// (sum x)^2 / (n sum x^2). Throws UndefinedMetricError when the input is
// empty or all zero, ValidationError on negative entries.
double jain_fairness(std::span<const double> gains);

// |unassigned| / M.
double mismanagement_ratio(const Matching& matching, std::size_t num_vehicles);

// Mean over vehicles of the number of feasible clusters whose cheapest slot
// price p_j still leaves a positive margin c + ln Omega_{i,j} - p_j.
double available_clusters_per_vehicle(const ProblemInstance& instance,
                                      std::span<const std::vector<double>> slot_prices, double c);

// Mean upload rate in bit/s (Omega / T) over assigned vehicles, 0 if none.
double mean_rate_bits_per_s(const Matching& matching, const ProblemInstance& instance);

struct MetricsReport {
  double jain_index = 0.0;
  double mismanagement_ratio = 0.0;
  double sum_log_utility = 0.0;
  double mean_rate_bits_per_s = 0.0;
  double available_clusters_per_vehicle = 0.0;
  std::int64_t rounds = 0;
};

// Jain index over realized offloading gains, mismanagement, objective value
// and mean rate. Auction-only fields are left at zero.
MetricsReport evaluate(const Matching& matching, const ProblemInstance& instance);

struct FieldStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single value
  std::size_t count = 0;

  double std_error() const;
  bool operator==(const FieldStats&) const = default;
};

// Order-independent statistics of one sample.
FieldStats summarize(std::span<const double> values);

struct MetricsSummary {
  FieldStats jain_index;
  FieldStats mismanagement_ratio;
  FieldStats sum_log_utility;
  FieldStats mean_rate_bits_per_s;
  FieldStats available_clusters_per_vehicle;
  FieldStats rounds;

  bool operator==(const MetricsSummary&) const = default;
};

// Per-field statistics. Identical under any permutation of the reports.
// Throws ValidationError on an empty list.
MetricsSummary aggregate(std::span<const MetricsReport> reports);

}  // namespace mcs
