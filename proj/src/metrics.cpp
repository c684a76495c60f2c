#include "mcs/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mcs/errors.hpp"

namespace mcs {

double jain_fairness(std::span<const double> gains) {
  if (gains.empty()) throw UndefinedMetricError("Jain index of an empty gain vector");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : gains) {
    if (!(x >= 0.0)) throw ValidationError("gains must be non-negative");
    sum += x;
    sum_sq += x * x;
  }
  if (!(sum_sq > 0.0)) throw UndefinedMetricError("Jain index undefined for all-zero gains");
  return sum * sum / (static_cast<double>(gains.size()) * sum_sq);
}

double mismanagement_ratio(const Matching& matching, std::size_t num_vehicles) {
  if (num_vehicles == 0) throw ValidationError("mismanagement ratio needs M >= 1");
  if (matching.num_vehicles() != num_vehicles)
    throw ConsistencyError("matching covers a different number of vehicles");
  return static_cast<double>(matching.unassigned_count()) / static_cast<double>(num_vehicles);
}

double available_clusters_per_vehicle(const ProblemInstance& instance,
                                      std::span<const std::vector<double>> slot_prices,
                                      double c) {
  if (slot_prices.size() != instance.num_clusters())
    throw ConsistencyError("price table does not cover every cluster");
  const auto m = instance.num_vehicles();
  if (m == 0) return 0.0;
  std::vector<double> cheapest(slot_prices.size());
  for (std::size_t j = 0; j < slot_prices.size(); ++j) {
    if (slot_prices[j].empty()) throw ConsistencyError("cluster without slot prices");
    cheapest[j] = *std::min_element(slot_prices[j].begin(), slot_prices[j].end());
  }
  long count = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < cheapest.size(); ++j)
      if (instance.feasible(i, j) && c + std::log(instance.rate(i, j)) - cheapest[j] > 0.0) ++count;
  return static_cast<double>(count) / static_cast<double>(m);
}

double mean_rate_bits_per_s(const Matching& matching, const ProblemInstance& instance) {
  double total = 0.0;
  int assigned = 0;
  for (std::size_t i = 0; i < matching.num_vehicles(); ++i) {
    const auto& slot = matching.slot_of(static_cast<int>(i));
    if (!slot) continue;
    total += instance.rate(i, slot->cluster);
    ++assigned;
  }
  if (assigned == 0) return 0.0;
  return total / assigned / instance.params().slot_s;
}

MetricsReport evaluate(const Matching& matching, const ProblemInstance& instance) {
  MetricsReport report;
  const auto gains = offloading_gains(matching, instance);
  report.jain_index = jain_fairness(gains);
  report.mismanagement_ratio = mismanagement_ratio(matching, instance.num_vehicles());
  report.sum_log_utility = objective_value(matching, instance);
  report.mean_rate_bits_per_s = mean_rate_bits_per_s(matching, instance);
  return report;
}

double FieldStats::std_error() const {
  return count > 0 ? stddev / std::sqrt(static_cast<double>(count)) : 0.0;
}

FieldStats summarize(std::span<const double> values) {
  FieldStats stats;
  stats.count = values.size();
  if (values.empty()) return stats;
  // Summing in sorted order makes the result independent of input order.
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double x : sorted) sum += x;
  stats.mean = sum / static_cast<double>(sorted.size());
  if (sorted.size() > 1) {
    double ss = 0.0;
    for (double x : sorted) ss += (x - stats.mean) * (x - stats.mean);
    stats.stddev = std::sqrt(ss / static_cast<double>(sorted.size() - 1));
  }
  return stats;
}

MetricsSummary aggregate(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw ValidationError("cannot aggregate an empty report list");
  auto field = [&](auto member) {
    std::vector<double> values;
    values.reserve(reports.size());
    for (const auto& r : reports) values.push_back(static_cast<double>(r.*member));
    return summarize(values);
  };
  MetricsSummary summary;
  summary.jain_index = field(&MetricsReport::jain_index);
  summary.mismanagement_ratio = field(&MetricsReport::mismanagement_ratio);
  summary.sum_log_utility = field(&MetricsReport::sum_log_utility);
  summary.mean_rate_bits_per_s = field(&MetricsReport::mean_rate_bits_per_s);
  summary.available_clusters_per_vehicle = field(&MetricsReport::available_clusters_per_vehicle);
  summary.rounds = field(&MetricsReport::rounds);
  return summary;
}

}  // namespace mcs
