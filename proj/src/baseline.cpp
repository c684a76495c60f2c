#include "mcs/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mcs/errors.hpp"

namespace mcs {

Matching nearest_cluster(const ProblemInstance& instance) {
  Matching matching(instance);
  const auto& clusters = instance.clusters();
  for (const auto& vehicle : instance.vehicles()) {
    int chosen = -1;
    double closest = std::numeric_limits<double>::infinity();
    for (const auto& cluster : clusters) {
      if (!instance.feasible(vehicle.id, cluster.id)) continue;
      if (matching.occupancy(cluster.id) >= cluster.capacity) continue;
      const double d = distance(vehicle.position, cluster.head);
      if (d < closest) {
        closest = d;
        chosen = cluster.id;
      }
    }
    if (chosen >= 0) matching.assign(vehicle.id, {chosen, matching.occupancy(chosen) + 1});
  }
  return matching;
}

namespace {

class Enumerator {
 public:
  explicit Enumerator(const ProblemInstance& instance)
      : instance_(instance),
        m_(static_cast<int>(instance.num_vehicles())),
        n_(static_cast<int>(instance.num_clusters())),
        choice_(m_, -1),
        load_(n_, 0) {}

  OracleSolution solve() {
    descend(0);
    Matching matching(instance_);
    std::vector<int> next_slot(n_, 1);
    for (int i = 0; i < m_; ++i)
      if (best_choice_[i] >= 0)
        matching.assign(i, {best_choice_[i], next_slot[best_choice_[i]]++});
    return {std::move(matching), found_ ? best_value_ : 0.0};
  }

 private:
  // Choices are tried in the order cluster 0..N-1, then "unassigned", so the
  // first maximum met is the lexicographically smallest.
  void descend(int vehicle) {
    if (vehicle == m_) {
      evaluate();
      return;
    }
    for (int j = 0; j < n_; ++j) {
      if (!instance_.feasible(vehicle, j)) continue;
      if (load_[j] >= instance_.clusters()[j].capacity) continue;
      choice_[vehicle] = j;
      ++load_[j];
      descend(vehicle + 1);
      --load_[j];
    }
    choice_[vehicle] = -1;
    descend(vehicle + 1);
  }

  void evaluate() {
    double value = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int j = choice_[i];
      if (j >= 0) {
        value += std::log(instance_.rate(i, j) / load_[j]);
        continue;
      }
      // Leaving a vehicle out is only allowed when it has nowhere to go.
      for (int k = 0; k < n_; ++k)
        if (instance_.feasible(i, k) && load_[k] < instance_.clusters()[k].capacity) return;
    }
    if (!found_ || value > best_value_) {
      found_ = true;
      best_value_ = value;
      best_choice_ = choice_;
    }
  }

  const ProblemInstance& instance_;
  int m_;
  int n_;
  std::vector<int> choice_;
  std::vector<int> load_;
  bool found_ = false;
  double best_value_ = 0.0;
  std::vector<int> best_choice_;
};

// Minimum-cost perfect assignment on a square matrix (shortest augmenting
// paths with potentials). Entries may be +inf for forbidden pairs as long as
// a finite perfect assignment exists. Returns row -> column.
std::vector<int> hungarian_min_cost(const Matrix<double>& cost) {
  const int n = static_cast<int>(cost.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

OracleSolution brute_force_optimal(const ProblemInstance& instance) {
  const double maps = std::pow(static_cast<double>(instance.num_clusters() + 1),
                               static_cast<double>(instance.num_vehicles()));
  if (maps > kBruteForceLimit)
    throw SizeGuardError("exhaustive search over " + std::to_string(maps) +
                         " maps exceeds the guard");
  return Enumerator(instance).solve();
}

OracleSolution max_weight_matching_oracle(std::span<const ExpandedEdge> edges,
                                          std::size_t num_vehicles,
                                          std::span<const MiningCluster> clusters) {
  // Column index for every slot node that carries at least one edge.
  std::map<std::pair<int, int>, int> slot_column;
  for (const auto& e : edges) {
    if (e.vehicle < 0 || static_cast<std::size_t>(e.vehicle) >= num_vehicles ||
        e.cluster < 0 || static_cast<std::size_t>(e.cluster) >= clusters.size())
      throw ConsistencyError("edge refers to an unknown vehicle or cluster");
    slot_column.try_emplace({e.cluster, e.slot}, 0);
  }
  int next = 0;
  for (auto& [slot, column] : slot_column) column = next++;

  const std::size_t slots = slot_column.size();
  const std::size_t size = num_vehicles + slots;
  if (size > kMatchingOracleLimit)
    throw SizeGuardError("matching oracle limited to " + std::to_string(kMatchingOracleLimit) +
                         " nodes, got " + std::to_string(size));

  Matching matching(num_vehicles, clusters);
  if (edges.empty()) return {std::move(matching), 0.0};

  // Rows: vehicles then dummy rows for slots. Columns: slots then one dummy
  // column per vehicle. Dummy pairings cost nothing; missing edges are
  // forbidden.
  constexpr double inf = std::numeric_limits<double>::infinity();
  Matrix<double> cost(size, size, 0.0);
  for (std::size_t i = 0; i < num_vehicles; ++i)
    for (std::size_t c = 0; c < slots; ++c) cost(i, c) = inf;
  for (const auto& e : edges) {
    double& cell = cost(e.vehicle, slot_column.at({e.cluster, e.slot}));
    cell = std::min(cell, -e.weight);
  }

  const auto row_to_col = hungarian_min_cost(cost);
  std::vector<std::pair<int, int>> column_slot(slots);
  for (const auto& [slot, column] : slot_column) column_slot[column] = slot;

  double weight = 0.0;
  for (std::size_t i = 0; i < num_vehicles; ++i) {
    const int col = row_to_col[i];
    if (col < 0 || static_cast<std::size_t>(col) >= slots) continue;
    const double w = -cost(i, col);
    // Zero-weight edges are indistinguishable from staying out; keep the
    // vehicle out so the matching is minimal among optima.
    if (!(w > 0.0)) continue;
    const auto [cluster, slot] = column_slot[col];
    matching.assign(static_cast<int>(i), {cluster, slot});
    weight += w;
  }
  return {std::move(matching), weight};
}

}  // namespace mcs
