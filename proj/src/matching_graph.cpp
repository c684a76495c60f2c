#include "mcs/matching_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "mcs/errors.hpp"

namespace mcs {

namespace {

// x ln x with 0 ln 0 = 0.
double xlogx(int x) { return x == 0 ? 0.0 : x * std::log(static_cast<double>(x)); }

}  // namespace

double slot_discount(int slot) {
  if (slot < 1) throw ValidationError("slot index must be >= 1");
  return xlogx(slot - 1) - xlogx(slot);
}

double edge_weight(double rate, int slot) {
  if (!(rate > 0.0)) throw ValidationError("edge weight needs a positive rate");
  return std::log(rate) + slot_discount(slot);
}

std::vector<ExpandedEdge> expand_graph(const ProblemInstance& instance) {
  std::vector<ExpandedEdge> edges;
  const auto& clusters = instance.clusters();
  for (std::size_t i = 0; i < instance.num_vehicles(); ++i) {
    for (std::size_t j = 0; j < clusters.size(); ++j) {
      if (!instance.feasible(i, j)) continue;
      const double log_rate = std::log(instance.rate(i, j));
      const int top = std::min(clusters[j].v_slots, clusters[j].capacity);
      for (int s = 1; s <= top; ++s)
        edges.push_back({static_cast<int>(i), static_cast<int>(j), s, log_rate + slot_discount(s)});
    }
  }
  return edges;
}

Matching::Matching(std::size_t vehicles, std::span<const MiningCluster> clusters)
    : assignment_(vehicles) {
  holders_.reserve(clusters.size());
  for (const auto& c : clusters) holders_.emplace_back(c.capacity, -1);
}

void Matching::assign(int vehicle, SlotRef slot) {
  if (vehicle < 0 || static_cast<std::size_t>(vehicle) >= assignment_.size())
    throw ConsistencyError("unknown vehicle " + std::to_string(vehicle));
  if (slot.cluster < 0 || static_cast<std::size_t>(slot.cluster) >= holders_.size())
    throw ConsistencyError("unknown cluster " + std::to_string(slot.cluster));
  auto& slots = holders_[slot.cluster];
  if (slot.slot < 1 || static_cast<std::size_t>(slot.slot) > slots.size())
    throw ConsistencyError("slot " + std::to_string(slot.slot) + " outside cluster capacity");
  if (assignment_[vehicle])
    throw ConsistencyError("vehicle " + std::to_string(vehicle) + " already holds a slot");
  if (slots[slot.slot - 1] != -1)
    throw ConsistencyError("slot " + std::to_string(slot.slot) + " of cluster " +
                           std::to_string(slot.cluster) + " is taken");
  slots[slot.slot - 1] = vehicle;
  assignment_[vehicle] = slot;
}

void Matching::unassign(int vehicle) {
  auto& held = assignment_.at(vehicle);
  if (!held) return;
  holders_[held->cluster][held->slot - 1] = -1;
  held.reset();
}

int Matching::holder(SlotRef slot) const {
  const auto& slots = holders_.at(slot.cluster);
  if (slot.slot < 1 || static_cast<std::size_t>(slot.slot) > slots.size()) return -1;
  return slots[slot.slot - 1];
}

int Matching::occupancy(int cluster) const {
  int count = 0;
  for (int v : holders_.at(cluster)) count += v != -1;
  return count;
}

int Matching::assigned_count() const {
  int count = 0;
  for (const auto& a : assignment_) count += a.has_value();
  return count;
}

std::vector<int> Matching::unassigned() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < assignment_.size(); ++i)
    if (!assignment_[i]) out.push_back(static_cast<int>(i));
  return out;
}

Matrix<int> Matching::indicator() const {
  Matrix<int> phi(num_vehicles(), num_clusters(), 0);
  for (std::size_t i = 0; i < assignment_.size(); ++i)
    if (assignment_[i]) phi(i, assignment_[i]->cluster) = 1;
  return phi;
}

Matrix<double> Matching::shares() const {
  Matrix<double> r(num_vehicles(), num_clusters(), 0.0);
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    if (!assignment_[i]) continue;
    const int j = assignment_[i]->cluster;
    r(i, j) = 1.0 / occupancy(j);
  }
  return r;
}

double objective_value(const Matching& matching, const ProblemInstance& instance) {
  if (matching.num_vehicles() != instance.num_vehicles() ||
      matching.num_clusters() != instance.num_clusters())
    throw ConsistencyError("matching and instance dimensions differ");
  double total = 0.0;
  for (std::size_t i = 0; i < matching.num_vehicles(); ++i) {
    const auto& slot = matching.slot_of(static_cast<int>(i));
    if (!slot) continue;
    const double rate = instance.rate(i, slot->cluster);
    if (!(rate > 0.0))
      throw DegenerateObjectiveError("vehicle " + std::to_string(i) +
                                     " is assigned over a zero-rate link");
    total += std::log(rate / matching.occupancy(slot->cluster));
  }
  return total;
}

double matching_weight(const Matching& matching, std::span<const ExpandedEdge> edges) {
  std::map<std::tuple<int, int, int>, double> lookup;
  for (const auto& e : edges) lookup.emplace(std::tuple{e.vehicle, e.cluster, e.slot}, e.weight);

  double total = 0.0;
  for (std::size_t i = 0; i < matching.num_vehicles(); ++i) {
    const auto& slot = matching.slot_of(static_cast<int>(i));
    if (!slot) continue;
    const auto it = lookup.find({static_cast<int>(i), slot->cluster, slot->slot});
    if (it == lookup.end())
      throw ConsistencyError("vehicle " + std::to_string(i) + " uses slot " +
                             std::to_string(slot->slot) + " of cluster " +
                             std::to_string(slot->cluster) + " which has no graph edge");
    total += it->second;
  }
  return total;
}

std::optional<std::string> feasibility_violation(const Matching& matching,
                                                 const ProblemInstance& instance) {
  const auto m = instance.num_vehicles();
  const auto n = instance.num_clusters();
  if (matching.num_vehicles() != m || matching.num_clusters() != n)
    return "matching dimensions do not match the instance";

  const auto phi = matching.indicator();
  const auto share = matching.shares();
  long units = 0;
  for (std::size_t i = 0; i < m; ++i) {
    int links = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (phi(i, j) != 0 && phi(i, j) != 1) return "offloading indicator is not binary";
      if (share(i, j) < 0.0) return "negative resource share";
      if (phi(i, j) == 1) {
        ++links;
        if (!instance.feasible(i, j))
          return "vehicle " + std::to_string(i) + " assigned over an infeasible link";
        units += instance.n_alloc()(i, j);
      }
    }
    if (links > 1) return "vehicle " + std::to_string(i) + " offloads to several clusters";
    if (const auto& slot = matching.slot_of(static_cast<int>(i));
        slot && matching.holder(*slot) != static_cast<int>(i))
      return "slot bookkeeping disagrees for vehicle " + std::to_string(i);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const int s = matching.occupancy(static_cast<int>(j));
    if (s > instance.clusters()[j].capacity)
      return "cluster " + std::to_string(j) + " exceeds its capacity";
    double used = 0.0;
    for (std::size_t i = 0; i < m; ++i) used += share(i, j);
    if (used > 1.0 + 1e-12) return "cluster " + std::to_string(j) + " over-allocates resources";
  }
  if (units > instance.params().n_max) return "bandwidth units exceed n_max";
  return std::nullopt;
}

std::vector<double> offloading_gains(const Matching& matching, const ProblemInstance& instance) {
  std::vector<double> gains(matching.num_vehicles(), 0.0);
  for (std::size_t i = 0; i < gains.size(); ++i) {
    const auto& slot = matching.slot_of(static_cast<int>(i));
    if (slot) gains[i] = instance.rate(i, slot->cluster) / matching.occupancy(slot->cluster);
  }
  return gains;
}

}  // namespace mcs
