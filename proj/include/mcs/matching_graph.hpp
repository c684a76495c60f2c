#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcs/matrix.hpp"
#include "mcs/scenario.hpp"

namespace mcs {

// Edge (vehicle, slot s of cluster) in the expanded bipartite graph. Slots
// are 1-based.
struct ExpandedEdge {
  int vehicle = 0;
  int cluster = 0;
  int slot = 1;
  double weight = 0.0;  // nats
};

// ln((s-1)^(s-1) / s^s) with 0^0 = 1: the marginal share penalty of filling
// slot s. Equals -ln 1 = 0 at s = 1 and telescopes to -S ln S over 1..S.
double slot_discount(int slot);

// ln(rate) + slot_discount(slot).
double edge_weight(double rate, int slot);

// Edges for every feasible (vehicle, cluster) pair and slots 1..capacity,
// ordered by vehicle, then cluster, then slot.
std::vector<ExpandedEdge> expand_graph(const ProblemInstance& instance);

struct SlotRef {
  int cluster = 0;
  int slot = 1;
  bool operator==(const SlotRef&) const = default;
};

// Vehicle -> (cluster, slot) assignment. Each vehicle holds at most one slot
// and each slot at most one vehicle; assign() enforces both.
class Matching {
 public:
  Matching() = default;
  Matching(std::size_t vehicles, std::span<const MiningCluster> clusters);
  explicit Matching(const ProblemInstance& instance)
      : Matching(instance.num_vehicles(), instance.clusters()) {}

  std::size_t num_vehicles() const { return assignment_.size(); }
  std::size_t num_clusters() const { return holders_.size(); }

  // Throws ConsistencyError if the slot is taken, out of range, or the
  // vehicle already holds a slot.
  void assign(int vehicle, SlotRef slot);
  // Frees the vehicle's slot, if any.
  void unassign(int vehicle);

  const std::optional<SlotRef>& slot_of(int vehicle) const { return assignment_.at(vehicle); }
  bool is_assigned(int vehicle) const { return assignment_.at(vehicle).has_value(); }
  // Vehicle holding a slot, or -1.
  int holder(SlotRef slot) const;

  // S_j.
  int occupancy(int cluster) const;
  int assigned_count() const;
  int unassigned_count() const { return static_cast<int>(num_vehicles()) - assigned_count(); }
  std::vector<int> unassigned() const;

  // Offloading indicator phi as an M x N 0/1 matrix.
  Matrix<int> indicator() const;
  // Resource share R_{i,j} = 1/S_j on assigned pairs, 0 elsewhere.
  Matrix<double> shares() const;

  bool operator==(const Matching&) const = default;

 private:
  std::vector<std::optional<SlotRef>> assignment_;
  std::vector<std::vector<int>> holders_;  // [cluster][slot - 1] -> vehicle or -1
};

// sum_i ln(R_{i,j} Omega_{i,j}) over assigned vehicles. Unassigned vehicles
// are skipped. Throws DegenerateObjectiveError for an assigned zero-rate link.
double objective_value(const Matching& matching, const ProblemInstance& instance);

// Sum of the graph weights of the assigned (vehicle, slot) edges. Throws
// ConsistencyError when an assignment uses an edge absent from the graph.
double matching_weight(const Matching& matching, std::span<const ExpandedEdge> edges);

// Empty when the matching satisfies the resource, single-cluster, binary
// indicator and non-negativity constraints plus the bandwidth budget;
// otherwise a description of the first violation.
std::optional<std::string> feasibility_violation(const Matching& matching,
                                                 const ProblemInstance& instance);

// Per-vehicle offloading gain R_{i,j} Omega_{i,j}; zero when unassigned.
std::vector<double> offloading_gains(const Matching& matching, const ProblemInstance& instance);

}  // namespace mcs
