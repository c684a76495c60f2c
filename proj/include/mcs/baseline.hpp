#pragma once

#include <span>

#include "mcs/matching_graph.hpp"
#include "mcs/scenario.hpp"

namespace mcs {

// Greedy proximity baseline: vehicles in ascending id order join the closest
// feasible cluster head that still has a free slot (lowest cluster id on
// distance ties). Vehicles that find nothing stay unassigned.
Matching nearest_cluster(const ProblemInstance& instance);

struct OracleSolution {
  Matching matching;
  double value = 0.0;  // objective (nats) or matching weight, per solver
};

// Largest (N+1)^M the exhaustive solver accepts.
inline constexpr double kBruteForceLimit = 1e7;

// Exhaustive search over vehicle -> cluster-or-none maps with cluster
// capacities respected. A vehicle may stay unassigned only if every feasible
// cluster is full. Returns the map maximizing the offloading objective with
// equal resource split; the lexicographically first map wins ties. Throws
// SizeGuardError when (N+1)^M exceeds kBruteForceLimit.
OracleSolution brute_force_optimal(const ProblemInstance& instance);

// Largest vehicle + slot node count accepted by the exact matcher.
inline constexpr std::size_t kMatchingOracleLimit = 2000;

// Exact maximum-weight bipartite matching between vehicles and cluster slots
// (Hungarian method over a square padding with zero-weight dummy nodes, so
// vehicles may stay unmatched). Throws SizeGuardError past
// kMatchingOracleLimit nodes.
OracleSolution max_weight_matching_oracle(std::span<const ExpandedEdge> edges,
                                          std::size_t num_vehicles,
                                          std::span<const MiningCluster> clusters);

}  // namespace mcs
