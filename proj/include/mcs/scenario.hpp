#pragma once

#include <optional>
#include <vector>

#include "mcs/channel.hpp"
#include "mcs/matrix.hpp"

namespace mcs {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(Position a, Position b);

// Vehicle and cluster ids equal their index in the instance vectors.
struct Vehicle {
  int id = 0;
  Position position;
  double tx_power_w = 0.0;
};

struct MiningCluster {
  int id = 0;
  Position head;
  int v_slots = 1;   // member vehicles V
  int capacity = 1;  // alpha, at most v_slots
};

struct ScenarioConfig {
  double area_m = 1000.0;  // side of the square deployment area
  int vehicles = 30;
  int clusters = 10;
  int slots = 5;
  std::optional<int> capacity;  // defaults to slots
  double path_loss_exp = 3.0;
  double tx_power_dbm = 25.0;

  int effective_capacity() const { return capacity.value_or(slots); }
  void validate() const;
};

struct Topology {
  std::vector<Vehicle> vehicles;
  std::vector<MiningCluster> clusters;
};

// Uniform placement of vehicles and cluster heads over the square area.
Topology generate_topology(const ScenarioConfig& config, Rng& rng);

// Units handed to each offloading vehicle: floor(n_max / M). Throws
// InfeasibleBandwidthError when M > n_max.
int allocate_bandwidth(int vehicles, int n_max);

// One offloading epoch. Immutable once built; rates are derived from the
// stored gains so the same fading realization can be re-evaluated under a
// different blocklength regime.
class ProblemInstance {
 public:
  ProblemInstance(std::vector<Vehicle> vehicles, std::vector<MiningCluster> clusters,
                  ChannelParams params, Matrix<double> gains, Matrix<int> n_alloc);

  // Instance with a prescribed rate matrix and no channel model behind it.
  // Used by tests and the oracle audits.
  static ProblemInstance from_rates(Matrix<double> rates, std::vector<MiningCluster> clusters,
                                    std::vector<Vehicle> vehicles = {});

  std::size_t num_vehicles() const { return vehicles_.size(); }
  std::size_t num_clusters() const { return clusters_.size(); }

  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  const std::vector<MiningCluster>& clusters() const { return clusters_; }
  const ChannelParams& params() const { return params_; }
  const Matrix<double>& gains() const { return gains_; }
  const Matrix<int>& n_alloc() const { return n_alloc_; }
  const Matrix<double>& rates() const { return rates_; }

  double rate(std::size_t vehicle, std::size_t cluster) const { return rates_(vehicle, cluster); }
  bool feasible(std::size_t vehicle, std::size_t cluster) const {
    return rates_(vehicle, cluster) > 0.0;
  }

  // Same topology and fading, rates recomputed under new channel params.
  ProblemInstance with_params(const ChannelParams& params) const;

 private:
  ProblemInstance() = default;
  void check_shapes() const;

  std::vector<Vehicle> vehicles_;
  std::vector<MiningCluster> clusters_;
  ChannelParams params_;
  Matrix<double> gains_;
  Matrix<int> n_alloc_;
  Matrix<double> rates_;
};

// Samples vehicle-to-cluster-head fading and evaluates every link rate.
ProblemInstance build_instance(std::vector<Vehicle> vehicles, std::vector<MiningCluster> clusters,
                               const ChannelParams& params, double path_loss_exp, Rng& rng);

// Topology plus instance in one step.
ProblemInstance generate_instance(const ScenarioConfig& scenario, const ChannelParams& params,
                                  Rng& rng);

}  // namespace mcs
