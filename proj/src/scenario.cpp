#include "mcs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mcs/errors.hpp"

namespace mcs {

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

void ScenarioConfig::validate() const {
  if (!(area_m > 0.0) || !std::isfinite(area_m)) throw ValidationError("area must be positive");
  if (vehicles < 1) throw ValidationError("need at least one offloading vehicle");
  if (clusters < 1) throw ValidationError("need at least one mining cluster");
  if (slots < 1) throw ValidationError("clusters need at least one member vehicle");
  const int alpha = effective_capacity();
  if (alpha < 1 || alpha > slots)
    throw ValidationError("capacity must lie in [1, slots], got " + std::to_string(alpha));
  if (!std::isfinite(path_loss_exp) || path_loss_exp < 0.0)
    throw ValidationError("path loss exponent must be non-negative");
  if (!std::isfinite(tx_power_dbm)) throw ValidationError("transmit power must be finite");
}

Topology generate_topology(const ScenarioConfig& config, Rng& rng) {
  config.validate();
  std::uniform_real_distribution<double> coord(0.0, config.area_m);
  const double power = dbm_to_watts(config.tx_power_dbm);

  Topology topo;
  topo.vehicles.reserve(config.vehicles);
  for (int i = 0; i < config.vehicles; ++i) {
    const double x = coord(rng);
    const double y = coord(rng);
    topo.vehicles.push_back({i, {x, y}, power});
  }
  topo.clusters.reserve(config.clusters);
  for (int j = 0; j < config.clusters; ++j) {
    const double x = coord(rng);
    const double y = coord(rng);
    topo.clusters.push_back({j, {x, y}, config.slots, config.effective_capacity()});
  }
  return topo;
}

int allocate_bandwidth(int vehicles, int n_max) {
  if (vehicles < 1) throw ValidationError("need at least one offloading vehicle");
  if (n_max < 1) throw ValidationError("n_max must be at least 1");
  if (vehicles > n_max)
    throw InfeasibleBandwidthError(std::to_string(vehicles) + " vehicles cannot share " +
                                   std::to_string(n_max) + " bandwidth units");
  return n_max / vehicles;
}

namespace {

void check_entities(const std::vector<Vehicle>& vehicles,
                    const std::vector<MiningCluster>& clusters) {
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    if (vehicles[i].id != static_cast<int>(i))
      throw ValidationError("vehicle ids must equal their index");
    if (!(vehicles[i].tx_power_w > 0.0)) throw ValidationError("transmit power must be positive");
  }
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    const auto& c = clusters[j];
    if (c.id != static_cast<int>(j)) throw ValidationError("cluster ids must equal their index");
    if (c.v_slots < 1 || c.capacity < 1 || c.capacity > c.v_slots)
      throw ValidationError("cluster " + std::to_string(j) + " needs 1 <= capacity <= slots");
  }
}

Matrix<double> compute_rates(const std::vector<Vehicle>& vehicles, const ChannelParams& params,
                             const Matrix<double>& gains, const Matrix<int>& n_alloc) {
  Matrix<double> rates(gains.rows(), gains.cols());
  for (std::size_t i = 0; i < gains.rows(); ++i) {
    for (std::size_t j = 0; j < gains.cols(); ++j) {
      const auto link = make_link(params, gains(i, j), vehicles[i].tx_power_w, n_alloc(i, j));
      rates(i, j) = transmission_rate(params, link);
    }
  }
  return rates;
}

}  // namespace

ProblemInstance::ProblemInstance(std::vector<Vehicle> vehicles,
                                 std::vector<MiningCluster> clusters, ChannelParams params,
                                 Matrix<double> gains, Matrix<int> n_alloc)
    : vehicles_(std::move(vehicles)),
      clusters_(std::move(clusters)),
      params_(params),
      gains_(std::move(gains)),
      n_alloc_(std::move(n_alloc)) {
  params_.validate();
  check_entities(vehicles_, clusters_);
  check_shapes();
  // Each vehicle transmits on at most one link, so its row holds one
  // allocation; the sum over vehicles must fit in the coherence band.
  long total = 0;
  for (std::size_t i = 0; i < n_alloc_.rows(); ++i) {
    int widest = 0;
    for (int n : n_alloc_.row(i)) widest = std::max(widest, n);
    total += widest;
  }
  if (total > params_.n_max)
    throw InfeasibleBandwidthError("bandwidth allocation exceeds n_max");
  rates_ = compute_rates(vehicles_, params_, gains_, n_alloc_);
}

ProblemInstance ProblemInstance::from_rates(Matrix<double> rates,
                                            std::vector<MiningCluster> clusters,
                                            std::vector<Vehicle> vehicles) {
  if (rates.cols() != clusters.size())
    throw ValidationError("rate matrix columns must match cluster count");
  if (vehicles.empty()) {
    for (std::size_t i = 0; i < rates.rows(); ++i)
      vehicles.push_back({static_cast<int>(i), {}, 1.0});
  }
  if (rates.rows() != vehicles.size())
    throw ValidationError("rate matrix rows must match vehicle count");
  for (double r : rates.data())
    if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("rates must be finite and >= 0");
  check_entities(vehicles, clusters);

  ProblemInstance inst;
  inst.params_.n_max = std::max<int>(1, static_cast<int>(vehicles.size()));
  inst.vehicles_ = std::move(vehicles);
  inst.clusters_ = std::move(clusters);
  inst.n_alloc_ = Matrix<int>(rates.rows(), rates.cols(), 1);
  inst.rates_ = std::move(rates);
  return inst;
}

void ProblemInstance::check_shapes() const {
  const auto m = vehicles_.size();
  const auto n = clusters_.size();
  if (gains_.rows() != m || gains_.cols() != n || n_alloc_.rows() != m || n_alloc_.cols() != n)
    throw ValidationError("gain and allocation matrices must be M x N");
}

ProblemInstance ProblemInstance::with_params(const ChannelParams& params) const {
  if (gains_.rows() != vehicles_.size())
    throw ConsistencyError("instance was built from rates and has no channel model");
  return ProblemInstance(vehicles_, clusters_, params, gains_, n_alloc_);
}

ProblemInstance build_instance(std::vector<Vehicle> vehicles, std::vector<MiningCluster> clusters,
                               const ChannelParams& params, double path_loss_exp, Rng& rng) {
  params.validate();
  const auto m = vehicles.size();
  const auto n = clusters.size();
  if (m == 0 || n == 0) throw ValidationError("instance needs vehicles and clusters");
  const int units = allocate_bandwidth(static_cast<int>(m), params.n_max);

  Matrix<double> gains(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      gains(i, j) = sample_rayleigh_gain(
          rng, distance(vehicles[i].position, clusters[j].head), path_loss_exp);

  return ProblemInstance(std::move(vehicles), std::move(clusters), params, std::move(gains),
                         Matrix<int>(m, n, units));
}

ProblemInstance generate_instance(const ScenarioConfig& scenario, const ChannelParams& params,
                                  Rng& rng) {
  auto topo = generate_topology(scenario, rng);
  return build_instance(std::move(topo.vehicles), std::move(topo.clusters), params,
                        scenario.path_loss_exp, rng);
}

}  // namespace mcs
