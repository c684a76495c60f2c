#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mcs/matching_graph.hpp"
#include "mcs/scenario.hpp"

namespace mcs {

// Opening price of slot s: -ln((s-1)^(s-1) / s^s) = s ln s - (s-1) ln(s-1).
double initial_slot_price(int slot);

// Opening prices of slots 1..capacity.
std::vector<double> init_prices(const MiningCluster& cluster);

// Default utility offset: one nat above the highest opening price of any
// cluster.
double default_utility_offset(const ProblemInstance& instance);

// ceil(max_{i,j} (c + ln Omega_{i,j}) * alpha / delta), at least 1. alpha is
// the largest cluster capacity.
std::int64_t round_bound(const ProblemInstance& instance, double delta, double c);

struct AuctionState {
  std::vector<std::vector<double>> slot_prices;  // [cluster][slot - 1], nats
  Matching assignment;                           // temporary assignment
  std::vector<bool> abstained;                   // left the auction for good
  std::int64_t round = 0;
  double delta = 1e-4;
  double c = 0.0;

  static AuctionState initial(const ProblemInstance& instance, double delta, double c);

  // Vehicles still allowed to bid.
  std::vector<int> unassigned_pool() const;
};

struct PriceAnnouncement {
  int cluster = 0;
  double price = 0.0;  // min over the cluster's slots
  int slot = 1;        // arg-min, lowest index on ties
};

// Cheapest slot of a cluster. Occupied slots stay biddable, so a cluster
// withdraws only when it has no slots at all.
std::optional<PriceAnnouncement> announce_price(const AuctionState& state, int cluster);

struct Bid {
  int vehicle = 0;
  int cluster = 0;
  double amount = 0.0;  // nats, > 0
};

// Margins c + ln Omega - p_j over the feasible announced clusters. Bids the
// best-minus-second-best margin on the best cluster, or delta when the two
// are tied or only one cluster is reachable. The runner-up margin is floored
// at zero, the value of not offloading. No bid when nothing is reachable or
// the best margin is not positive.
std::optional<Bid> compute_bid(int vehicle, std::span<const PriceAnnouncement> announcements,
                               const ProblemInstance& instance, double c, double delta);

struct Award {
  int cluster = 0;
  int slot = 1;
  int vehicle = 0;
  int displaced = -1;  // previous holder returned to the pool, or -1
  double amount = 0.0;
};

// Highest bid wins each cluster's announced slot (lowest vehicle id on
// ties), displacing any holder; the slot price rises by the winning bid.
// Throws ProtocolError for bids at unknown clusters or from vehicles that
// already hold a slot.
std::vector<Award> resolve_round(AuctionState& state, std::span<const Bid> bids);

struct RoundTrace {
  std::int64_t round = 0;
  std::vector<Bid> bids;
  std::vector<Award> awards;
  std::vector<std::vector<double>> prices;  // after the round
};

struct AuctionOptions {
  double delta = 1e-4;
  std::optional<double> c_override;
  bool capture_trace = false;
};

struct AuctionResult {
  Matching matching;
  std::int64_t rounds = 0;  // includes the final round with no change
  std::int64_t round_bound = 1;
  double c = 0.0;
  std::vector<std::vector<double>> final_prices;
  std::vector<RoundTrace> trace;

  bool within_bound() const { return rounds <= round_bound; }
};

// Synchronous rounds until no assignment changes. Throws DivergenceError
// past twice the round bound.
AuctionResult run_auction(const ProblemInstance& instance, const AuctionOptions& options = {});

// One JSON object per round.
void write_trace_ndjson(std::ostream& out, std::span<const RoundTrace> trace);

}  // namespace mcs
