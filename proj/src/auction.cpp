#include "mcs/auction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "json.hpp"

#include "mcs/errors.hpp"

namespace mcs {

double initial_slot_price(int slot) { return -slot_discount(slot); }

std::vector<double> init_prices(const MiningCluster& cluster) {
  std::vector<double> prices(cluster.capacity);
  for (int s = 1; s <= cluster.capacity; ++s) prices[s - 1] = initial_slot_price(s);
  return prices;
}

double default_utility_offset(const ProblemInstance& instance) {
  double highest = 0.0;
  for (const auto& cluster : instance.clusters())
    highest = std::max(highest, initial_slot_price(cluster.capacity));
  return highest + 1.0;
}

std::int64_t round_bound(const ProblemInstance& instance, double delta, double c) {
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  double max_utility = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < instance.num_vehicles(); ++i)
    for (std::size_t j = 0; j < instance.num_clusters(); ++j)
      if (instance.feasible(i, j)) max_utility = std::max(max_utility, c + std::log(instance.rate(i, j)));
  int alpha = 0;
  for (const auto& cluster : instance.clusters()) alpha = std::max(alpha, cluster.capacity);

  const double raw = max_utility * alpha / delta;
  if (!(raw > 1.0)) return 1;
  constexpr double ceiling = static_cast<double>(std::numeric_limits<std::int64_t>::max() / 4);
  return static_cast<std::int64_t>(std::ceil(std::min(raw, ceiling)));
}

AuctionState AuctionState::initial(const ProblemInstance& instance, double delta, double c) {
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  AuctionState state;
  state.assignment = Matching(instance);
  state.abstained.assign(instance.num_vehicles(), false);
  state.delta = delta;
  state.c = c;
  for (const auto& cluster : instance.clusters()) state.slot_prices.push_back(init_prices(cluster));
  return state;
}

std::vector<int> AuctionState::unassigned_pool() const {
  std::vector<int> pool;
  for (std::size_t i = 0; i < abstained.size(); ++i)
    if (!abstained[i] && !assignment.is_assigned(static_cast<int>(i)))
      pool.push_back(static_cast<int>(i));
  return pool;
}

std::optional<PriceAnnouncement> announce_price(const AuctionState& state, int cluster) {
  const auto& prices = state.slot_prices.at(cluster);
  if (prices.empty()) return std::nullopt;
  const auto cheapest = std::min_element(prices.begin(), prices.end());
  return PriceAnnouncement{cluster, *cheapest, static_cast<int>(cheapest - prices.begin()) + 1};
}

namespace {

// Margins within this much of each other are a tie; below it the difference
// is rounding noise from earlier price updates.
constexpr double kTieTolerance = 1e-12;

// Shared by compute_bid and the auction loop, which passes cached log-rates.
template <typename LogRate>
std::optional<Bid> bid_for(int vehicle, std::span<const PriceAnnouncement> announcements,
                           LogRate&& log_rate, double c, double delta) {
  double best = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  int target = -1;
  for (const auto& a : announcements) {
    const auto lr = log_rate(a.cluster);
    if (!lr) continue;
    const double margin = c + *lr - a.price;
    if (target == -1 || margin > best) {
      second = best;
      best = margin;
      target = a.cluster;
    } else if (margin > second) {
      second = margin;
    }
  }
  if (target == -1 || !(best > 0.0)) return std::nullopt;
  const bool single = second == -std::numeric_limits<double>::infinity();
  // Abstaining is worth a zero margin, so a negative runner-up never pushes
  // the bid past the bidder's own margin.
  if (!single) second = std::max(second, 0.0);
  const double gap = best - second;
  const double amount =
      (!single && gap > kTieTolerance * std::max(1.0, std::abs(best))) ? gap : delta;
  return Bid{vehicle, target, amount};
}

}  // namespace

std::optional<Bid> compute_bid(int vehicle, std::span<const PriceAnnouncement> announcements,
                               const ProblemInstance& instance, double c, double delta) {
  auto log_rate = [&](int j) -> std::optional<double> {
    if (j < 0 || static_cast<std::size_t>(j) >= instance.num_clusters())
      throw ProtocolError("announcement from unknown cluster " + std::to_string(j));
    if (!instance.feasible(vehicle, j)) return std::nullopt;
    return std::log(instance.rate(vehicle, j));
  };
  return bid_for(vehicle, announcements, log_rate, c, delta);
}

std::vector<Award> resolve_round(AuctionState& state, std::span<const Bid> bids) {
  const auto clusters = state.slot_prices.size();
  // Best bid per cluster; std::map keeps awards in cluster order.
  std::map<int, Bid> best;
  std::vector<bool> seen(state.assignment.num_vehicles(), false);
  for (const auto& bid : bids) {
    if (bid.cluster < 0 || static_cast<std::size_t>(bid.cluster) >= clusters)
      throw ProtocolError("bid for unknown cluster " + std::to_string(bid.cluster));
    if (bid.vehicle < 0 || static_cast<std::size_t>(bid.vehicle) >= seen.size())
      throw ProtocolError("bid from unknown vehicle " + std::to_string(bid.vehicle));
    if (seen[bid.vehicle] || state.assignment.is_assigned(bid.vehicle))
      throw ProtocolError("vehicle " + std::to_string(bid.vehicle) + " may not bid this round");
    if (!(bid.amount > 0.0)) throw ProtocolError("bids must be positive");
    seen[bid.vehicle] = true;

    auto [it, inserted] = best.try_emplace(bid.cluster, bid);
    if (!inserted) {
      const Bid& held = it->second;
      if (bid.amount > held.amount || (bid.amount == held.amount && bid.vehicle < held.vehicle))
        it->second = bid;
    }
  }

  std::vector<Award> awards;
  awards.reserve(best.size());
  for (const auto& [cluster, bid] : best) {
    const auto announced = announce_price(state, cluster);
    if (!announced) throw ProtocolError("cluster " + std::to_string(cluster) + " has no slots");
    const SlotRef slot{cluster, announced->slot};
    const int previous = state.assignment.holder(slot);
    if (previous != -1) state.assignment.unassign(previous);
    state.assignment.assign(bid.vehicle, slot);
    state.slot_prices[cluster][announced->slot - 1] += bid.amount;
    awards.push_back({cluster, announced->slot, bid.vehicle, previous, bid.amount});
  }
  return awards;
}

AuctionResult run_auction(const ProblemInstance& instance, const AuctionOptions& options) {
  if (!(options.delta > 0.0)) throw ValidationError("delta must be positive");
  const double c = options.c_override.value_or(default_utility_offset(instance));
  const auto m = instance.num_vehicles();
  const auto n = instance.num_clusters();

  Matrix<double> log_rates(m, n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (instance.feasible(i, j)) log_rates(i, j) = std::log(instance.rate(i, j));

  AuctionResult result;
  result.c = c;
  result.round_bound = round_bound(instance, options.delta, c);
  const std::int64_t limit = 2 * result.round_bound;

  AuctionState state = AuctionState::initial(instance, options.delta, c);
  std::vector<PriceAnnouncement> announcements;
  std::vector<Bid> bids;
  for (;;) {
    ++state.round;
    if (state.round > limit)
      throw DivergenceError("auction exceeded " + std::to_string(limit) + " rounds");

    announcements.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (auto a = announce_price(state, static_cast<int>(j))) announcements.push_back(*a);

    bids.clear();
    for (std::size_t i = 0; i < m; ++i) {
      if (state.abstained[i] || state.assignment.is_assigned(static_cast<int>(i))) continue;
      auto log_rate = [&](int j) -> std::optional<double> {
        const double lr = log_rates(i, j);
        if (std::isnan(lr)) return std::nullopt;
        return lr;
      };
      if (auto bid = bid_for(static_cast<int>(i), announcements, log_rate, c, options.delta))
        bids.push_back(*bid);
      else
        state.abstained[i] = true;
    }
    if (bids.empty()) break;

    auto awards = resolve_round(state, bids);
    if (options.capture_trace)
      result.trace.push_back({state.round, bids, std::move(awards), state.slot_prices});
  }

  result.rounds = state.round;
  result.matching = std::move(state.assignment);
  result.final_prices = std::move(state.slot_prices);
  return result;
}

void write_trace_ndjson(std::ostream& out, std::span<const RoundTrace> trace) {
  for (const auto& record : trace) {
    nlohmann::json line;
    line["round"] = record.round;
    line["bids"] = nlohmann::json::array();
    for (const auto& b : record.bids)
      line["bids"].push_back({{"vehicle", b.vehicle}, {"cluster", b.cluster}, {"amount", b.amount}});
    line["winners"] = nlohmann::json::array();
    for (const auto& a : record.awards) {
      nlohmann::json w = {{"cluster", a.cluster}, {"slot", a.slot}, {"vehicle", a.vehicle},
                          {"amount", a.amount}};
      w["displaced"] = a.displaced >= 0 ? nlohmann::json(a.displaced) : nlohmann::json(nullptr);
      line["winners"].push_back(std::move(w));
    }
    line["prices"] = record.prices;
    out << line.dump() << '\n';
  }
}

}  // namespace mcs
