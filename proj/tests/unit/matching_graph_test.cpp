#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mcs/errors.hpp"
#include "mcs/matching_graph.hpp"
#include "oracles.hpp"

namespace {

mcs::ProblemInstance rates(std::initializer_list<std::initializer_list<double>> rows, int slots) {
  const std::size_t m = rows.size(), n = rows.begin()->size();
  mcs::Matrix<double> r(m, n);
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (double v : row) r(i, j++) = v;
    ++i;
  }
  return mcs::ProblemInstance::from_rates(std::move(r), oracle::clusters(static_cast<int>(n), slots));
}

// Random matching with each cluster's occupants on slots 1..S_j.
mcs::Matching random_contiguous(std::mt19937_64& rng, const mcs::ProblemInstance& inst) {
  mcs::Matching m(inst);
  std::vector<int> order(inst.num_vehicles());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<int> pick(-1, static_cast<int>(inst.num_clusters()) - 1);
  for (int i : order) {
    const int j = pick(rng);
    if (j < 0 || !inst.feasible(i, j)) continue;
    const int s = m.occupancy(j) + 1;
    if (s > inst.clusters()[j].capacity) continue;
    m.assign(i, {j, s});
  }
  return m;
}

}  // namespace

TEST(EdgeWeight, Examples) {
  EXPECT_NEAR(mcs::edge_weight(std::exp(1.0), 1), 1.0, 1e-15);
  EXPECT_NEAR(mcs::edge_weight(37.0, 2), std::log(37.0) - std::log(4.0), 1e-12);
  EXPECT_NEAR(mcs::edge_weight(37.0, 3), std::log(37.0) + std::log(4.0 / 27.0), 1e-12);
  EXPECT_EQ(mcs::slot_discount(1), 0.0);
  EXPECT_THROW(mcs::slot_discount(0), mcs::ValidationError);
  EXPECT_THROW(mcs::edge_weight(0.0, 1), mcs::ValidationError);
}

TEST(EdgeWeight, StrictlyDecreasingInSlot) {
  for (double omega : {0.5, 3.0, 1e4})
    for (int s = 1; s < 20; ++s) EXPECT_GT(mcs::edge_weight(omega, s), mcs::edge_weight(omega, s + 1));
}

TEST(EdgeWeight, DiscountsTelescope) {
  for (int size = 1; size <= 30; ++size) {
    double sum = 0.0;
    for (int s = 1; s <= size; ++s) sum += mcs::slot_discount(s);
    EXPECT_NEAR(sum, -size * std::log(static_cast<double>(size)), 1e-9) << size;
  }
}

TEST(ExpandGraph, EdgesOnlyOnFeasibleLinksUpToCapacity) {
  auto inst = mcs::ProblemInstance::from_rates(
      mcs::Matrix<double>(2, 2, 5.0),
      {{0, {}, 3, 2}, {1, {}, 1, 1}});
  const auto edges = mcs::expand_graph(inst);
  EXPECT_EQ(edges.size(), 2u * (2 + 1));
  for (const auto& e : edges) {
    EXPECT_LE(e.slot, inst.clusters()[e.cluster].capacity);
    EXPECT_NEAR(e.weight, mcs::edge_weight(5.0, e.slot), 1e-15);
  }
  const auto none = rates({{0.0, 0.0}}, 3);
  EXPECT_TRUE(mcs::expand_graph(none).empty());
}

TEST(Objective, Examples) {
  const auto one = rates({{4.0}}, 2);
  mcs::Matching m1(one);
  m1.assign(0, {0, 1});
  EXPECT_NEAR(mcs::objective_value(m1, one), std::log(4.0), 1e-15);

  const auto two = rates({{4.0}, {2.0}}, 2);
  mcs::Matching m2(two);
  m2.assign(0, {0, 1});
  m2.assign(1, {0, 2});
  EXPECT_NEAR(mcs::objective_value(m2, two), std::log(2.0), 1e-15);
}

TEST(Objective, MarginalGainOfSecondVehicle) {
  const double o11 = 7.0, o21 = 3.0;
  const auto inst = rates({{o11}, {o21}}, 2);
  mcs::Matching alone(inst), both(inst);
  alone.assign(0, {0, 1});
  both.assign(0, {0, 1});
  both.assign(1, {0, 2});
  const double change = mcs::objective_value(both, inst) - mcs::objective_value(alone, inst);
  EXPECT_NEAR(change, std::log(o21 / 4.0) + std::log(o11) - std::log(o11) +
                          (std::log(o11 / 2.0) - std::log(o11) + std::log(2.0)),
              1e-12);
  EXPECT_NEAR(change, std::log(o11 / 2.0) - std::log(o11) + std::log(o21 / 2.0), 1e-12);
  EXPECT_NEAR(change, mcs::edge_weight(o21, 2), 1e-12);
}

TEST(Objective, DegenerateOnZeroRate) {
  const auto inst = rates({{0.0, 2.0}}, 1);
  mcs::Matching m(inst);
  m.assign(0, {0, 1});
  EXPECT_THROW(mcs::objective_value(m, inst), mcs::DegenerateObjectiveError);
  EXPECT_EQ(mcs::objective_value(mcs::Matching(inst), inst), 0.0);
}

TEST(Objective, InvariantUnderSlotPermutation) {
  const auto inst = rates({{4.0}, {9.0}, {2.5}}, 3);
  mcs::Matching a(inst), b(inst);
  a.assign(0, {0, 1});
  a.assign(1, {0, 2});
  a.assign(2, {0, 3});
  b.assign(2, {0, 1});
  b.assign(0, {0, 2});
  b.assign(1, {0, 3});
  EXPECT_NEAR(mcs::objective_value(a, inst), mcs::objective_value(b, inst), 1e-12);
  EXPECT_NEAR(mcs::objective_value(a, inst), oracle::log_share_objective(a, inst), 1e-12);
}

TEST(MatchingWeight, Examples) {
  const auto inst = rates({{6.0}, {10.0}}, 2);
  const auto edges = mcs::expand_graph(inst);
  mcs::Matching empty(inst);
  EXPECT_EQ(mcs::matching_weight(empty, edges), 0.0);
  mcs::Matching one(inst);
  one.assign(0, {0, 1});
  EXPECT_NEAR(mcs::matching_weight(one, edges), std::log(6.0), 1e-15);
  one.assign(1, {0, 2});
  EXPECT_NEAR(mcs::matching_weight(one, edges), std::log(6.0) + std::log(10.0) - std::log(4.0),
              1e-12);
  EXPECT_NEAR(mcs::matching_weight(one, edges), std::log(3.0) + std::log(5.0), 1e-12);
}

TEST(MatchingWeight, MissingEdgeIsInconsistent) {
  const auto inst = rates({{6.0, 0.0}}, 1);
  mcs::Matching m(inst);
  m.assign(0, {1, 1});
  EXPECT_THROW(mcs::matching_weight(m, mcs::expand_graph(inst)), mcs::ConsistencyError);
}

TEST(MatchingWeight, TelescopesToObjectiveOnRandomMatchings) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> size(1, 8), nc(1, 4), slots(1, 4);
  for (int k = 0; k < 300; ++k) {
    const auto inst = oracle::random_rates(rng, size(rng), nc(rng), slots(rng));
    const auto m = random_contiguous(rng, inst);
    EXPECT_NEAR(mcs::matching_weight(m, mcs::expand_graph(inst)), mcs::objective_value(m, inst),
                1e-9);
    EXPECT_NEAR(mcs::objective_value(m, inst), oracle::log_share_objective(m, inst), 1e-9);
    EXPECT_FALSE(mcs::feasibility_violation(m, inst).has_value());
  }
}

TEST(Matching, Bookkeeping) {
  const auto inst = rates({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}}, 2);
  mcs::Matching m(inst);
  m.assign(0, {1, 2});
  m.assign(2, {1, 1});
  EXPECT_EQ(m.holder({1, 2}), 0);
  EXPECT_EQ(m.holder({0, 1}), -1);
  EXPECT_EQ(m.occupancy(1), 2);
  EXPECT_EQ(m.assigned_count(), 2);
  EXPECT_EQ(m.unassigned(), std::vector<int>{1});
  EXPECT_THROW(m.assign(1, {1, 1}), mcs::ConsistencyError);
  EXPECT_THROW(m.assign(0, {0, 1}), mcs::ConsistencyError);
  EXPECT_THROW(m.assign(1, {0, 3}), mcs::ConsistencyError);
  EXPECT_THROW(m.assign(1, {2, 1}), mcs::ConsistencyError);
  const auto shares = m.shares();
  EXPECT_DOUBLE_EQ(shares(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(shares(2, 1), 0.5);
  EXPECT_EQ(m.indicator()(1, 0) + m.indicator()(1, 1), 0);
  m.unassign(0);
  EXPECT_FALSE(m.is_assigned(0));
  EXPECT_EQ(m.holder({1, 2}), -1);
}

TEST(Feasibility, SharesSumToOneOnOccupiedClusters) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 200; ++k) {
    const auto inst = oracle::random_rates(rng, 6, 3, 3);
    const auto m = random_contiguous(rng, inst);
    const auto shares = m.shares();
    for (std::size_t j = 0; j < inst.num_clusters(); ++j) {
      double total = 0.0;
      for (std::size_t i = 0; i < inst.num_vehicles(); ++i) total += shares(i, j);
      if (m.occupancy(static_cast<int>(j)) > 0) EXPECT_NEAR(total, 1.0, 1e-12);
      else EXPECT_EQ(total, 0.0);
    }
  }
}

TEST(Feasibility, FlagsInfeasibleLink) {
  const auto inst = rates({{0.0, 3.0}}, 1);
  mcs::Matching m(inst);
  m.assign(0, {0, 1});
  EXPECT_TRUE(mcs::feasibility_violation(m, inst).has_value());
  mcs::Matching ok(inst);
  ok.assign(0, {1, 1});
  EXPECT_FALSE(mcs::feasibility_violation(ok, inst).has_value());
}

TEST(Gains, UnassignedContributeZero) {
  const auto inst = rates({{4.0}, {8.0}, {5.0}}, 2);
  mcs::Matching m(inst);
  m.assign(0, {0, 1});
  m.assign(1, {0, 2});
  EXPECT_EQ(mcs::offloading_gains(m, inst), (std::vector<double>{2.0, 4.0, 0.0}));
}
