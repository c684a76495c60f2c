#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mcs/auction.hpp"
#include "mcs/baseline.hpp"
#include "mcs/errors.hpp"
#include "oracles.hpp"

namespace {

mcs::ProblemInstance placed(std::vector<mcs::Position> vehicles, std::vector<mcs::Position> heads,
                            int capacity, double rate = 10.0) {
  std::vector<mcs::Vehicle> vs;
  for (std::size_t i = 0; i < vehicles.size(); ++i) vs.push_back({static_cast<int>(i), vehicles[i], 1.0});
  std::vector<mcs::MiningCluster> cs;
  for (std::size_t j = 0; j < heads.size(); ++j)
    cs.push_back({static_cast<int>(j), heads[j], capacity, capacity});
  return mcs::ProblemInstance::from_rates(mcs::Matrix<double>(vs.size(), cs.size(), rate), cs, vs);
}

// Every map vehicle -> cluster-or-none within capacity, with its objective.
template <typename F>
void for_each_map(const mcs::ProblemInstance& inst, F&& visit) {
  const int m = static_cast<int>(inst.num_vehicles()), n = static_cast<int>(inst.num_clusters());
  std::vector<int> choice(m, -1);
  std::function<void(int)> go = [&](int i) {
    if (i == m) {
      std::vector<int> load(n, 0);
      for (int c : choice)
        if (c >= 0) ++load[c];
      for (int j = 0; j < n; ++j)
        if (load[j] > inst.clusters()[j].capacity) return;
      for (int k = 0; k < m; ++k)
        if (choice[k] >= 0 && !inst.feasible(k, choice[k])) return;
      double value = 0.0;
      for (int k = 0; k < m; ++k)
        if (choice[k] >= 0) value += std::log(inst.rate(k, choice[k]) / load[choice[k]]);
      visit(choice, load, value);
      return;
    }
    for (int j = -1; j < n; ++j) {
      choice[i] = j;
      go(i + 1);
    }
  };
  go(0);
}

}  // namespace

TEST(Nearest, PicksCloserCluster) {
  const auto inst = placed({{0, 0}}, {{50, 0}, {10, 0}}, 2);
  const auto m = mcs::nearest_cluster(inst);
  ASSERT_TRUE(m.is_assigned(0));
  EXPECT_EQ(m.slot_of(0)->cluster, 1);
}

TEST(Nearest, CapacitySaturation) {
  const auto inst = placed({{0, 0}, {0, 0}, {0, 0}, {0, 0}}, {{5, 5}}, 3);
  const auto m = mcs::nearest_cluster(inst);
  EXPECT_EQ(m.unassigned(), std::vector<int>{3});
  EXPECT_FALSE(mcs::feasibility_violation(m, inst).has_value());
}

TEST(Nearest, TieGoesToLowestId) {
  const auto inst = placed({{0, 0}}, {{10, 0}, {0, 10}, {-10, 0}}, 1);
  EXPECT_EQ(mcs::nearest_cluster(inst).slot_of(0)->cluster, 0);
}

TEST(Nearest, SkipsInfeasibleAndFullClusters) {
  std::vector<mcs::Vehicle> vs{{0, {0, 0}, 1.0}, {1, {1, 0}, 1.0}};
  std::vector<mcs::MiningCluster> cs{{0, {2, 0}, 1, 1}, {1, {9, 0}, 1, 1}, {2, {50, 0}, 1, 1}};
  mcs::Matrix<double> r(2, 3, 5.0);
  r(1, 1) = 0.0;
  const auto inst = mcs::ProblemInstance::from_rates(r, cs, vs);
  const auto m = mcs::nearest_cluster(inst);
  EXPECT_EQ(m.slot_of(0)->cluster, 0);
  EXPECT_EQ(m.slot_of(1)->cluster, 2);
}

TEST(BruteForce, TwoVehiclesOneCluster) {
  mcs::Matrix<double> r(2, 1);
  r(0, 0) = 4.0;
  r(1, 0) = 2.0;
  const auto inst = mcs::ProblemInstance::from_rates(r, oracle::clusters(1, 2));
  const auto sol = mcs::brute_force_optimal(inst);
  EXPECT_EQ(sol.matching.assigned_count(), 2);
  EXPECT_NEAR(sol.value, std::log(2.0), 1e-12);
}

TEST(BruteForce, InfeasibleRowStaysUnassigned) {
  const auto inst = mcs::ProblemInstance::from_rates(mcs::Matrix<double>(1, 2, 0.0),
                                                     oracle::clusters(2, 1));
  const auto sol = mcs::brute_force_optimal(inst);
  EXPECT_FALSE(sol.matching.is_assigned(0));
  EXPECT_EQ(sol.value, 0.0);
}

TEST(BruteForce, DominatesEveryAdmissibleMap) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 60; ++k) {
    const auto inst = oracle::random_rates(rng, 3, 2, 2);
    const auto sol = mcs::brute_force_optimal(inst);
    EXPECT_NEAR(mcs::objective_value(sol.matching, inst), sol.value, 1e-12);
    int admissible = 0;
    for_each_map(inst, [&](const std::vector<int>& choice, const std::vector<int>& load, double v) {
      for (std::size_t i = 0; i < choice.size(); ++i) {
        if (choice[i] >= 0) continue;
        for (std::size_t j = 0; j < load.size(); ++j)
          if (inst.feasible(i, j) && load[j] < inst.clusters()[j].capacity) return;
      }
      ++admissible;
      EXPECT_GE(sol.value, v - 1e-12);
    });
    EXPECT_GT(admissible, 0);
  }
}

TEST(BruteForce, SizeGuard) {
  const auto inst = mcs::ProblemInstance::from_rates(mcs::Matrix<double>(12, 6, 2.0),
                                                     oracle::clusters(6, 2));
  EXPECT_THROW(mcs::brute_force_optimal(inst), mcs::SizeGuardError);
}

TEST(BruteForce, DominatesHeuristics) {
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<int> m(1, 6), n(1, 3), v(1, 3);
  for (int k = 0; k < 100; ++k) {
    const auto inst = oracle::random_rates(rng, m(rng), n(rng), v(rng));
    const auto sol = mcs::brute_force_optimal(inst);
    EXPECT_FALSE(mcs::feasibility_violation(sol.matching, inst).has_value());
    const auto auction = mcs::run_auction(inst, {1e-3, {}, false}).matching;
    EXPECT_GE(sol.value, mcs::objective_value(auction, inst) - 1e-9);
    EXPECT_GE(sol.value, mcs::objective_value(mcs::nearest_cluster(inst), inst) - 1e-9);
  }
}

TEST(MatchingOracle, Empty) {
  const auto sol = mcs::max_weight_matching_oracle({}, 3, oracle::clusters(2, 2));
  EXPECT_EQ(sol.value, 0.0);
  EXPECT_EQ(sol.matching.assigned_count(), 0);
}

TEST(MatchingOracle, PicksHeavierSlot) {
  const std::vector<mcs::ExpandedEdge> edges{{0, 0, 1, std::log(4.0)}, {0, 1, 1, std::log(2.0)}};
  const auto sol = mcs::max_weight_matching_oracle(edges, 1, oracle::clusters(2, 1));
  EXPECT_NEAR(sol.value, std::log(4.0), 1e-15);
  EXPECT_EQ(sol.matching.slot_of(0)->cluster, 0);
}

TEST(MatchingOracle, AgreesWithEnumeration) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> w(0.5, 2.0);
  for (int k = 0; k < 100; ++k) {
    const auto clusters = oracle::clusters(2, 2);
    std::vector<mcs::ExpandedEdge> edges;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j)
        for (int s = 1; s <= 2; ++s) edges.push_back({i, j, s, w(rng)});
    const auto sol = mcs::max_weight_matching_oracle(edges, 4, clusters);
    EXPECT_NEAR(sol.value, oracle::best_matching_weight(edges, 4), 1e-9);
    EXPECT_NEAR(mcs::matching_weight(sol.matching, edges), sol.value, 1e-9);
  }
}

TEST(MatchingOracle, AgreesWithEnumerationOnExpandedGraphs) {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> m(1, 6), n(1, 3), v(1, 3);
  for (int k = 0; k < 200; ++k) {
    const auto inst = oracle::random_rates(rng, m(rng), n(rng), v(rng));
    const auto edges = mcs::expand_graph(inst);
    const auto sol = mcs::max_weight_matching_oracle(edges, inst.num_vehicles(), inst.clusters());
    EXPECT_NEAR(sol.value, oracle::best_matching_weight(edges, inst.num_vehicles()), 1e-9);
    EXPECT_FALSE(mcs::feasibility_violation(sol.matching, inst).has_value());
  }
}

TEST(MatchingOracle, SizeGuard) {
  EXPECT_THROW(mcs::max_weight_matching_oracle({}, 2500, oracle::clusters(2, 3)),
               mcs::SizeGuardError);
}
