#include <gtest/gtest.h>

#include "surropt/errors.hpp"
#include "surropt/two_stage.hpp"

namespace surropt {
namespace {

CostParams newsvendor_costs() {
  CostParams c;
  c.ordering = 1.0;
  c.shortage = 10.0;
  c.holding = 0.1;
  c.outdate = 0.0;
  c.transship_unit = 0.0;
  return c;
}

TEST(BuildSaa, ZeroEverythingGivesZero) {
  const NetworkShape shape;
  const std::vector<DemandScenario> scenarios{DemandScenario(4, 0)};
  const auto sol = solve_stage_one(InventoryState(shape), CostParams{}, scenarios);
  EXPECT_TRUE(sol.decision.is_zero());
  EXPECT_NEAR(sol.lp_objective, 0.0, 1e-12);
  EXPECT_NEAR(sol.expected_cost, 0.0, 1e-12);
}

TEST(BuildSaa, Newsvendor) {
  const NetworkShape shape{1, 2};
  const std::vector<DemandScenario> scenarios{{0}, {2}};
  const auto sol = solve_stage_one(InventoryState(shape), newsvendor_costs(), scenarios);
  EXPECT_EQ(sol.decision.order(0), 2);
  EXPECT_NEAR(sol.lp_objective, 2.1, 1e-9);
  EXPECT_NEAR(sol.expected_cost, 2.1, 1e-12);
  EXPECT_TRUE(sol.relaxation_integral);

  const auto bf = brute_force_oracle(InventoryState(shape), newsvendor_costs(), scenarios, 4);
  EXPECT_EQ(bf.decision.order(0), 2);
  EXPECT_NEAR(bf.objective, 2.1, 1e-12);
  // Hand values for the other order sizes.
  DecisionVector d(shape);
  d.order(0) = 1;
  EXPECT_NEAR(expected_cost(InventoryState(shape), d, scenarios, newsvendor_costs()), 6.05, 1e-12);
  d.order(0) = 0;
  EXPECT_NEAR(expected_cost(InventoryState(shape), d, scenarios, newsvendor_costs()), 10.0, 1e-12);
}

TEST(BuildSaa, AggregationIsExact) {
  const NetworkShape shape{3, 3};
  InventoryState s(shape);
  s.at(0, 2) = 3;
  s.at(1, 1) = 1;
  s.at(2, 0) = 2;
  CostParams c;
  Rng rng = make_rng(3);
  std::vector<DemandScenario> scenarios;
  for (int k = 0; k < 12; ++k)
    scenarios.push_back({static_cast<int>(uniform_below(rng, 4)), static_cast<int>(uniform_below(rng, 3)),
                         static_cast<int>(uniform_below(rng, 5))});
  const auto a = build_saa(s, scenarios, c, true);
  const auto b = build_saa(s, scenarios, c, false);
  EXPECT_LT(a.lp.cols(), b.lp.cols());
  const auto sa = solve_lp(a.lp), sb = solve_lp(b.lp);
  ASSERT_EQ(sa.status, LpStatus::kOptimal);
  ASSERT_EQ(sb.status, LpStatus::kOptimal);
  EXPECT_NEAR(sa.objective, sb.objective, 1e-8);
}

TEST(SolveStageOne, TransshipsToStockedOutNeighbour) {
  const NetworkShape shape{2, 2};
  InventoryState s(shape);
  s.at(0, 0) = 2;
  CostParams c;
  c.ordering = 5;
  c.transship_unit = 1;
  c.shortage = 100;
  c.holding = 0.5;
  c.outdate = 1;
  const std::vector<DemandScenario> scenarios{{0, 1}};
  const auto sol = solve_stage_one(s, c, scenarios);
  EXPECT_GT(sol.decision.ship(0, 1, 0), 0);
  EXPECT_EQ(sol.decision.order(1), 0);
  const auto bf = brute_force_oracle(s, c, scenarios, 3);
  EXPECT_GT(bf.decision.ship(0, 1, 0), 0);
  EXPECT_NEAR(sol.expected_cost, bf.objective, 1e-9);
}

TEST(SolveStageOne, LpBoundsEvaluatedCostAndIsFeasible) {
  const NetworkShape shape;
  DemandModel model(reference_demand_configs());
  Rng rng = make_rng(10);
  InventoryState s(shape);
  for (int i = 0; i < 4; ++i)
    for (int m = 0; m < 11; ++m) s.at(i, m) = static_cast<Units>(uniform_below(rng, 3));
  SaaConfig saa;
  saa.scenario_count = 20;
  for (auto mode : {RoundingMode::kNearest, RoundingMode::kFloor}) {
    saa.rounding = mode;
    Rng srng = make_rng(4);
    const auto sol = solve_stage_one(s, CostParams{}, model, saa, srng);
    EXPECT_TRUE(check_feasibility(s, sol.decision).empty());
    EXPECT_TRUE(sol.decision.nonnegative());
    EXPECT_LE(sol.lp_objective, sol.expected_cost + 1e-9);
    EXPECT_EQ(sol.scenarios, 20u);
  }
}

TEST(SolveStageOne, DeterministicForSeed) {
  DemandModel model(reference_demand_configs());
  SaaConfig saa;
  InventoryState s(NetworkShape{});
  s.at(2, 4) = 6;
  Rng a = make_rng(1), b = make_rng(1);
  EXPECT_EQ(solve_stage_one(s, CostParams{}, model, saa, a).decision,
            solve_stage_one(s, CostParams{}, model, saa, b).decision);
}

TEST(BruteForceOracle, ZeroDemandZeroDecision) {
  const NetworkShape shape{2, 2};
  InventoryState s(shape);
  s.at(0, 1) = 1;
  const std::vector<DemandScenario> scenarios{{0, 0}};
  CostParams c;
  c.outdate = 0;
  c.holding = 0;
  const auto bf = brute_force_oracle(s, c, scenarios, 2);
  EXPECT_TRUE(bf.decision.is_zero());
  EXPECT_NEAR(bf.objective, 0.0, 1e-12);
}

TEST(BruteForceOracle, SymmetricUnderRelabeling) {
  const NetworkShape shape{2, 2};
  InventoryState s(shape);
  s.at(0, 0) = 1;
  s.at(1, 0) = 1;
  const std::vector<DemandScenario> scenarios{{1, 2}, {2, 1}};
  const std::vector<DemandScenario> swapped{{2, 1}, {1, 2}};
  CostParams c;
  const auto a = brute_force_oracle(s, c, scenarios, 3);
  const auto b = brute_force_oracle(s, c, swapped, 3);
  EXPECT_NEAR(a.objective, b.objective, 1e-12);
}

TEST(BruteForceOracle, CapsEnforced) {
  const std::vector<DemandScenario> one{{0, 0, 0}};
  EXPECT_THROW(brute_force_oracle(InventoryState(NetworkShape{3, 1}), CostParams{}, one, 2), InputError);
  const std::vector<DemandScenario> two{{0, 0}};
  EXPECT_THROW(brute_force_oracle(InventoryState(NetworkShape{2, 3}), CostParams{}, two, 2), InputError);
  EXPECT_THROW(brute_force_oracle(InventoryState(NetworkShape{2, 2}), CostParams{}, two, 5), InputError);
}

TEST(SaaConfig, Validation) {
  SaaConfig s;
  s.scenario_count = 0;
  EXPECT_THROW(s.validate(), ConfigError);
}

}  // namespace
}  // namespace surropt
