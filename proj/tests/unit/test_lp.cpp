#include <gtest/gtest.h>

#include <sstream>

#include "oracles/generators.hpp"
#include "oracles/vertex_enumeration.hpp"
#include "surropt/errors.hpp"
#include "surropt/lp.hpp"
#include "surropt/rng.hpp"

namespace surropt {
namespace {

using Terms = std::vector<std::pair<std::size_t, double>>;

TEST(SolveLp, MaximizeSingleVariable) {
  LinearProgram lp(ObjectiveSense::kMaximize);
  const auto x = lp.add_variable(1.0);
  lp.add_row(Terms{{x, 1.0}}, RowSense::kLessEqual, 1.0);
  const auto s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.x[0], 1.0, 1e-12);
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
}

TEST(SolveLp, CoveringRow) {
  LinearProgram lp;
  const auto x = lp.add_variable(1.0), y = lp.add_variable(1.0);
  lp.add_row(Terms{{x, 1.0}, {y, 1.0}}, RowSense::kGreaterEqual, 2.0);
  const auto s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.objective, 2.0, 1e-12);
}

TEST(SolveLp, InfeasibleAndUnbounded) {
  LinearProgram a;
  const auto x = a.add_variable(1.0);
  a.add_row(Terms{{x, 1.0}}, RowSense::kGreaterEqual, 3.0);
  a.add_row(Terms{{x, 1.0}}, RowSense::kLessEqual, 2.0);
  EXPECT_EQ(solve_lp(a).status, LpStatus::kInfeasible);

  LinearProgram b(ObjectiveSense::kMaximize);
  const auto y = b.add_variable(1.0);
  const auto z = b.add_variable(0.0);
  b.add_row(Terms{{y, 1.0}, {z, -1.0}}, RowSense::kLessEqual, 1.0);
  EXPECT_EQ(solve_lp(b).status, LpStatus::kUnbounded);
}

TEST(SolveLp, BoundsFreeAndFixedVariables) {
  LinearProgram lp;
  const auto x = lp.add_variable(1.0, -kInfinity, kInfinity);  // free
  const auto y = lp.add_variable(-1.0, 1.0, 4.0);
  const auto z = lp.add_variable(3.0, 2.0, 2.0);  // fixed
  lp.add_row(Terms{{x, 1.0}, {y, 1.0}}, RowSense::kGreaterEqual, -5.0);
  lp.add_row(Terms{{x, 1.0}, {z, 1.0}}, RowSense::kEqual, -1.0);
  const auto s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.x[x], -3.0, 1e-9);
  EXPECT_NEAR(s.x[y], 4.0, 1e-9);
  EXPECT_NEAR(s.x[z], 2.0, 1e-12);
  EXPECT_NEAR(s.objective, -3.0 - 4.0 + 6.0, 1e-9);
}

TEST(SolveLp, ObjectiveOffsetIncluded) {
  LinearProgram lp;
  lp.add_variable(1.0);
  lp.set_objective_offset(7.5);
  EXPECT_NEAR(solve_lp(lp).objective, 7.5, 1e-12);
}

TEST(SolveLp, InvalidProgramRejected) {
  LinearProgram lp;
  lp.add_variable(1.0, 2.0, 1.0);
  EXPECT_THROW(solve_lp(lp), InputError);
  LinearProgram rows_first;
  const auto x = rows_first.add_variable(1.0);
  rows_first.add_row(Terms{{x, 1.0}}, RowSense::kLessEqual, 1.0);
  EXPECT_ANY_THROW(rows_first.add_variable(1.0));
}

TEST(SolveLp, PivotCapIsResourceError) {
  LinearProgram lp(ObjectiveSense::kMaximize);
  std::vector<std::size_t> v;
  for (int k = 0; k < 5; ++k) v.push_back(lp.add_variable(1.0 + k));
  for (int r = 0; r < 5; ++r) {
    Terms t;
    for (int k = 0; k < 5; ++k) t.push_back({v[k], 1.0 + ((r + k) % 3)});
    lp.add_row(t, RowSense::kLessEqual, 10.0);
  }
  SimplexOptions o;
  o.max_pivots = 1;
  EXPECT_THROW(solve_lp(lp, o), ResourceError);
}

using oracle::random_feasible_lp;

TEST(SolveLp, MatchesVertexEnumeration) {
  Rng rng = make_rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const auto n = 1 + uniform_below(rng, 6);
    const auto m = 1 + uniform_below(rng, 5);
    const auto lp = random_feasible_lp(rng, n, m);
    const auto s = solve_lp(lp);
    const auto o = oracle::enumerate_vertices(lp);
    ASSERT_TRUE(o.feasible) << trial;
    ASSERT_EQ(s.status, LpStatus::kOptimal) << trial;
    EXPECT_NEAR(s.objective, o.objective, 1e-7 * (1 + std::abs(o.objective))) << trial;
    EXPECT_LE(lp.max_violation(s.x), 1e-7);
    EXPECT_NEAR(lp.evaluate(s.x), s.objective, 1e-9 * (1 + std::abs(s.objective)));
  }
}

TEST(SolveLp, NoRandomFeasiblePointBeatsOptimum) {
  Rng rng = make_rng(77);
  const auto lp = random_feasible_lp(rng, 4, 3);
  const auto s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  const double sign = lp.sense() == ObjectiveSense::kMinimize ? 1.0 : -1.0;
  int feasible = 0;
  for (int k = 0; k < 200000 && feasible < 1000; ++k) {
    std::vector<double> x;
    for (std::size_t j = 0; j < lp.cols(); ++j) x.push_back(lp.lower(j) + (lp.upper(j) - lp.lower(j)) * uniform01(rng));
    if (lp.max_violation(x) > 0.0) continue;
    ++feasible;
    EXPECT_GE(sign * lp.evaluate(x), sign * s.objective - 1e-9);
  }
  EXPECT_GT(feasible, 0);
}

TEST(SolveLp, DeterministicPivoting) {
  Rng rng = make_rng(5);
  const auto lp = random_feasible_lp(rng, 6, 5);
  const auto a = solve_lp(lp), b = solve_lp(lp);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.pivots, b.pivots);
}

TEST(SolveLp, DegenerateProblemTerminates) {
  // Classic cycling example for the largest-coefficient rule.
  LinearProgram lp(ObjectiveSense::kMaximize);
  const auto x1 = lp.add_variable(10), x2 = lp.add_variable(-57), x3 = lp.add_variable(-9), x4 = lp.add_variable(-24);
  lp.add_row(Terms{{x1, 0.5}, {x2, -5.5}, {x3, -2.5}, {x4, 9}}, RowSense::kLessEqual, 0);
  lp.add_row(Terms{{x1, 0.5}, {x2, -1.5}, {x3, -0.5}, {x4, 1}}, RowSense::kLessEqual, 0);
  lp.add_row(Terms{{x1, 1}}, RowSense::kLessEqual, 1);
  const auto s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.objective, 1.0, 1e-9);
}

TEST(DumpLp, FixedLayout) {
  LinearProgram lp;
  const auto x = lp.add_variable(2.0, 0.0, 3.0);
  lp.add_row(Terms{{x, 1.0}}, RowSense::kGreaterEqual, 1.0);
  std::ostringstream out;
  dump_lp(out, lp);
  const auto text = out.str();
  EXPECT_NE(text.find("LP"), std::string::npos);
  EXPECT_NE(text.find("ROW"), std::string::npos);
  EXPECT_NE(text.find("BND"), std::string::npos);
}

}  // namespace
}  // namespace surropt
