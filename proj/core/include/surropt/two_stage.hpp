#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "surropt/chain_sim.hpp"
#include "surropt/demand_model.hpp"
#include "surropt/lp.hpp"
#include "surropt/network.hpp"
#include "surropt/rng.hpp"

namespace surropt {

enum class RoundingMode { kNearest, kFloor };

/// Sample-average-approximation controls.
struct SaaConfig {
  std::size_t scenario_count = 50;
  std::uint64_t seed = 0;
  RoundingMode rounding = RoundingMode::kNearest;
  /// Merge scenarios that share a hospital's demand value into one weighted
  /// recourse block. The recourse of each hospital depends only on its own
  /// demand, so this is an exact reformulation of the per-scenario program.
  bool aggregate_scenarios = true;

  void validate() const;
};

/// The SAA linear program plus the column indices of the first-stage variables.
struct SaaProgram {
  LinearProgram lp;
  NetworkShape shape;
  std::vector<std::size_t> order_var;
  /// Indexed (from * H + to) * M + age; unused on the diagonal.
  std::vector<std::size_t> ship_var;
  std::size_t recourse_blocks = 0;

  /// First-stage values of an LP point, in flat decision order.
  std::vector<double> first_stage(std::span<const double> x) const;
};

/// Builds the two-stage SAA program for one day.
///
/// First stage: orders q_i and transshipments x_ijm (x_ijm <= units(i, m), and
/// outbound per slot <= units(i, m)). Orders and inbound transshipments are on
/// hand before demand. Recourse per hospital and scenario: issued units z
/// (z <= demand), outdated units o with o >= old - z and o <= old, where `old`
/// is the last-age-class stock after transshipment, and z + o <= stock.
/// Expected cost = ordering + transshipment + mean over scenarios of
/// shortage * (d - z) + outdate * o + holding * (stock - z - o).
///
/// The recourse aggregates stock over ages, so it relaxes the simulator's
/// strict FIFO issuing; its optimum is a lower bound on the simulated
/// expected cost of any integer decision.
SaaProgram build_saa(const InventoryState& state, std::span<const DemandScenario> scenarios,
                     const CostParams& costs, bool aggregate_scenarios = true);

struct StageOneSolution {
  DecisionVector decision;
  /// Optimal value of the SAA relaxation.
  double lp_objective = 0.0;
  /// Mean simulated cost of `decision` over the same scenarios.
  double expected_cost = 0.0;
  std::size_t scenarios = 0;
  /// True when every first-stage LP value was already integral.
  bool relaxation_integral = false;
  std::vector<double> first_stage;
};

/// Mean of step(state, decision, d).costs.total over the scenarios.
double expected_cost(const InventoryState& state, const DecisionVector& decision,
                     std::span<const DemandScenario> scenarios, const CostParams& costs,
                     IssuingPolicy issuing = IssuingPolicy::kFifo);

/// Solves the SAA program on explicit scenarios, rounds the first stage and
/// repairs any slot the rounding pushed over its stock.
StageOneSolution solve_stage_one(const InventoryState& state, const CostParams& costs,
                                 std::span<const DemandScenario> scenarios,
                                 RoundingMode rounding = RoundingMode::kNearest,
                                 bool aggregate_scenarios = true);

/// Samples saa.scenario_count scenarios from `demand` with `rng`, then solves.
StageOneSolution solve_stage_one(const InventoryState& state, const CostParams& costs,
                                 const DemandModel& demand, const SaaConfig& saa, Rng& rng);

struct OracleCaps {
  static constexpr int kMaxHospitals = 2;
  static constexpr int kMaxAge = 2;
  static constexpr Units kMaxPerVariable = 4;
};

struct OracleResult {
  DecisionVector decision;
  double objective = 0.0;
  /// Number of enumerated decisions whose cost ties the optimum within 1e-9.
  std::size_t optimal_count = 0;
  std::size_t evaluated = 0;
};

/// Exhaustive search over integer decisions with every variable in
/// [0, per_variable_cap] (transshipments also capped by slot stock), scoring
/// each by simulated expected cost. Ties keep the lexicographically first flat
/// decision. Throws InputError outside H <= 2, M <= 2, cap <= 4.
OracleResult brute_force_oracle(const InventoryState& state, const CostParams& costs,
                                std::span<const DemandScenario> scenarios, Units per_variable_cap);

}  // namespace surropt
