#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "surropt/demand_model.hpp"
#include "surropt/network.hpp"

namespace surropt {

/// Per-unit cost rates. Defaults are illustrative, not calibrated.
struct CostParams {
  double holding = 1.0;
  double ordering = 10.0;
  double transship_unit = 7.0;
  double shortage = 40.0;
  double outdate = 35.0;

  void validate() const;
};

struct CostBreakdown {
  double holding = 0.0;
  double transshipment = 0.0;
  double outdate = 0.0;
  double ordering = 0.0;
  double shortage = 0.0;
  double total = 0.0;

  /// Sets total from the five components.
  void recompute_total();
  double component_sum() const;

  CostBreakdown& operator+=(const CostBreakdown& other);
  friend bool operator==(const CostBreakdown&, const CostBreakdown&) = default;
};

/// One (hospital, age) slot whose outbound transshipments exceed stock.
/// Indices are 0-based.
struct ViolationLog {
  std::size_t day = 0;
  int hospital = 0;
  int age = 0;
  Units requested = 0;
  Units available = 0;

  friend bool operator==(const ViolationLog&, const ViolationLog&) = default;
};

enum class IssuingPolicy { kFifo, kLifo };

/// Unit movements of one simulated day, per hospital.
struct DayFlows {
  std::vector<Units> ordered;
  std::vector<Units> shipped_out;
  std::vector<Units> shipped_in;
  std::vector<Units> demand;
  std::vector<Units> issued;
  std::vector<Units> short_units;
  std::vector<Units> outdated;
  std::vector<Units> held;
};

struct StepResult {
  InventoryState next;
  CostBreakdown costs;
  DayFlows flows;
};

/// Checks every (hospital, age) slot; returns one record per slot where
/// outbound transshipments exceed the units on hand.
std::vector<ViolationLog> check_feasibility(const InventoryState& state,
                                            const DecisionVector& decision,
                                            std::size_t day = 0);

/// Number of slots examined by check_feasibility (H * M).
std::size_t slots_checked_per_day(const NetworkShape& shape);

/// Scales outbound transshipments of every violating slot down to the stock on
/// hand using largest-remainder rounding (ties go to the lower destination
/// index). Negative entries are clamped to zero. Feasible input is returned
/// unchanged.
DecisionVector repair(const InventoryState& state, const DecisionVector& decision);

/// Simulates one day.
///
/// Event order: charge ordering and transshipment costs; remove outbound units
/// from senders; receive inbound transshipments (at their age class) and fresh
/// orders (age class 1); issue demand from on-hand stock per `issuing`, lost
/// sales charged as shortage; age everything by one class, discarding units
/// that pass the last class as outdates; charge holding on the survivors.
///
/// Throws ContractViolation if the decision is infeasible or negative.
StepResult step(const InventoryState& state, const DecisionVector& decision,
                std::span<const int> demand, const CostParams& costs,
                IssuingPolicy issuing = IssuingPolicy::kFifo);

using Policy = std::function<DecisionVector(std::size_t day, const InventoryState& state)>;

struct HorizonResult {
  /// states[t] is the start-of-day state of day t; states.back() is the final state.
  std::vector<InventoryState> states;
  std::vector<DecisionVector> proposed;
  std::vector<DecisionVector> applied;
  std::vector<CostBreakdown> costs;
  std::vector<DayFlows> flows;
  std::vector<ViolationLog> violations;
  std::vector<std::size_t> violations_per_day;
  std::size_t slots_checked = 0;

  std::size_t days() const { return costs.size(); }
  CostBreakdown total_costs() const;
};

/// Rolls `policy` forward: check_feasibility -> repair -> step, once per demand scenario.
HorizonResult run_horizon(const InventoryState& initial, const Policy& policy,
                          std::span<const DemandScenario> demands, const CostParams& costs,
                          IssuingPolicy issuing = IssuingPolicy::kFifo);

/// Writes one row per day: day, inv_*, ord_*, ship_*, cost_holding,
/// cost_transshipment, cost_outdate, cost_ordering, cost_shortage, violations.
/// Inventory is the start-of-day state; decisions are the applied ones.
void write_trajectory_csv(std::ostream& out, const HorizonResult& result);

std::vector<std::string> trajectory_csv_header(const NetworkShape& shape);

}  // namespace surropt
