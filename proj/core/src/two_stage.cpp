#include "surropt/two_stage.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "surropt/errors.hpp"

namespace surropt {

void SaaConfig::validate() const {
  if (scenario_count < 1) throw ConfigError("saa.scenario_count must be >= 1");
}

std::vector<double> SaaProgram::first_stage(std::span<const double> x) const {
  std::vector<double> out;
  out.reserve(shape.output_size());
  for (auto v : order_var) out.push_back(x[v]);
  const int h = shape.hospitals, ages = shape.max_age;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j) {
      if (i == j) continue;
      for (int m = 0; m < ages; ++m) out.push_back(x[ship_var[(i * h + j) * ages + m]]);
    }
  return out;
}

namespace {

struct DemandGroup {
  int demand;
  double weight;
};

std::vector<DemandGroup> demand_groups(std::span<const DemandScenario> scenarios, int hospital,
                                       bool aggregate) {
  const double w = 1.0 / static_cast<double>(scenarios.size());
  std::vector<DemandGroup> groups;
  if (!aggregate) {
    for (const auto& s : scenarios) groups.push_back({s[hospital], w});
    return groups;
  }
  std::map<int, std::size_t> counts;
  for (const auto& s : scenarios) ++counts[s[hospital]];
  for (const auto& [d, c] : counts) groups.push_back({d, w * static_cast<double>(c)});
  return groups;
}

}  // namespace

SaaProgram build_saa(const InventoryState& state, std::span<const DemandScenario> scenarios,
                     const CostParams& costs, bool aggregate_scenarios) {
  if (scenarios.empty()) throw InputError("build_saa needs at least one scenario");
  costs.validate();
  const NetworkShape& shape = state.shape();
  const int h = shape.hospitals, ages = shape.max_age, last = ages - 1;
  for (const auto& s : scenarios) {
    if (s.size() != static_cast<std::size_t>(h)) throw InputError("scenario/hospital count mismatch");
    if (std::any_of(s.begin(), s.end(), [](int d) { return d < 0; }))
      throw InputError("negative scenario demand");
  }
  if (!state.nonnegative()) throw InputError("negative inventory");

  SaaProgram prog;
  prog.shape = shape;
  LinearProgram& lp = prog.lp;

  // First stage. Holding on net inflow is charged once (scenario weights sum to 1);
  // on transshipments it cancels between sender and receiver.
  for (int i = 0; i < h; ++i)
    prog.order_var.push_back(lp.add_variable(costs.ordering + costs.holding, 0.0, kInfinity));
  prog.ship_var.assign(static_cast<std::size_t>(h) * h * ages, 0);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j) {
      if (i == j) continue;
      for (int m = 0; m < ages; ++m) {
        const double cap = static_cast<double>(state.at(i, m));
        prog.ship_var[(i * h + j) * ages + m] = lp.add_variable(costs.transship_unit, 0.0, cap);
      }
    }

  // Recourse blocks.
  struct Block {
    int hospital;
    DemandGroup group;
    std::size_t issued;
    std::size_t outdated;
  };
  std::vector<Block> blocks;
  double offset = 0.0;
  for (int i = 0; i < h; ++i) {
    offset += costs.holding * static_cast<double>(state.hospital_total(i));
    for (const auto& g : demand_groups(scenarios, i, aggregate_scenarios)) {
      Block b{i, g, 0, 0};
      b.issued = lp.add_variable(-g.weight * (costs.shortage + costs.holding), 0.0, g.demand);
      b.outdated = lp.add_variable(g.weight * (costs.outdate - costs.holding), 0.0, kInfinity);
      offset += g.weight * costs.shortage * g.demand;
      blocks.push_back(b);
    }
  }
  lp.set_objective_offset(offset);
  prog.recourse_blocks = blocks.size();

  std::vector<std::pair<std::size_t, double>> terms;
  auto ship = [&](int from, int to, int m) { return prog.ship_var[(from * h + to) * ages + m]; };

  // Outbound per slot bounded by stock.
  if (h > 1) {
    for (int i = 0; i < h; ++i)
      for (int m = 0; m < ages; ++m) {
        if (state.at(i, m) == 0) continue;
        terms.clear();
        for (int j = 0; j < h; ++j)
          if (j != i) terms.emplace_back(ship(i, j, m), 1.0);
        lp.add_row(terms, RowSense::kLessEqual, static_cast<double>(state.at(i, m)));
      }
  }

  // Net stock change of hospital i (orders + inbound - outbound), optionally
  // restricted to the last age class.
  auto net_inflow = [&](int i, bool last_class_only, double sign) {
    if (!last_class_only || ages == 1) terms.emplace_back(prog.order_var[i], sign);
    for (int j = 0; j < h; ++j) {
      if (j == i) continue;
      for (int m = last_class_only ? last : 0; m < ages; ++m) {
        terms.emplace_back(ship(j, i, m), sign);
        terms.emplace_back(ship(i, j, m), -sign);
      }
    }
  };

  for (const auto& b : blocks) {
    const int i = b.hospital;
    const double stock = static_cast<double>(state.hospital_total(i));
    const double old = static_cast<double>(state.at(i, last));

    // z + o <= stock + net inflow
    terms = {{b.issued, 1.0}, {b.outdated, 1.0}};
    net_inflow(i, false, -1.0);
    lp.add_row(terms, RowSense::kLessEqual, stock);

    // o >= old - z
    terms = {{b.issued, 1.0}, {b.outdated, 1.0}};
    net_inflow(i, true, -1.0);
    lp.add_row(terms, RowSense::kGreaterEqual, old);

    // o <= old
    terms = {{b.outdated, 1.0}};
    net_inflow(i, true, -1.0);
    lp.add_row(terms, RowSense::kLessEqual, old);
  }
  return prog;
}

double expected_cost(const InventoryState& state, const DecisionVector& decision,
                     std::span<const DemandScenario> scenarios, const CostParams& costs,
                     IssuingPolicy issuing) {
  if (scenarios.empty()) throw InputError("expected_cost needs at least one scenario");
  double sum = 0.0;
  for (const auto& s : scenarios) sum += step(state, decision, s, costs, issuing).costs.total;
  return sum / static_cast<double>(scenarios.size());
}

StageOneSolution solve_stage_one(const InventoryState& state, const CostParams& costs,
                                 std::span<const DemandScenario> scenarios, RoundingMode rounding,
                                 bool aggregate_scenarios) {
  const SaaProgram prog = build_saa(state, scenarios, costs, aggregate_scenarios);
  const LpSolution sol = solve_lp(prog.lp);
  if (sol.status != LpStatus::kOptimal) {
    // The zero decision is always feasible and the objective is bounded below by 0.
    throw InternalError("SAA program not optimal (status " +
                        std::to_string(static_cast<int>(sol.status)) + ")");
  }
  StageOneSolution out;
  out.lp_objective = sol.objective;
  out.scenarios = scenarios.size();
  out.first_stage = prog.first_stage(sol.x);
  out.relaxation_integral = std::all_of(out.first_stage.begin(), out.first_stage.end(),
                                        [](double v) { return std::abs(v - std::round(v)) <= 1e-7; });
  std::vector<Units> flat;
  flat.reserve(out.first_stage.size());
  for (double v : out.first_stage) {
    const double r = rounding == RoundingMode::kNearest ? std::nearbyint(v) : std::floor(v + 1e-9);
    flat.push_back(static_cast<Units>(std::max(0.0, r)));
  }
  out.decision = repair(state, DecisionVector::from_flat(state.shape(), flat));
  if (!check_feasibility(state, out.decision).empty()) {
    throw InternalError("repaired stage-one decision is still infeasible");
  }
  out.expected_cost = expected_cost(state, out.decision, scenarios, costs);
  return out;
}

StageOneSolution solve_stage_one(const InventoryState& state, const CostParams& costs,
                                 const DemandModel& demand, const SaaConfig& saa, Rng& rng) {
  saa.validate();
  if (demand.hospitals() != static_cast<std::size_t>(state.shape().hospitals)) {
    throw InputError("demand model and network disagree on hospital count");
  }
  const auto scenarios = demand.sample_days(rng, saa.scenario_count);
  return solve_stage_one(state, costs, scenarios, saa.rounding, saa.aggregate_scenarios);
}

OracleResult brute_force_oracle(const InventoryState& state, const CostParams& costs,
                                std::span<const DemandScenario> scenarios, Units per_variable_cap) {
  const NetworkShape& shape = state.shape();
  if (shape.hospitals > OracleCaps::kMaxHospitals || shape.max_age > OracleCaps::kMaxAge ||
      per_variable_cap > OracleCaps::kMaxPerVariable || per_variable_cap < 0) {
    throw InputError("brute_force_oracle limited to H <= 2, M <= 2, cap <= 4");
  }
  if (scenarios.empty()) throw InputError("brute_force_oracle needs at least one scenario");

  // Per-position upper limits in flat decision order.
  std::vector<Units> limit(shape.output_size(), per_variable_cap);
  {
    std::size_t k = static_cast<std::size_t>(shape.hospitals);
    for (int i = 0; i < shape.hospitals; ++i)
      for (int j = 0; j < shape.hospitals; ++j) {
        if (i == j) continue;
        for (int m = 0; m < shape.max_age; ++m, ++k)
          limit[k] = std::min(per_variable_cap, state.at(i, m));
      }
  }

  OracleResult best;
  best.objective = kInfinity;
  std::vector<Units> flat(limit.size(), 0);
  constexpr double kTieTol = 1e-9;
  while (true) {
    DecisionVector d = DecisionVector::from_flat(shape, flat);
    if (check_feasibility(state, d).empty()) {
      const double cost = expected_cost(state, d, scenarios, costs);
      ++best.evaluated;
      if (cost < best.objective - kTieTol) {
        best.objective = cost;
        best.decision = std::move(d);
        best.optimal_count = 1;
      } else if (std::abs(cost - best.objective) <= kTieTol) {
        ++best.optimal_count;
      }
    }
    // Odometer increment, last position fastest (lexicographic order).
    std::size_t pos = flat.size();
    while (pos > 0) {
      --pos;
      if (flat[pos] < limit[pos]) {
        ++flat[pos];
        break;
      }
      flat[pos] = 0;
      if (pos == 0) return best;
    }
  }
}

}  // namespace surropt
