#include "surropt/chain_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "surropt/csv.hpp"
#include "surropt/errors.hpp"

namespace surropt {

void CostParams::validate() const {
  for (double v : {holding, ordering, transship_unit, shortage, outdate}) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError("cost rates must be finite and >= 0");
  }
}

void CostBreakdown::recompute_total() { total = component_sum(); }

double CostBreakdown::component_sum() const {
  return holding + transshipment + outdate + ordering + shortage;
}

CostBreakdown& CostBreakdown::operator+=(const CostBreakdown& other) {
  holding += other.holding;
  transshipment += other.transshipment;
  outdate += other.outdate;
  ordering += other.ordering;
  shortage += other.shortage;
  total += other.total;
  return *this;
}

std::size_t slots_checked_per_day(const NetworkShape& shape) { return shape.input_size(); }

std::vector<ViolationLog> check_feasibility(const InventoryState& state,
                                            const DecisionVector& decision, std::size_t day) {
  if (!(state.shape() == decision.shape())) throw InputError("state/decision shape mismatch");
  std::vector<ViolationLog> out;
  const auto& shape = state.shape();
  for (int i = 0; i < shape.hospitals; ++i)
    for (int m = 0; m < shape.max_age; ++m) {
      const Units requested = decision.outbound(i, m);
      const Units available = state.at(i, m);
      if (requested > available) out.push_back({day, i, m, requested, available});
    }
  return out;
}

DecisionVector repair(const InventoryState& state, const DecisionVector& decision) {
  if (!(state.shape() == decision.shape())) throw InputError("state/decision shape mismatch");
  const auto& shape = state.shape();
  DecisionVector fixed = decision;
  for (int i = 0; i < shape.hospitals; ++i) fixed.order(i) = std::max<Units>(0, fixed.order(i));

  for (int i = 0; i < shape.hospitals; ++i)
    for (int m = 0; m < shape.max_age; ++m) {
      Units total = 0;
      for (int j = 0; j < shape.hospitals; ++j) {
        if (j == i) continue;
        Units& x = fixed.ship(i, j, m);
        x = std::max<Units>(0, x);
        total += x;
      }
      const Units cap = std::max<Units>(0, state.at(i, m));
      if (total <= cap) continue;

      // Largest remainder: floor(x * cap / total), then hand the leftover units
      // to the largest fractional parts.
      struct Share {
        int dest;
        Units remainder;
      };
      std::vector<Share> shares;
      Units assigned = 0;
      for (int j = 0; j < shape.hospitals; ++j) {
        if (j == i) continue;
        Units& x = fixed.ship(i, j, m);
        const Units scaled = x * cap;
        shares.push_back({j, scaled % total});
        x = scaled / total;
        assigned += x;
      }
      std::stable_sort(shares.begin(), shares.end(),
                       [](const Share& a, const Share& b) { return a.remainder > b.remainder; });
      for (Units k = 0; k < cap - assigned; ++k) fixed.ship(i, shares[k].dest, m) += 1;
    }
  return fixed;
}

StepResult step(const InventoryState& state, const DecisionVector& decision,
                std::span<const int> demand, const CostParams& costs, IssuingPolicy issuing) {
  const auto& shape = state.shape();
  if (!(shape == decision.shape())) throw InputError("state/decision shape mismatch");
  if (demand.size() != static_cast<std::size_t>(shape.hospitals)) {
    throw InputError("demand scenario has " + std::to_string(demand.size()) +
                     " entries, expected " + std::to_string(shape.hospitals));
  }
  if (std::any_of(demand.begin(), demand.end(), [](int d) { return d < 0; })) {
    throw InputError("negative demand");
  }
  if (!decision.nonnegative() || !check_feasibility(state, decision).empty()) {
    throw ContractViolation("step called with an infeasible decision; run repair first");
  }

  const auto h = static_cast<std::size_t>(shape.hospitals);
  const int ages = shape.max_age;
  StepResult r{state, {}, {}};
  DayFlows& f = r.flows;
  for (auto* v : {&f.ordered, &f.shipped_out, &f.shipped_in, &f.demand, &f.issued, &f.short_units,
                  &f.outdated, &f.held})
    v->assign(h, 0);

  InventoryState& inv = r.next;

  // (1) ordering and transshipment charges
  r.costs.ordering = costs.ordering * static_cast<double>(decision.total_orders());
  r.costs.transshipment = costs.transship_unit * static_cast<double>(decision.total_shipped());

  // (2) outbound units leave the senders
  for (int i = 0; i < shape.hospitals; ++i)
    for (int m = 0; m < ages; ++m) {
      const Units out = decision.outbound(i, m);
      inv.at(i, m) -= out;
      f.shipped_out[i] += out;
    }

  // (3) inbound transshipments keep their age class; orders arrive fresh
  for (int i = 0; i < shape.hospitals; ++i)
    for (int j = 0; j < shape.hospitals; ++j) {
      if (i == j) continue;
      for (int m = 0; m < ages; ++m) {
        const Units x = decision.ship(i, j, m);
        inv.at(j, m) += x;
        f.shipped_in[j] += x;
      }
    }
  for (int i = 0; i < shape.hospitals; ++i) {
    inv.at(i, 0) += decision.order(i);
    f.ordered[i] = decision.order(i);
  }

  // (4) demand, lost sales
  Units short_total = 0;
  for (int i = 0; i < shape.hospitals; ++i) {
    Units need = demand[i];
    f.demand[i] = need;
    for (int k = 0; k < ages && need > 0; ++k) {
      const int m = issuing == IssuingPolicy::kFifo ? ages - 1 - k : k;
      const Units take = std::min(need, inv.at(i, m));
      inv.at(i, m) -= take;
      need -= take;
      f.issued[i] += take;
    }
    f.short_units[i] = need;
    short_total += need;
  }
  r.costs.shortage = costs.shortage * static_cast<double>(short_total);

  // (5) aging, outdates, holding
  Units outdated_total = 0;
  Units held_total = 0;
  for (int i = 0; i < shape.hospitals; ++i) {
    f.outdated[i] = inv.at(i, ages - 1);
    outdated_total += f.outdated[i];
    for (int m = ages - 1; m > 0; --m) inv.at(i, m) = inv.at(i, m - 1);
    inv.at(i, 0) = 0;
    f.held[i] = inv.hospital_total(i);
    held_total += f.held[i];
  }
  r.costs.outdate = costs.outdate * static_cast<double>(outdated_total);
  r.costs.holding = costs.holding * static_cast<double>(held_total);
  r.costs.recompute_total();
  return r;
}

CostBreakdown HorizonResult::total_costs() const {
  CostBreakdown sum;
  for (const auto& c : costs) sum += c;
  return sum;
}

HorizonResult run_horizon(const InventoryState& initial, const Policy& policy,
                          std::span<const DemandScenario> demands, const CostParams& costs,
                          IssuingPolicy issuing) {
  HorizonResult out;
  out.states.reserve(demands.size() + 1);
  out.states.push_back(initial);
  for (std::size_t day = 0; day < demands.size(); ++day) {
    const InventoryState& state = out.states.back();
    DecisionVector proposed = policy(day, state);
    auto violations = check_feasibility(state, proposed, day);
    out.slots_checked += slots_checked_per_day(state.shape());
    out.violations_per_day.push_back(violations.size());
    out.violations.insert(out.violations.end(), violations.begin(), violations.end());
    DecisionVector applied = repair(state, proposed);
    StepResult r = step(state, applied, demands[day], costs, issuing);
    out.proposed.push_back(std::move(proposed));
    out.applied.push_back(std::move(applied));
    out.costs.push_back(r.costs);
    out.flows.push_back(std::move(r.flows));
    out.states.push_back(std::move(r.next));
  }
  return out;
}

std::vector<std::string> trajectory_csv_header(const NetworkShape& shape) {
  std::vector<std::string> header{"day"};
  for (auto& n : inventory_column_names(shape)) header.push_back(std::move(n));
  for (auto& n : decision_column_names(shape)) header.push_back(std::move(n));
  for (const char* c : {"cost_holding", "cost_transshipment", "cost_outdate", "cost_ordering",
                        "cost_shortage"})
    header.emplace_back(c);
  header.emplace_back("violations");
  return header;
}

void write_trajectory_csv(std::ostream& out, const HorizonResult& result) {
  if (result.states.empty()) throw InputError("empty trajectory");
  const auto& shape = result.states.front().shape();
  write_csv_row(out, trajectory_csv_header(shape));
  std::vector<std::string> row;
  for (std::size_t day = 0; day < result.days(); ++day) {
    row.clear();
    row.push_back(std::to_string(day));
    for (Units u : result.states[day].units()) row.push_back(std::to_string(u));
    for (Units u : result.applied[day].to_flat()) row.push_back(std::to_string(u));
    const auto& c = result.costs[day];
    for (double v : {c.holding, c.transshipment, c.outdate, c.ordering, c.shortage})
      row.push_back(format_double(v));
    row.push_back(std::to_string(result.violations_per_day[day]));
    write_csv_row(out, row);
  }
}

}  // namespace surropt
