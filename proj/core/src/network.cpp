#include "surropt/network.hpp"

#include <algorithm>
#include <numeric>

#include "surropt/errors.hpp"

namespace surropt {

std::size_t NetworkShape::input_size() const {
  return static_cast<std::size_t>(hospitals) * static_cast<std::size_t>(max_age);
}

std::size_t NetworkShape::output_size() const {
  const auto h = static_cast<std::size_t>(hospitals);
  return h + h * (h - 1) * static_cast<std::size_t>(max_age);
}

void NetworkShape::validate() const {
  if (hospitals < 1 || max_age < 1) {
    throw ConfigError("network shape needs hospitals >= 1 and max_age >= 1");
  }
}

InventoryState::InventoryState(NetworkShape shape)
    : shape_(shape), units_(shape.input_size(), 0) {
  shape_.validate();
}

InventoryState::InventoryState(NetworkShape shape, std::vector<Units> units)
    : shape_(shape), units_(std::move(units)) {
  shape_.validate();
  if (units_.size() != shape_.input_size()) {
    throw InputError("inventory has " + std::to_string(units_.size()) + " entries, expected " +
                     std::to_string(shape_.input_size()));
  }
}

std::size_t InventoryState::index(int hospital, int age) const {
  return static_cast<std::size_t>(hospital) * static_cast<std::size_t>(shape_.max_age) +
         static_cast<std::size_t>(age);
}

Units InventoryState::hospital_total(int hospital) const {
  const auto first = units_.begin() + static_cast<std::ptrdiff_t>(index(hospital, 0));
  return std::accumulate(first, first + shape_.max_age, Units{0});
}

Units InventoryState::total() const { return std::accumulate(units_.begin(), units_.end(), Units{0}); }

bool InventoryState::nonnegative() const {
  return std::all_of(units_.begin(), units_.end(), [](Units u) { return u >= 0; });
}

std::vector<double> InventoryState::to_features() const {
  return {units_.begin(), units_.end()};
}

DecisionVector::DecisionVector(NetworkShape shape)
    : shape_(shape),
      orders_(static_cast<std::size_t>(shape.hospitals), 0),
      transship_(static_cast<std::size_t>(shape.hospitals) * shape.hospitals * shape.max_age, 0) {
  shape_.validate();
}

std::size_t DecisionVector::ship_index(int from, int to, int age) const {
  return (static_cast<std::size_t>(from) * shape_.hospitals + static_cast<std::size_t>(to)) *
             shape_.max_age +
         static_cast<std::size_t>(age);
}

Units& DecisionVector::ship(int from, int to, int age) {
  if (from == to) throw ContractViolation("transshipment from a hospital to itself");
  return transship_[ship_index(from, to, age)];
}

Units DecisionVector::ship(int from, int to, int age) const {
  if (from == to) return 0;
  return transship_[ship_index(from, to, age)];
}

Units DecisionVector::outbound(int from, int age) const {
  Units sum = 0;
  for (int to = 0; to < shape_.hospitals; ++to) sum += ship(from, to, age);
  return sum;
}

Units DecisionVector::total_orders() const {
  return std::accumulate(orders_.begin(), orders_.end(), Units{0});
}

Units DecisionVector::total_shipped() const {
  return std::accumulate(transship_.begin(), transship_.end(), Units{0});
}

bool DecisionVector::nonnegative() const {
  auto nonneg = [](Units u) { return u >= 0; };
  return std::all_of(orders_.begin(), orders_.end(), nonneg) &&
         std::all_of(transship_.begin(), transship_.end(), nonneg);
}

bool DecisionVector::is_zero() const { return total_orders() == 0 && total_shipped() == 0 && nonnegative(); }

std::vector<Units> DecisionVector::to_flat() const {
  std::vector<Units> flat(orders_.begin(), orders_.end());
  flat.reserve(shape_.output_size());
  for (int i = 0; i < shape_.hospitals; ++i)
    for (int j = 0; j < shape_.hospitals; ++j) {
      if (i == j) continue;
      for (int m = 0; m < shape_.max_age; ++m) flat.push_back(transship_[ship_index(i, j, m)]);
    }
  return flat;
}

std::vector<double> DecisionVector::to_features() const {
  const auto flat = to_flat();
  return {flat.begin(), flat.end()};
}

DecisionVector DecisionVector::from_flat(NetworkShape shape, std::span<const Units> flat) {
  DecisionVector d(shape);
  if (flat.size() != shape.output_size()) {
    throw InputError("decision vector has " + std::to_string(flat.size()) + " entries, expected " +
                     std::to_string(shape.output_size()));
  }
  std::size_t k = 0;
  for (int i = 0; i < shape.hospitals; ++i) d.orders_[i] = flat[k++];
  for (int i = 0; i < shape.hospitals; ++i)
    for (int j = 0; j < shape.hospitals; ++j) {
      if (i == j) continue;
      for (int m = 0; m < shape.max_age; ++m) d.transship_[d.ship_index(i, j, m)] = flat[k++];
    }
  return d;
}

std::vector<std::string> inventory_column_names(const NetworkShape& shape) {
  std::vector<std::string> names;
  names.reserve(shape.input_size());
  for (int i = 1; i <= shape.hospitals; ++i)
    for (int m = 1; m <= shape.max_age; ++m)
      names.push_back("inv_" + std::to_string(i) + "_" + std::to_string(m));
  return names;
}

std::vector<std::string> decision_column_names(const NetworkShape& shape) {
  std::vector<std::string> names;
  names.reserve(shape.output_size());
  for (int i = 1; i <= shape.hospitals; ++i) names.push_back("ord_" + std::to_string(i));
  for (int i = 1; i <= shape.hospitals; ++i)
    for (int j = 1; j <= shape.hospitals; ++j) {
      if (i == j) continue;
      for (int m = 1; m <= shape.max_age; ++m)
        names.push_back("ship_" + std::to_string(i) + "_" + std::to_string(j) + "_" +
                        std::to_string(m));
    }
  return names;
}

}  // namespace surropt
