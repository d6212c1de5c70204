#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace surropt {

using Units = std::int64_t;

/// Hospital count and number of age classes. The reference network is 4 x 11.
struct NetworkShape {
  int hospitals = 4;
  int max_age = 11;

  /// Flattened inventory length, H * M.
  std::size_t input_size() const;
  /// Flattened decision length, H + H * (H - 1) * M.
  std::size_t output_size() const;
  void validate() const;

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

/// Per-hospital, age-indexed unit counts. Indices are 0-based here; age class
/// `m` holds units that are m+1 days old. Flattened hospital-major.
class InventoryState {
 public:
  InventoryState() = default;
  explicit InventoryState(NetworkShape shape);
  InventoryState(NetworkShape shape, std::vector<Units> units);

  const NetworkShape& shape() const { return shape_; }
  Units& at(int hospital, int age) { return units_[index(hospital, age)]; }
  Units at(int hospital, int age) const { return units_[index(hospital, age)]; }
  std::span<const Units> units() const { return units_; }

  Units hospital_total(int hospital) const;
  Units total() const;
  bool nonnegative() const;

  /// Model-input encoding: H * M doubles, hospital-major.
  std::vector<double> to_features() const;

  friend bool operator==(const InventoryState&, const InventoryState&) = default;

 private:
  std::size_t index(int hospital, int age) const;

  NetworkShape shape_;
  std::vector<Units> units_;
};

/// Orders from the central bank plus age-indexed lateral transshipments.
///
/// Stored with the full H x H x M transshipment cube; the diagonal is kept at
/// zero. The flat encoding drops the diagonal: orders first, then
/// ship(i, j, m) for i, then j != i, then m.
class DecisionVector {
 public:
  DecisionVector() = default;
  explicit DecisionVector(NetworkShape shape);

  const NetworkShape& shape() const { return shape_; }

  Units& order(int hospital) { return orders_[hospital]; }
  Units order(int hospital) const { return orders_[hospital]; }
  /// Throws ContractViolation when from == to.
  Units& ship(int from, int to, int age);
  Units ship(int from, int to, int age) const;

  /// Total units leaving `from` at age class `age`.
  Units outbound(int from, int age) const;
  Units total_orders() const;
  Units total_shipped() const;
  bool nonnegative() const;
  bool is_zero() const;

  std::vector<Units> to_flat() const;
  std::vector<double> to_features() const;
  static DecisionVector from_flat(NetworkShape shape, std::span<const Units> flat);

  friend bool operator==(const DecisionVector&, const DecisionVector&) = default;

 private:
  std::size_t ship_index(int from, int to, int age) const;

  NetworkShape shape_;
  std::vector<Units> orders_;
  std::vector<Units> transship_;
};

/// Column names of the flat encodings, 1-based: inv_<i>_<m>, ord_<i>, ship_<i>_<j>_<m>.
std::vector<std::string> inventory_column_names(const NetworkShape& shape);
std::vector<std::string> decision_column_names(const NetworkShape& shape);

}  // namespace surropt
