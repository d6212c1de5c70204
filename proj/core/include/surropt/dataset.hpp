#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "surropt/network.hpp"

namespace surropt {

/// Regression data: one row per simulated day. X holds model inputs
/// (inventory), Y the decision targets.
struct Dataset {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  /// Simulation day per row; may be empty for data not drawn from a trajectory.
  std::vector<std::int64_t> day;

  std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t inputs() const { return static_cast<std::size_t>(x.cols()); }
  std::size_t outputs() const { return static_cast<std::size_t>(y.cols()); }

  /// Throws InputError on mismatched row counts or non-finite entries.
  void validate() const;
  /// validate() plus every target >= 0, as produced by the oracle.
  void validate_decision_labels() const;

  Dataset subset(std::span<const std::size_t> rows) const;
  Dataset head(std::size_t n) const;
  Dataset tail_from(std::size_t first) const;
};

/// Number of leading rows in the chronological training block: ceil(f * n).
std::size_t training_rows(std::size_t n, double train_fraction);

/// Reads a trajectory CSV (see write_trajectory_csv). Throws InputError if
/// the header does not match the schema for `shape`.
Dataset read_dataset_csv(std::istream& in, const NetworkShape& shape);

}  // namespace surropt
