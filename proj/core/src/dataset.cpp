#include "surropt/dataset.hpp"

#include <cmath>
#include <istream>
#include <string>

#include "surropt/chain_sim.hpp"
#include "surropt/csv.hpp"
#include "surropt/errors.hpp"

namespace surropt {

void Dataset::validate() const {
  if (x.rows() != y.rows() || (!day.empty() && day.size() != rows())) {
    throw InputError("dataset row counts disagree (x=" + std::to_string(x.rows()) + ", y=" +
                     std::to_string(y.rows()) + ", day=" + std::to_string(day.size()) + ")");
  }
  if (!x.allFinite() || !y.allFinite()) throw InputError("dataset contains non-finite values");
}

void Dataset::validate_decision_labels() const {
  validate();
  if (y.size() > 0 && y.minCoeff() < 0.0) throw InputError("dataset contains negative decision labels");
}

Dataset Dataset::subset(std::span<const std::size_t> rows_in) const {
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(rows_in.size()), x.cols());
  out.y.resize(static_cast<Eigen::Index>(rows_in.size()), y.cols());
  out.day.reserve(rows_in.size());
  for (std::size_t k = 0; k < rows_in.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(rows_in[k]);
    out.x.row(static_cast<Eigen::Index>(k)) = x.row(r);
    out.y.row(static_cast<Eigen::Index>(k)) = y.row(r);
    if (!day.empty()) out.day.push_back(day[rows_in[k]]);
  }
  return out;
}

Dataset Dataset::head(std::size_t n) const {
  Dataset out;
  const auto k = static_cast<Eigen::Index>(n);
  out.x = x.topRows(k);
  out.y = y.topRows(k);
  if (!day.empty()) out.day.assign(day.begin(), day.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

Dataset Dataset::tail_from(std::size_t first) const {
  Dataset out;
  const auto k = static_cast<Eigen::Index>(rows() - first);
  out.x = x.bottomRows(k);
  out.y = y.bottomRows(k);
  if (!day.empty()) out.day.assign(day.begin() + static_cast<std::ptrdiff_t>(first), day.end());
  return out;
}

std::size_t training_rows(std::size_t n, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie strictly between 0 and 1");
  }
  return static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n)));
}

Dataset read_dataset_csv(std::istream& in, const NetworkShape& shape) {
  const CsvTable table = read_csv(in);
  const auto expected = trajectory_csv_header(shape);
  if (table.header != expected) {
    throw InputError("dataset header does not match the schema for a " +
                     std::to_string(shape.hospitals) + "-hospital, " +
                     std::to_string(shape.max_age) + "-age network (expected " +
                     std::to_string(expected.size()) + " columns, got " +
                     std::to_string(table.header.size()) + ")");
  }
  const auto n_in = static_cast<Eigen::Index>(shape.input_size());
  const auto n_out = static_cast<Eigen::Index>(shape.output_size());
  Dataset ds;
  ds.x.resize(static_cast<Eigen::Index>(table.rows.size()), n_in);
  ds.y.resize(static_cast<Eigen::Index>(table.rows.size()), n_out);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto ri = static_cast<Eigen::Index>(r);
    ds.day.push_back(static_cast<std::int64_t>(parse_double(row[0], "column day")));
    for (Eigen::Index c = 0; c < n_in; ++c)
      ds.x(ri, c) = parse_double(row[1 + static_cast<std::size_t>(c)], expected[1 + c]);
    for (Eigen::Index c = 0; c < n_out; ++c) {
      const std::size_t col = 1 + static_cast<std::size_t>(n_in + c);
      ds.y(ri, c) = parse_double(row[col], expected[col]);
    }
  }
  ds.validate_decision_labels();
  return ds;
}

}  // namespace surropt
