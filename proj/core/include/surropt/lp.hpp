#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace surropt {

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };
enum class ObjectiveSense { kMinimize, kMaximize };

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A dense linear program: optimize c.x + offset subject to row constraints
/// A x (<=|=|>=) b and lower <= x <= upper. Bounds may be infinite.
///
/// Variables must all be added before the first row.
class LinearProgram {
 public:
  explicit LinearProgram(ObjectiveSense sense = ObjectiveSense::kMinimize) : sense_(sense) {}

  std::size_t add_variable(double cost, double lower = 0.0, double upper = kInfinity);
  void add_row(std::span<const std::pair<std::size_t, double>> terms, RowSense sense, double rhs);
  void add_dense_row(std::span<const double> coeffs, RowSense sense, double rhs);

  void set_objective_offset(double offset) { offset_ = offset; }
  void set_sense(ObjectiveSense sense) { sense_ = sense; }

  ObjectiveSense sense() const { return sense_; }
  std::size_t cols() const { return cost_.size(); }
  std::size_t rows() const { return rhs_.size(); }
  std::span<const double> costs() const { return cost_; }
  double objective_offset() const { return offset_; }
  std::span<const double> row(std::size_t r) const {
    return {matrix_.data() + r * cols(), cols()};
  }
  double rhs(std::size_t r) const { return rhs_[r]; }
  RowSense row_sense(std::size_t r) const { return senses_[r]; }
  double lower(std::size_t j) const { return lower_[j]; }
  double upper(std::size_t j) const { return upper_[j]; }

  /// c.x + offset for a candidate point.
  double evaluate(std::span<const double> x) const;
  /// Largest constraint or bound violation of x (0 when feasible).
  double max_violation(std::span<const double> x) const;

  /// Throws InputError on non-finite data or lower > upper.
  void validate() const;

 private:
  ObjectiveSense sense_;
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> matrix_;
  std::vector<double> rhs_;
  std::vector<RowSense> senses_;
  double offset_ = 0.0;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t max_pivots = 1'000'000;
};

/// Two-phase primal simplex on a dense tableau with Bland's rule.
///
/// Fixed variables are substituted out, finite upper bounds become rows, free
/// variables are split. Pivoting is deterministic. Throws ResourceError past
/// max_pivots and InputError on an invalid program.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

/// Plain-text fixed-layout dump for bug reports.
void dump_lp(std::ostream& out, const LinearProgram& lp);

}  // namespace surropt
