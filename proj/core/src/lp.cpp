#include "surropt/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "surropt/errors.hpp"

namespace surropt {

std::size_t LinearProgram::add_variable(double cost, double lower, double upper) {
  if (!rhs_.empty()) throw InputError("add_variable after rows were added");
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return cost_.size() - 1;
}

void LinearProgram::add_row(std::span<const std::pair<std::size_t, double>> terms, RowSense sense,
                            double rhs) {
  const std::size_t base = matrix_.size();
  matrix_.resize(base + cols(), 0.0);
  for (const auto& [j, a] : terms) {
    if (j >= cols()) throw InputError("row references variable " + std::to_string(j));
    matrix_[base + j] += a;
  }
  rhs_.push_back(rhs);
  senses_.push_back(sense);
}

void LinearProgram::add_dense_row(std::span<const double> coeffs, RowSense sense, double rhs) {
  if (coeffs.size() != cols()) {
    throw InputError("dense row has " + std::to_string(coeffs.size()) + " coefficients, expected " +
                     std::to_string(cols()));
  }
  matrix_.insert(matrix_.end(), coeffs.begin(), coeffs.end());
  rhs_.push_back(rhs);
  senses_.push_back(sense);
}

double LinearProgram::evaluate(std::span<const double> x) const {
  double v = offset_;
  for (std::size_t j = 0; j < cols(); ++j) v += cost_[j] * x[j];
  return v;
}

double LinearProgram::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < cols(); ++j) {
    worst = std::max({worst, lower_[j] - x[j], x[j] - upper_[j]});
  }
  for (std::size_t r = 0; r < rows(); ++r) {
    const auto a = row(r);
    double lhs = 0.0;
    for (std::size_t j = 0; j < cols(); ++j) lhs += a[j] * x[j];
    switch (senses_[r]) {
      case RowSense::kLessEqual: worst = std::max(worst, lhs - rhs_[r]); break;
      case RowSense::kGreaterEqual: worst = std::max(worst, rhs_[r] - lhs); break;
      case RowSense::kEqual: worst = std::max(worst, std::abs(lhs - rhs_[r])); break;
    }
  }
  return worst;
}

void LinearProgram::validate() const {
  if (matrix_.size() != rows() * cols() || senses_.size() != rows()) {
    throw InputError("linear program dimensions are inconsistent");
  }
  if (!std::isfinite(offset_)) throw InputError("non-finite objective offset");
  for (std::size_t j = 0; j < cols(); ++j) {
    if (!std::isfinite(cost_[j])) throw InputError("non-finite objective coefficient");
    if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || lower_[j] > upper_[j] ||
        lower_[j] == kInfinity || upper_[j] == -kInfinity) {
      throw InputError("invalid bounds on variable " + std::to_string(j));
    }
  }
  for (double a : matrix_)
    if (!std::isfinite(a)) throw InputError("non-finite constraint coefficient");
  for (double b : rhs_)
    if (!std::isfinite(b)) throw InputError("non-finite right-hand side");
}

namespace {

// How an original variable maps onto nonnegative tableau columns.
struct ColumnMap {
  enum class Kind { kFixed, kShifted, kMirrored, kFree } kind;
  double anchor = 0.0;      // fixed value, lower bound, or upper bound
  std::size_t column = 0;   // first tableau column
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), width_(cols + 1), data_(rows * width_) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * width_ + c]; }
  double& rhs(std::size_t r) { return at(r, width_ - 1); }
  double* row(std::size_t r) { return data_.data() + r * width_; }
  std::size_t rows() const { return rows_; }
  std::size_t width() const { return width_; }

  void erase_row(std::size_t r) {
    data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * width_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * width_));
    --rows_;
  }

 private:
  std::size_t rows_;
  std::size_t width_;
  std::vector<double> data_;
};

class Simplex {
 public:
  Simplex(Tableau& t, std::vector<std::size_t>& basis, const SimplexOptions& opt)
      : t_(t), basis_(basis), opt_(opt) {}

  // Cost row layout matches a tableau row: reduced costs, then -objective.
  enum class Result { kOptimal, kUnbounded };

  Result run(std::vector<double>& cost_row, const std::vector<bool>& allowed) {
    const std::size_t ncols = t_.width() - 1;
    std::vector<bool> basic(ncols, false);
    for (auto b : basis_) basic[b] = true;
    while (true) {
      // Bland: lowest-index improving column.
      std::size_t entering = ncols;
      for (std::size_t j = 0; j < ncols; ++j) {
        if (!basic[j] && allowed[j] && cost_row[j] < -opt_.optimality_tol) {
          entering = j;
          break;
        }
      }
      if (entering == ncols) return Result::kOptimal;

      std::size_t leaving = t_.rows();
      double best_ratio = kInfinity;
      for (std::size_t r = 0; r < t_.rows(); ++r) {
        const double a = t_.at(r, entering);
        if (a <= opt_.pivot_tol) continue;
        const double ratio = std::max(0.0, t_.rhs(r)) / a;
        const double tie_band = 1e-12 * (1.0 + std::abs(best_ratio == kInfinity ? ratio : best_ratio));
        if (leaving == t_.rows() || ratio < best_ratio - tie_band) {
          best_ratio = ratio;
          leaving = r;
        } else if (std::abs(ratio - best_ratio) <= tie_band && basis_[r] < basis_[leaving]) {
          leaving = r;
        }
      }
      if (leaving == t_.rows()) return Result::kUnbounded;

      basic[basis_[leaving]] = false;
      basic[entering] = true;
      pivot(leaving, entering, cost_row);
    }
  }

  void pivot(std::size_t pr, std::size_t pc, std::vector<double>& cost_row) {
    if (++pivots_ > opt_.max_pivots) {
      throw ResourceError("simplex exceeded " + std::to_string(opt_.max_pivots) + " pivots");
    }
    const std::size_t w = t_.width();
    double* prow = t_.row(pr);
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < w; ++c) prow[c] *= inv;
    prow[pc] = 1.0;

    nonzero_.clear();
    for (std::size_t c = 0; c < w; ++c)
      if (prow[c] != 0.0) nonzero_.push_back(c);

    auto eliminate = [&](double* target) {
      const double f = target[pc];
      if (f == 0.0) return;
      for (std::size_t c : nonzero_) target[c] -= f * prow[c];
      target[pc] = 0.0;
    };
    for (std::size_t r = 0; r < t_.rows(); ++r)
      if (r != pr) eliminate(t_.row(r));
    eliminate(cost_row.data());
    basis_[pr] = pc;
  }

  std::size_t pivots() const { return pivots_; }

 private:
  Tableau& t_;
  std::vector<std::size_t>& basis_;
  const SimplexOptions& opt_;
  std::size_t pivots_ = 0;
  std::vector<std::size_t> nonzero_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  lp.validate();
  const std::size_t n = lp.cols();
  const double sign = lp.sense() == ObjectiveSense::kMinimize ? 1.0 : -1.0;

  // Map original variables to nonnegative structural columns.
  std::vector<ColumnMap> cmap(n);
  std::size_t structural = 0;
  struct BoundRow {
    std::size_t column;
    double width;
  };
  std::vector<BoundRow> bound_rows;
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.lower(j), hi = lp.upper(j);
    if (lo == hi) {
      cmap[j] = {ColumnMap::Kind::kFixed, lo, 0};
    } else if (std::isfinite(lo)) {
      cmap[j] = {ColumnMap::Kind::kShifted, lo, structural};
      if (std::isfinite(hi)) bound_rows.push_back({structural, hi - lo});
      structural += 1;
    } else if (std::isfinite(hi)) {
      cmap[j] = {ColumnMap::Kind::kMirrored, hi, structural};
      structural += 1;
    } else {
      cmap[j] = {ColumnMap::Kind::kFree, 0.0, structural};
      structural += 2;
    }
  }

  // Standard-form rows over structural columns.
  struct StdRow {
    std::vector<double> a;
    RowSense sense;
    double b;
  };
  std::vector<StdRow> rows;
  rows.reserve(lp.rows() + bound_rows.size());
  for (std::size_t r = 0; r < lp.rows(); ++r) {
    StdRow sr{std::vector<double>(structural, 0.0), lp.row_sense(r), lp.rhs(r)};
    const auto a = lp.row(r);
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (a[j] == 0.0) continue;
      const auto& m = cmap[j];
      switch (m.kind) {
        case ColumnMap::Kind::kFixed: sr.b -= a[j] * m.anchor; break;
        case ColumnMap::Kind::kShifted:
          sr.b -= a[j] * m.anchor;
          sr.a[m.column] += a[j];
          any = true;
          break;
        case ColumnMap::Kind::kMirrored:
          sr.b -= a[j] * m.anchor;
          sr.a[m.column] -= a[j];
          any = true;
          break;
        case ColumnMap::Kind::kFree:
          sr.a[m.column] += a[j];
          sr.a[m.column + 1] -= a[j];
          any = true;
          break;
      }
    }
    if (!any) {
      const double tol = options.feasibility_tol;
      const bool ok = (sr.sense == RowSense::kLessEqual && 0.0 <= sr.b + tol) ||
                      (sr.sense == RowSense::kGreaterEqual && 0.0 >= sr.b - tol) ||
                      (sr.sense == RowSense::kEqual && std::abs(sr.b) <= tol);
      if (!ok) return {LpStatus::kInfeasible, {}, 0.0, 0};
      continue;
    }
    rows.push_back(std::move(sr));
  }
  for (const auto& br : bound_rows) {
    StdRow sr{std::vector<double>(structural, 0.0), RowSense::kLessEqual, br.width};
    sr.a[br.column] = 1.0;
    rows.push_back(std::move(sr));
  }
  for (auto& sr : rows) {
    if (sr.b < 0.0) {
      for (double& v : sr.a) v = -v;
      sr.b = -sr.b;
      if (sr.sense == RowSense::kLessEqual) sr.sense = RowSense::kGreaterEqual;
      else if (sr.sense == RowSense::kGreaterEqual) sr.sense = RowSense::kLessEqual;
    }
  }

  // Column layout: structural | slack/surplus | artificial.
  std::size_t logical = 0, artificial = 0;
  for (const auto& sr : rows) {
    if (sr.sense != RowSense::kEqual) ++logical;
    if (sr.sense != RowSense::kLessEqual) ++artificial;
  }
  const std::size_t first_art = structural + logical;
  const std::size_t ncols = first_art + artificial;
  Tableau t(rows.size(), ncols);
  std::vector<std::size_t> basis(rows.size());
  std::size_t next_logical = structural, next_art = first_art;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(rows[r].a.begin(), rows[r].a.end(), t.row(r));
    t.rhs(r) = rows[r].b;
    switch (rows[r].sense) {
      case RowSense::kLessEqual:
        t.at(r, next_logical) = 1.0;
        basis[r] = next_logical++;
        break;
      case RowSense::kGreaterEqual:
        t.at(r, next_logical++) = -1.0;
        t.at(r, next_art) = 1.0;
        basis[r] = next_art++;
        break;
      case RowSense::kEqual:
        t.at(r, next_art) = 1.0;
        basis[r] = next_art++;
        break;
    }
  }
  rows.clear();
  rows.shrink_to_fit();

  Simplex simplex(t, basis, options);
  std::vector<bool> allowed(ncols, true);

  if (artificial > 0) {
    std::vector<double> w(t.width(), 0.0);
    for (std::size_t r = 0; r < t.rows(); ++r) {
      if (basis[r] < first_art) continue;
      const double* row = t.row(r);
      for (std::size_t c = 0; c < t.width(); ++c)
        if (c < first_art || c == t.width() - 1) w[c] -= row[c];
    }
    simplex.run(w, allowed);
    double scale = 1.0;
    for (std::size_t r = 0; r < t.rows(); ++r) scale = std::max(scale, std::abs(t.rhs(r)));
    if (-w.back() > options.feasibility_tol * scale) {
      return {LpStatus::kInfeasible, {}, 0.0, simplex.pivots()};
    }
    // Drive remaining (zero-level) artificials out of the basis.
    for (std::size_t r = 0; r < t.rows();) {
      if (basis[r] < first_art) {
        ++r;
        continue;
      }
      std::size_t col = first_art;
      for (std::size_t c = 0; c < first_art; ++c) {
        if (std::abs(t.at(r, c)) > options.pivot_tol) {
          col = c;
          break;
        }
      }
      if (col == first_art) {
        t.erase_row(r);  // redundant constraint
        basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(r));
        continue;
      }
      simplex.pivot(r, col, w);
      ++r;
    }
    for (std::size_t c = first_art; c < ncols; ++c) allowed[c] = false;
  }

  // Phase 2 reduced costs.
  std::vector<double> structural_cost(ncols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& m = cmap[j];
    const double c = sign * lp.costs()[j];
    switch (m.kind) {
      case ColumnMap::Kind::kFixed: break;
      case ColumnMap::Kind::kShifted: structural_cost[m.column] = c; break;
      case ColumnMap::Kind::kMirrored: structural_cost[m.column] = -c; break;
      case ColumnMap::Kind::kFree:
        structural_cost[m.column] = c;
        structural_cost[m.column + 1] = -c;
        break;
    }
  }
  std::vector<double> d(t.width(), 0.0);
  std::copy(structural_cost.begin(), structural_cost.end(), d.begin());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const double cb = structural_cost[basis[r]];
    if (cb == 0.0) continue;
    const double* row = t.row(r);
    for (std::size_t c = 0; c < t.width(); ++c) d[c] -= cb * row[c];
  }
  if (simplex.run(d, allowed) == Simplex::Result::kUnbounded) {
    return {LpStatus::kUnbounded, {}, sign * -kInfinity, simplex.pivots()};
  }

  std::vector<double> y(ncols, 0.0);
  for (std::size_t r = 0; r < t.rows(); ++r) y[basis[r]] = std::max(0.0, t.rhs(r));
  LpSolution sol;
  sol.status = LpStatus::kOptimal;
  sol.pivots = simplex.pivots();
  sol.x.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& m = cmap[j];
    switch (m.kind) {
      case ColumnMap::Kind::kFixed: sol.x[j] = m.anchor; break;
      case ColumnMap::Kind::kShifted: sol.x[j] = m.anchor + y[m.column]; break;
      case ColumnMap::Kind::kMirrored: sol.x[j] = m.anchor - y[m.column]; break;
      case ColumnMap::Kind::kFree: sol.x[j] = y[m.column] - y[m.column + 1]; break;
    }
  }
  sol.objective = lp.evaluate(sol.x);
  return sol;
}

void dump_lp(std::ostream& out, const LinearProgram& lp) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(17);
  out << "LP " << lp.rows() << ' ' << lp.cols() << ' '
      << (lp.sense() == ObjectiveSense::kMinimize ? "MIN" : "MAX") << '\n';
  out << "OBJ";
  for (double c : lp.costs()) out << ' ' << c;
  out << " OFFSET " << lp.objective_offset() << '\n';
  for (std::size_t r = 0; r < lp.rows(); ++r) {
    out << "ROW " << r;
    for (double a : lp.row(r)) out << ' ' << a;
    const char* s = lp.row_sense(r) == RowSense::kLessEqual  ? "<="
                    : lp.row_sense(r) == RowSense::kEqual ? "="
                                                          : ">=";
    out << ' ' << s << ' ' << lp.rhs(r) << '\n';
  }
  for (std::size_t j = 0; j < lp.cols(); ++j) {
    out << "BND " << j << ' ' << lp.lower(j) << ' ' << lp.upper(j) << '\n';
  }
  out.flags(flags);
  out.precision(prec);
}

}  // namespace surropt
