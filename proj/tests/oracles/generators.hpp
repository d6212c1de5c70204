#pragma once

// Random problem generators shared by the unit and acceptance tests.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "surropt/lp.hpp"
#include "surropt/rng.hpp"

namespace surropt::oracle {

inline Eigen::MatrixXd gaussian_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) {
      const double u1 = std::max(1e-300, uniform01(rng)), u2 = uniform01(rng);
      m(i, j) = std::sqrt(-2 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
  return m;
}

// Bounded LP with a known feasible point x0 drawn inside the box.
inline LinearProgram random_feasible_lp(Rng& rng, std::size_t n, std::size_t m) {
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * uniform01(rng); };
  LinearProgram lp(uniform_below(rng, 2) ? ObjectiveSense::kMaximize : ObjectiveSense::kMinimize);
  std::vector<double> x0;
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = uniform_below(rng, 3) == 0 ? u(-3, 0) : 0.0;
    const double hi = lo + u(0.5, 6);
    lp.add_variable(u(-5, 5), lo, hi);
    x0.push_back(u(lo, hi));
  }
  for (std::size_t r = 0; r < m; ++r) {
    std::vector<double> a(n);
    double ax = 0;
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = uniform_below(rng, 4) == 0 ? 0.0 : u(-3, 3);
      ax += a[j] * x0[j];
    }
    const auto kind = uniform_below(rng, 5);
    if (kind == 0) lp.add_dense_row(a, RowSense::kEqual, ax);
    else if (kind < 3) lp.add_dense_row(a, RowSense::kLessEqual, ax + u(0, 2));
    else lp.add_dense_row(a, RowSense::kGreaterEqual, ax - u(0, 2));
  }
  return lp;
}

}  // namespace surropt::oracle
