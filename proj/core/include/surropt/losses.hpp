#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace surropt {

enum class LossKind { kMse, kMae, kHuber };

struct LossSpec {
  LossKind kind = LossKind::kMse;
  /// Huber threshold; ignored for the other kinds.
  double delta = 1.0;

  void validate() const;
  friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

std::string_view to_string(LossKind kind);
std::optional<LossKind> parse_loss_kind(std::string_view name);
/// "mse, mae, huber"
std::string valid_loss_kinds();

/// Stand-in curvature where the true second derivative is zero (MAE, and the
/// linear branch of Huber).
inline constexpr double kHessianFloor = 1.0;

/// Per-sample loss of prediction `yhat` against target `y`:
/// MSE (y-yhat)^2, MAE |y-yhat|, Huber (y-yhat)^2/2 inside delta, else
/// delta|y-yhat| - delta^2/2.
double loss_value(const LossSpec& spec, double y, double yhat);

struct GradHess {
  double gradient = 0.0;
  double hessian = 0.0;
};

/// Derivatives with respect to `yhat`. The MAE gradient is sign(yhat - y),
/// with 0 at a zero error.
GradHess loss_grad_hess(const LossSpec& spec, double y, double yhat);

/// Constant c minimizing sum_k loss(residual_k, c): mean for MSE, median for
/// MAE, one Newton step from the median for Huber. Reorders `residuals`.
double leaf_optimal_value(const LossSpec& spec, std::span<double> residuals);

/// Median with the two middle values averaged for even counts. Reorders `values`.
double median_inplace(std::span<double> values);

}  // namespace surropt
