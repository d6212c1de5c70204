#include "surropt/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "surropt/errors.hpp"

namespace surropt {

void LossSpec::validate() const {
  if (kind == LossKind::kHuber && !(delta > 0.0 && std::isfinite(delta))) {
    throw ConfigError("huber loss needs a finite delta > 0");
  }
}

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kMse: return "mse";
    case LossKind::kMae: return "mae";
    case LossKind::kHuber: return "huber";
  }
  return "unknown";
}

std::optional<LossKind> parse_loss_kind(std::string_view name) {
  if (name == "mse") return LossKind::kMse;
  if (name == "mae") return LossKind::kMae;
  if (name == "huber") return LossKind::kHuber;
  return std::nullopt;
}

std::string valid_loss_kinds() { return "mse, mae, huber"; }

namespace {

void require_finite(double y, double yhat) {
  if (!std::isfinite(y) || !std::isfinite(yhat)) throw InputError("loss evaluated at a non-finite value");
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

double loss_value(const LossSpec& spec, double y, double yhat) {
  require_finite(y, yhat);
  const double e = y - yhat;
  switch (spec.kind) {
    case LossKind::kMse: return e * e;
    case LossKind::kMae: return std::abs(e);
    case LossKind::kHuber: {
      const double a = std::abs(e);
      return a <= spec.delta ? 0.5 * e * e : spec.delta * a - 0.5 * spec.delta * spec.delta;
    }
  }
  return 0.0;
}

GradHess loss_grad_hess(const LossSpec& spec, double y, double yhat) {
  require_finite(y, yhat);
  const double r = yhat - y;
  switch (spec.kind) {
    case LossKind::kMse: return {2.0 * r, 2.0};
    case LossKind::kMae: return {sign(r), kHessianFloor};
    case LossKind::kHuber:
      if (std::abs(r) <= spec.delta) return {r, 1.0};
      return {spec.delta * sign(r), kHessianFloor};
  }
  return {};
}

double median_inplace(std::span<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double leaf_optimal_value(const LossSpec& spec, std::span<double> residuals) {
  if (residuals.empty()) return 0.0;
  switch (spec.kind) {
    case LossKind::kMse:
      return std::accumulate(residuals.begin(), residuals.end(), 0.0) /
             static_cast<double>(residuals.size());
    case LossKind::kMae: return median_inplace(residuals);
    case LossKind::kHuber: {
      const double m = median_inplace(residuals);
      double psi = 0.0;
      double inside = 0.0;
      for (double r : residuals) {
        const double e = r - m;
        if (std::abs(e) <= spec.delta) {
          psi += e;
          inside += 1.0;
        } else {
          psi += spec.delta * sign(e);
        }
      }
      const double curvature = inside > 0.0 ? inside : kHessianFloor * static_cast<double>(residuals.size());
      return m + psi / curvature;
    }
  }
  return 0.0;
}

}  // namespace surropt
