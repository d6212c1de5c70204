#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "surropt/dataset.hpp"
#include "surropt/surrogate.hpp"

namespace surropt {

/// 13 log-spaced values from 1e-3 to 1e3.
std::vector<double> default_ridge_lambdas();

struct RidgeOptions {
  std::vector<double> lambdas = default_ridge_lambdas();
  std::size_t folds = 10;
  std::uint64_t seed = 0;
};

/// Linear model per output with an unpenalized intercept, fitted by
/// minimizing sum_k (y_k - b - x_k.beta)^2 + lambda * |beta|^2.
class RidgeModel final : public SurrogateModel {
 public:
  /// `coef` is outputs x (inputs + 1), intercept in column 0.
  RidgeModel(Eigen::MatrixXd coef, double lambda);

  LearnerKind kind() const override { return LearnerKind::kRidge; }
  std::size_t input_size() const override { return static_cast<std::size_t>(coef_.cols() - 1); }
  std::size_t output_size() const override { return static_cast<std::size_t>(coef_.rows()); }
  std::vector<double> predict(std::span<const double> x) const override;
  nlohmann::json metadata() const override;
  void write_payload(BinaryWriter& out) const override;

  static std::unique_ptr<RidgeModel> read_payload(const nlohmann::json& meta, BinaryReader& in);

  double lambda() const { return lambda_; }
  const Eigen::MatrixXd& coefficients() const { return coef_; }

 private:
  Eigen::MatrixXd coef_;
  double lambda_;
};

/// Closed-form fit at a fixed lambda. Returns nullopt when the penalized
/// normal matrix is numerically singular (only possible at lambda = 0).
std::optional<RidgeModel> try_fit_ridge(const Dataset& data, double lambda);

struct RidgeCvResult {
  std::vector<double> lambdas;
  /// Mean validation MSE over folds, summed over outputs; +inf if singular.
  std::vector<double> cv_error;
  double selected_lambda = 0.0;
};

struct RidgeFit {
  RidgeModel model;
  RidgeCvResult cv;
};

/// Selects one lambda shared by all outputs by k-fold CV, then refits on all
/// rows. Falls back to the smallest positive candidate if the selected lambda
/// is 0 and the normal matrix is singular.
RidgeFit fit_ridge(const Dataset& data, const RidgeOptions& options);

}  // namespace surropt
