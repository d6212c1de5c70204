#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "surropt/dataset.hpp"
#include "surropt/errors.hpp"
#include "surropt/surrogate.hpp"

namespace surropt {

inline constexpr std::size_t kSvrMaxRows = 10000;

std::vector<double> default_svr_c_grid();  // {0.1, 1, 10, 100}

struct SvrOptions {
  std::vector<double> c_grid = default_svr_c_grid();
  /// <= 0 selects 1 / (inputs * variance of all X entries).
  double gamma = 0.0;
  double epsilon = 0.1;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  double tolerance = 1e-3;
  /// 0 selects max(10^7, 200 N).
  std::uint64_t max_iterations = 0;

  void validate() const;
};

/// 1 / (F * var(X)) over all entries; 1 / F when X is constant.
double default_svr_gamma(const Eigen::MatrixXd& x);

/// Solution of one epsilon-SVR dual
///   min 1/2 a'Qa + p'a  s.t.  y'a = 0, 0 <= a <= C
/// over 2N variables (a_i, a*_i), Q_ts = y_t y_s K(x_t, x_s), y = (+1, -1).
struct SvrDualResult {
  /// beta_i = a_i - a*_i; prediction is sum_i beta_i K(x_i, x) + bias.
  Eigen::VectorXd beta;
  Eigen::VectorXd alpha;  // 2N
  double bias = 0.0;
  double objective = 0.0;
  std::uint64_t iterations = 0;
  bool converged = false;
};

/// SMO with second-order working-set selection on a precomputed kernel.
SvrDualResult solve_svr_dual(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& z, double c,
                             double epsilon, double tolerance, std::uint64_t max_iterations);

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma);

/// RBF epsilon-SVR per output. Support vectors are stored once as the union
/// over outputs; `coef` is outputs x support vectors.
class SvrModel final : public SurrogateModel {
 public:
  SvrModel(Eigen::MatrixXd support, Eigen::MatrixXd coef, Eigen::VectorXd bias, std::vector<double> c,
           double gamma, double epsilon);

  LearnerKind kind() const override { return LearnerKind::kSvr; }
  std::size_t input_size() const override { return static_cast<std::size_t>(support_.cols()); }
  std::size_t output_size() const override { return static_cast<std::size_t>(coef_.rows()); }
  std::vector<double> predict(std::span<const double> x) const override;
  nlohmann::json metadata() const override;
  void write_payload(BinaryWriter& out) const override;

  static std::unique_ptr<SvrModel> read_payload(const nlohmann::json& meta, BinaryReader& in);

  const Eigen::MatrixXd& support() const { return support_; }
  const Eigen::MatrixXd& coef() const { return coef_; }
  const Eigen::VectorXd& bias() const { return bias_; }
  const std::vector<double>& c() const { return c_; }
  double gamma() const { return gamma_; }
  double epsilon() const { return epsilon_; }

 private:
  Eigen::MatrixXd support_;
  Eigen::MatrixXd coef_;
  Eigen::VectorXd bias_;
  std::vector<double> c_;
  double gamma_;
  double epsilon_;
};

struct SvrCvResult {
  std::vector<double> c_grid;
  /// outputs x grid: mean validation MSE.
  std::vector<std::vector<double>> cv_error;
  std::vector<double> selected_c;
};

struct SvrFit {
  std::unique_ptr<SvrModel> model;
  SvrCvResult cv;
  /// Per output dual solution on the full training block.
  std::vector<SvrDualResult> duals;
};

/// Thrown when an SMO solve hits its iteration cap. Carries the model built
/// from the last iterates.
class SvrNotConverged : public ResourceError {
 public:
  SvrNotConverged(const std::string& what, std::shared_ptr<SvrModel> best)
      : ResourceError(what), best_(std::move(best)) {}
  const std::shared_ptr<SvrModel>& best_so_far() const { return best_; }

 private:
  std::shared_ptr<SvrModel> best_;
};

/// Selects C per output by k-fold CV, then refits every output on all rows.
/// Folds and gamma are shared across outputs. A single-entry grid skips CV.
SvrFit fit_svr(const Dataset& data, const SvrOptions& options);

}  // namespace surropt
