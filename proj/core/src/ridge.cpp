#include "surropt/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "surropt/errors.hpp"
#include "surropt/kfold.hpp"

namespace surropt {

std::vector<double> default_ridge_lambdas() {
  std::vector<double> out;
  for (int k = 0; k <= 12; ++k) out.push_back(std::pow(10.0, -3.0 + 0.5 * k));
  return out;
}

RidgeModel::RidgeModel(Eigen::MatrixXd coef, double lambda) : coef_(std::move(coef)), lambda_(lambda) {
  if (coef_.cols() < 1) throw InputError("ridge coefficient matrix needs an intercept column");
  if (!coef_.allFinite()) throw InputError("ridge coefficients must be finite");
  if (!(lambda_ >= 0.0)) throw InputError("ridge lambda must be >= 0");
}

std::vector<double> RidgeModel::predict(std::span<const double> x) const {
  check_input(x);
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd out = coef_.col(0) + coef_.rightCols(coef_.cols() - 1) * xv;
  return {out.data(), out.data() + out.size()};
}

nlohmann::json RidgeModel::metadata() const {
  return {{"lambda", lambda_}, {"row_order_sensitive", false}};
}

void RidgeModel::write_payload(BinaryWriter& out) const {
  out.u64(static_cast<std::uint64_t>(coef_.rows()));
  out.u64(static_cast<std::uint64_t>(coef_.cols()));
  for (Eigen::Index r = 0; r < coef_.rows(); ++r)
    for (Eigen::Index c = 0; c < coef_.cols(); ++c) out.f64(coef_(r, c));
}

std::unique_ptr<RidgeModel> RidgeModel::read_payload(const nlohmann::json& meta, BinaryReader& in) {
  const auto rows = in.count(1 << 20, "ridge outputs");
  const auto cols = in.count(1 << 20, "ridge columns");
  Eigen::MatrixXd coef(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < coef.rows(); ++r)
    for (Eigen::Index c = 0; c < coef.cols(); ++c) coef(r, c) = in.f64();
  return std::make_unique<RidgeModel>(std::move(coef), meta.at("lambda").get<double>());
}

namespace {

// Sufficient statistics of one training block.
struct Moments {
  Eigen::RowVectorXd x_mean;
  Eigen::RowVectorXd y_mean;
  Eigen::MatrixXd gram;   // Xc' Xc
  Eigen::MatrixXd cross;  // Xc' Yc
};

Moments moments(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  Moments m;
  m.x_mean = x.colwise().mean();
  m.y_mean = y.colwise().mean();
  const Eigen::MatrixXd xc = x.rowwise() - m.x_mean;
  const Eigen::MatrixXd yc = y.rowwise() - m.y_mean;
  m.gram = xc.transpose() * xc;
  m.cross = xc.transpose() * yc;
  return m;
}

std::optional<Eigen::MatrixXd> solve(const Moments& m, double lambda) {
  const auto p = m.gram.rows();
  Eigen::MatrixXd a = m.gram;
  a.diagonal().array() += lambda;
  if (p == 0) return Eigen::MatrixXd(0, m.cross.cols());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  const double scale = std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 1e-12 * scale) {
    return std::nullopt;
  }
  Eigen::MatrixXd beta = ldlt.solve(m.cross);  // p x outputs
  if (!beta.allFinite()) return std::nullopt;
  return beta;
}

RidgeModel assemble(const Moments& m, const Eigen::MatrixXd& beta, double lambda) {
  const auto outputs = m.cross.cols();
  const auto p = m.gram.rows();
  Eigen::MatrixXd coef(outputs, p + 1);
  coef.rightCols(p) = beta.transpose();
  coef.col(0) = (m.y_mean - m.x_mean * beta).transpose();
  return RidgeModel(std::move(coef), lambda);
}

}  // namespace

std::optional<RidgeModel> try_fit_ridge(const Dataset& data, double lambda) {
  data.validate();
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("ridge lambda must be finite and >= 0");
  if (data.rows() == 0) throw InputError("ridge fit on an empty dataset");
  const Moments m = moments(data.x, data.y);
  const auto beta = solve(m, lambda);
  if (!beta) return std::nullopt;
  return assemble(m, *beta, lambda);
}

RidgeFit fit_ridge(const Dataset& data, const RidgeOptions& options) {
  data.validate();
  if (options.lambdas.empty()) throw ConfigError("ridge needs at least one candidate lambda");
  for (double l : options.lambdas)
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("ridge lambdas must be finite and >= 0");
  if (data.rows() <= data.inputs() + 1) {
    throw InputError("ridge needs more rows than inputs + 1 (have " + std::to_string(data.rows()) + ")");
  }

  RidgeCvResult cv;
  cv.lambdas = options.lambdas;
  cv.cv_error.assign(options.lambdas.size(), 0.0);
  const auto assignment = kfold_split(data.rows(), options.folds, options.seed);
  for (std::size_t f = 0; f < options.folds; ++f) {
    const FoldRows rows = fold_rows(assignment, f);
    const Dataset train = data.subset(rows.train);
    const Dataset valid = data.subset(rows.validation);
    const Moments m = moments(train.x, train.y);
    for (std::size_t k = 0; k < options.lambdas.size(); ++k) {
      const auto beta = solve(m, options.lambdas[k]);
      if (!beta) {
        cv.cv_error[k] = std::numeric_limits<double>::infinity();
        continue;
      }
      const Eigen::MatrixXd pred =
          (valid.x * *beta).rowwise() + (m.y_mean - m.x_mean * *beta);
      const double sse = (pred - valid.y).squaredNorm();
      cv.cv_error[k] += sse / static_cast<double>(valid.rows()) / static_cast<double>(options.folds);
    }
  }
  const auto best = static_cast<std::size_t>(
      std::min_element(cv.cv_error.begin(), cv.cv_error.end()) - cv.cv_error.begin());
  double lambda = options.lambdas[best];

  const Moments all = moments(data.x, data.y);
  auto beta = solve(all, lambda);
  if (!beta) {
    double fallback = std::numeric_limits<double>::infinity();
    for (double l : options.lambdas)
      if (l > 0.0) fallback = std::min(fallback, l);
    if (!std::isfinite(fallback)) throw InputError("ridge normal matrix is singular and no positive lambda is available");
    lambda = fallback;
    beta = solve(all, lambda);
    if (!beta) throw InternalError("ridge solve failed at a positive lambda");
  }
  cv.selected_lambda = lambda;
  return {assemble(all, *beta, lambda), std::move(cv)};
}

}  // namespace surropt
