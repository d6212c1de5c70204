#include "surropt/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "surropt/kfold.hpp"
#include "surropt/parallel.hpp"

namespace surropt {

namespace {
constexpr double kTau = 1e-12;
}

std::vector<double> default_svr_c_grid() { return {0.1, 1.0, 10.0, 100.0}; }

void SvrOptions::validate() const {
  if (c_grid.empty()) throw ConfigError("svr needs at least one candidate C");
  for (double c : c_grid)
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("svr C candidates must be finite and > 0");
  if (!std::isfinite(gamma)) throw ConfigError("svr gamma must be finite");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("svr epsilon must be finite and >= 0");
  if (!(tolerance > 0.0)) throw ConfigError("svr tolerance must be > 0");
  if (c_grid.size() > 1 && folds < 2) throw ConfigError("svr cross-validation needs folds >= 2");
}

double default_svr_gamma(const Eigen::MatrixXd& x) {
  const auto f = static_cast<double>(std::max<Eigen::Index>(1, x.cols()));
  if (x.size() == 0) return 1.0 / f;
  const double mean = x.mean();
  const double var = (x.array() - mean).square().mean();
  return var > 0.0 ? 1.0 / (f * var) : 1.0 / f;
}

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma) {
  const Eigen::VectorXd an = a.rowwise().squaredNorm();
  const Eigen::VectorXd bn = b.rowwise().squaredNorm();
  Eigen::MatrixXd d = -2.0 * a * b.transpose();
  d.colwise() += an;
  d.rowwise() += bn.transpose();
  return (-gamma * d.cwiseMax(0.0)).array().exp().matrix();
}

SvrDualResult solve_svr_dual(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& z, double c,
                             double epsilon, double tolerance, std::uint64_t max_iterations) {
  const Eigen::Index n = z.size();
  const Eigen::Index l = 2 * n;
  auto y = [n](Eigen::Index t) { return t < n ? 1.0 : -1.0; };
  auto row = [n](Eigen::Index t) { return t < n ? t : t - n; };
  auto q = [&](Eigen::Index t, Eigen::Index s) { return y(t) * y(s) * kernel(row(t), row(s)); };

  Eigen::VectorXd p(l), alpha = Eigen::VectorXd::Zero(l), grad(l);
  for (Eigen::Index i = 0; i < n; ++i) {
    p[i] = epsilon - z[i];
    p[i + n] = epsilon + z[i];
  }
  grad = p;
  auto upper = [&](Eigen::Index t) { return alpha[t] >= c; };
  auto lower = [&](Eigen::Index t) { return alpha[t] <= 0.0; };

  SvrDualResult out;
  while (out.iterations < max_iterations) {
    // Maximal violating pair with second-order choice of j.
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1, j = -1;
    for (Eigen::Index t = 0; t < l; ++t) {
      if (y(t) > 0) {
        if (!upper(t) && -grad[t] >= gmax) { gmax = -grad[t]; i = t; }
      } else if (!lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        i = t;
      }
    }
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; i >= 0 && t < l; ++t) {
      double diff;
      if (y(t) > 0) {
        if (lower(t)) continue;
        gmax2 = std::max(gmax2, grad[t]);
        diff = gmax + grad[t];
      } else {
        if (upper(t)) continue;
        gmax2 = std::max(gmax2, -grad[t]);
        diff = gmax - grad[t];
      }
      if (diff > 0.0) {
        const double a = kernel(row(i), row(i)) + kernel(row(t), row(t)) - 2.0 * kernel(row(i), row(t));
        const double obj = -diff * diff / (a > 0.0 ? a : kTau);
        if (obj <= best) { best = obj; j = t; }
      }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < tolerance) {
      out.converged = true;
      break;
    }
    ++out.iterations;

    const double old_i = alpha[i], old_j = alpha[j];
    const double qij = q(i, j);
    const double qii = kernel(row(i), row(i)), qjj = kernel(row(j), row(j));
    if (y(i) != y(j)) {
      double a = qii + qjj + 2.0 * qij;
      if (a <= 0.0) a = kTau;
      const double delta = (-grad[i] - grad[j]) / a;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double a = qii + qjj - 2.0 * qij;
      if (a <= 0.0) a = kTau;
      const double delta = (grad[i] - grad[j]) / a;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    const double yi = y(i), yj = y(j);
    const auto ri = row(i), rj = row(j);
    for (Eigen::Index t = 0; t < l; ++t) {
      const double yt = y(t);
      const auto rt = row(t);
      grad[t] += yt * (yi * kernel(rt, ri) * di + yj * kernel(rt, rj) * dj);
    }
  }

  // Bias as the midpoint of the feasible interval, or the mean over free variables.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, free_sum = 0.0;
  int free_count = 0;
  for (Eigen::Index t = 0; t < l; ++t) {
    const double yg = y(t) * grad[t];
    if (upper(t)) {
      if (y(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / free_count : (ub + lb) / 2.0;
  out.bias = -rho;
  out.objective = 0.5 * alpha.dot(grad + p);
  out.beta = alpha.head(n) - alpha.tail(n);
  out.alpha = std::move(alpha);
  return out;
}

SvrModel::SvrModel(Eigen::MatrixXd support, Eigen::MatrixXd coef, Eigen::VectorXd bias, std::vector<double> c,
                   double gamma, double epsilon)
    : support_(std::move(support)),
      coef_(std::move(coef)),
      bias_(std::move(bias)),
      c_(std::move(c)),
      gamma_(gamma),
      epsilon_(epsilon) {
  if (coef_.cols() != support_.rows() || bias_.size() != coef_.rows() ||
      c_.size() != static_cast<std::size_t>(coef_.rows())) {
    throw InputError("svr model parts have inconsistent sizes");
  }
  if (!support_.allFinite() || !coef_.allFinite() || !bias_.allFinite() || !(gamma_ > 0.0)) {
    throw InputError("svr model parameters must be finite with gamma > 0");
  }
}

std::vector<double> SvrModel::predict(std::span<const double> x) const {
  check_input(x);
  const Eigen::Map<const Eigen::RowVectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd k(support_.rows());
  for (Eigen::Index s = 0; s < support_.rows(); ++s)
    k[s] = std::exp(-gamma_ * (support_.row(s) - xv).squaredNorm());
  const Eigen::VectorXd out = coef_ * k + bias_;
  return {out.data(), out.data() + out.size()};
}

nlohmann::json SvrModel::metadata() const {
  return {{"gamma", gamma_},
          {"epsilon", epsilon_},
          {"c", c_},
          {"support_vectors", support_.rows()},
          {"row_order_sensitive", true}};
}

void SvrModel::write_payload(BinaryWriter& out) const {
  out.u64(static_cast<std::uint64_t>(support_.rows()));
  out.u64(static_cast<std::uint64_t>(support_.cols()));
  out.u64(static_cast<std::uint64_t>(coef_.rows()));
  for (Eigen::Index r = 0; r < support_.rows(); ++r)
    for (Eigen::Index c = 0; c < support_.cols(); ++c) out.f64(support_(r, c));
  for (Eigen::Index r = 0; r < coef_.rows(); ++r)
    for (Eigen::Index c = 0; c < coef_.cols(); ++c) out.f64(coef_(r, c));
  for (Eigen::Index r = 0; r < bias_.size(); ++r) out.f64(bias_[r]);
}

std::unique_ptr<SvrModel> SvrModel::read_payload(const nlohmann::json& meta, BinaryReader& in) {
  const auto sv = static_cast<Eigen::Index>(in.count(kSvrMaxRows, "svr support vectors"));
  const auto inputs = static_cast<Eigen::Index>(in.count(1 << 20, "svr inputs"));
  const auto outputs = static_cast<Eigen::Index>(in.count(1 << 20, "svr outputs"));
  Eigen::MatrixXd support(sv, inputs), coef(outputs, sv);
  Eigen::VectorXd bias(outputs);
  for (Eigen::Index r = 0; r < sv; ++r)
    for (Eigen::Index c = 0; c < inputs; ++c) support(r, c) = in.f64();
  for (Eigen::Index r = 0; r < outputs; ++r)
    for (Eigen::Index c = 0; c < sv; ++c) coef(r, c) = in.f64();
  for (Eigen::Index r = 0; r < outputs; ++r) bias[r] = in.f64();
  return std::make_unique<SvrModel>(std::move(support), std::move(coef), std::move(bias),
                                    meta.at("c").get<std::vector<double>>(), meta.at("gamma").get<double>(),
                                    meta.at("epsilon").get<double>());
}

namespace {

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& k, const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          k(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
  return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<std::size_t>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out[static_cast<Eigen::Index>(r)] = v[static_cast<Eigen::Index>(rows[r])];
  return out;
}

}  // namespace

SvrFit fit_svr(const Dataset& data, const SvrOptions& options) {
  options.validate();
  data.validate();
  const std::size_t n = data.rows();
  if (n == 0) throw InputError("svr fit on an empty dataset");
  if (n > kSvrMaxRows) {
    throw ResourceError("svr uses a dense kernel and is limited to " + std::to_string(kSvrMaxRows) +
                        " rows (have " + std::to_string(n) + ")");
  }
  const bool cv = options.c_grid.size() > 1;
  if (cv && n < options.folds) throw InputError("svr needs at least as many rows as folds");

  const double gamma = options.gamma > 0.0 ? options.gamma : default_svr_gamma(data.x);
  const std::uint64_t max_iter =
      options.max_iterations > 0 ? options.max_iterations : std::max<std::uint64_t>(10'000'000, 200 * n);
  const Eigen::MatrixXd kernel = rbf_kernel(data.x, data.x, gamma);
  const std::size_t outputs = data.outputs();
  const std::size_t grid = options.c_grid.size();

  SvrFit fit;
  fit.cv.c_grid = options.c_grid;
  fit.cv.cv_error.assign(outputs, std::vector<double>(grid, 0.0));
  fit.cv.selected_c.assign(outputs, options.c_grid.front());

  if (cv) {
    const auto assignment = kfold_split(n, options.folds, options.seed);
    std::vector<FoldRows> folds;
    std::vector<Eigen::MatrixXd> train_k, valid_k;
    for (std::size_t f = 0; f < options.folds; ++f) {
      folds.push_back(fold_rows(assignment, f));
      train_k.push_back(submatrix(kernel, folds.back().train, folds.back().train));
      valid_k.push_back(submatrix(kernel, folds.back().validation, folds.back().train));
    }
    parallel_for(outputs, [&](std::size_t o) {
      const Eigen::VectorXd z = data.y.col(static_cast<Eigen::Index>(o));
      auto& err = fit.cv.cv_error[o];
      for (std::size_t f = 0; f < folds.size(); ++f) {
        const Eigen::VectorXd zt = take(z, folds[f].train);
        const Eigen::VectorXd zv = take(z, folds[f].validation);
        for (std::size_t g = 0; g < grid; ++g) {
          const auto dual = solve_svr_dual(train_k[f], zt, options.c_grid[g], options.epsilon,
                                           options.tolerance, max_iter);
          const Eigen::VectorXd pred = (valid_k[f] * dual.beta).array() + dual.bias;
          err[g] += (pred - zv).squaredNorm() / static_cast<double>(zv.size()) /
                    static_cast<double>(folds.size());
        }
      }
      fit.cv.selected_c[o] = options.c_grid[static_cast<std::size_t>(
          std::min_element(err.begin(), err.end()) - err.begin())];
    });
  }

  fit.duals.resize(outputs);
  parallel_for(outputs, [&](std::size_t o) {
    fit.duals[o] = solve_svr_dual(kernel, data.y.col(static_cast<Eigen::Index>(o)), fit.cv.selected_c[o],
                                  options.epsilon, options.tolerance, max_iter);
  });

  std::vector<Eigen::Index> support_rows;
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(n); ++r) {
    for (const auto& d : fit.duals) {
      if (d.beta[r] != 0.0) {
        support_rows.push_back(r);
        break;
      }
    }
  }
  const auto sv = static_cast<Eigen::Index>(support_rows.size());
  Eigen::MatrixXd support(sv, data.x.cols());
  Eigen::MatrixXd coef(static_cast<Eigen::Index>(outputs), sv);
  Eigen::VectorXd bias(static_cast<Eigen::Index>(outputs));
  for (Eigen::Index s = 0; s < sv; ++s) {
    support.row(s) = data.x.row(support_rows[static_cast<std::size_t>(s)]);
    for (std::size_t o = 0; o < outputs; ++o)
      coef(static_cast<Eigen::Index>(o), s) = fit.duals[o].beta[support_rows[static_cast<std::size_t>(s)]];
  }
  bool converged = true;
  for (std::size_t o = 0; o < outputs; ++o) {
    bias[static_cast<Eigen::Index>(o)] = fit.duals[o].bias;
    converged = converged && fit.duals[o].converged;
  }
  fit.model = std::make_unique<SvrModel>(std::move(support), std::move(coef), std::move(bias), fit.cv.selected_c,
                                         gamma, options.epsilon);
  if (!converged) {
    throw SvrNotConverged("svr did not reach the KKT tolerance within " + std::to_string(max_iter) + " iterations",
                          std::shared_ptr<SvrModel>(std::move(fit.model)));
  }
  return fit;
}

}  // namespace surropt
