#include <gtest/gtest.h>

#include "oracles/generators.hpp"
#include "oracles/ridge_gd.hpp"
#include "surropt/errors.hpp"
#include "surropt/ridge.hpp"
#include "surropt/rng.hpp"

namespace surropt {
namespace {

Eigen::MatrixXd gaussian(Rng& rng, Eigen::Index r, Eigen::Index c) { return oracle::gaussian_matrix(rng, r, c); }

TEST(Ridge, DefaultGrid) {
  const auto g = default_ridge_lambdas();
  ASSERT_EQ(g.size(), 13u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-3);
  EXPECT_DOUBLE_EQ(g.back(), 1e3);
}

TEST(Ridge, LambdaZeroIsLeastSquares) {
  Rng rng = make_rng(1);
  Dataset d;
  d.x = gaussian(rng, 60, 3);
  Eigen::Vector3d beta(1.5, -2.0, 0.25);
  d.y = ((d.x * beta).array() + 4.0).matrix();
  const auto m = try_fit_ridge(d, 0.0);
  ASSERT_TRUE(m.has_value());
  EXPECT_NEAR(m->coefficients()(0, 0), 4.0, 1e-10);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(m->coefficients()(0, k + 1), beta[k], 1e-10);
}

TEST(Ridge, OrthonormalColumnShrinkage) {
  // Centred unit-norm column: beta = x'y / (1 + lambda).
  Dataset d;
  d.x.resize(4, 1);
  d.x << 0.5, -0.5, 0.5, -0.5;
  d.y.resize(4, 1);
  d.y << 3.0, 1.0, 2.0, -1.0;
  const double xty = (d.x.col(0).array() * (d.y.col(0).array() - d.y.mean())).sum();
  for (double lambda : {0.0, 0.5, 2.0, 10.0}) {
    const auto m = try_fit_ridge(d, lambda);
    ASSERT_TRUE(m.has_value());
    EXPECT_NEAR(m->coefficients()(0, 1), xty / (1 + lambda), 1e-12);
  }
}

TEST(Ridge, HugeLambdaKillsSlopes) {
  Rng rng = make_rng(2);
  Dataset d;
  d.x = gaussian(rng, 80, 44);
  d.y = gaussian(rng, 80, 3);
  const auto m = try_fit_ridge(d, 1e9);
  ASSERT_TRUE(m.has_value());
  EXPECT_LT(m->coefficients().rightCols(44).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Ridge, MatchesGradientDescent) {
  Rng rng = make_rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    Dataset d;
    d.x = gaussian(rng, 100, 44);
    d.y = gaussian(rng, 100, 2);
    const double lambda = std::pow(10.0, -1.0 + trial * 0.5);
    const auto m = try_fit_ridge(d, lambda);
    ASSERT_TRUE(m.has_value());
    for (Eigen::Index o = 0; o < 2; ++o) {
      const auto w = oracle::ridge_gradient_descent(d.x, d.y.col(o), lambda);
      for (Eigen::Index k = 0; k < 45; ++k) ASSERT_NEAR(m->coefficients()(o, k), w[k], 1e-6);
    }
  }
}

TEST(Ridge, SingularAtZeroFallsBack) {
  Rng rng = make_rng(4);
  Dataset d;
  d.x = gaussian(rng, 60, 44);
  d.x.col(5) = d.x.col(4);  // collinear
  d.y = gaussian(rng, 60, 1);
  EXPECT_FALSE(try_fit_ridge(d, 0.0).has_value());
  RidgeOptions opt;
  opt.lambdas = {0.0};
  EXPECT_THROW(fit_ridge(d, opt), InputError);
  opt.lambdas = {0.0, 0.25, 4.0};
  const auto fit = fit_ridge(d, opt);
  EXPECT_GT(fit.cv.selected_lambda, 0.0);
}

TEST(Ridge, CvSelectsSharedLambdaAndIsRowOrderInvariant) {
  Rng rng = make_rng(5);
  Dataset d;
  d.x = gaussian(rng, 120, 44);
  d.y = d.x.leftCols(3) + 0.5 * gaussian(rng, 120, 3);
  RidgeOptions opt;
  const auto fit = fit_ridge(d, opt);
  EXPECT_EQ(fit.cv.cv_error.size(), 13u);
  EXPECT_TRUE(std::find(opt.lambdas.begin(), opt.lambdas.end(), fit.cv.selected_lambda) != opt.lambdas.end());

  // Same lambda on permuted rows gives the same coefficients.
  std::vector<std::size_t> perm(120);
  for (std::size_t k = 0; k < 120; ++k) perm[k] = (k * 37) % 120;
  const auto a = try_fit_ridge(d, fit.cv.selected_lambda);
  const auto b = try_fit_ridge(d.subset(perm), fit.cv.selected_lambda);
  EXPECT_LT((a->coefficients() - b->coefficients()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_FALSE(fit.model.metadata().at("row_order_sensitive").get<bool>());
}

TEST(Ridge, PredictZeroInputGivesIntercept) {
  Eigen::MatrixXd coef(2, 3);
  coef << 1, 2, 3, -4, 5, 6;
  RidgeModel m(coef, 0.1);
  const std::vector<double> zero(2, 0.0);
  EXPECT_EQ(m.predict(zero), (std::vector<double>{1, -4}));
  const std::vector<double> bad(3, 0.0);
  EXPECT_THROW(m.predict(bad), InputError);
}

TEST(Ridge, TooFewRows) {
  Rng rng = make_rng(6);
  Dataset d;
  d.x = gaussian(rng, 45, 44);
  d.y = gaussian(rng, 45, 1);
  EXPECT_THROW(fit_ridge(d, RidgeOptions{}), InputError);
}

}  // namespace
}  // namespace surropt
