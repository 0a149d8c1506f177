#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "evi/error.hpp"
#include "evi/regression.hpp"
#include "test_support.hpp"

namespace evi {
namespace {

ScenarioMatrix random_scenarios(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  ScenarioMatrix s;
  s.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < s.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < s.values.cols(); ++c) s.values(r, c) = (c + 1.0) * z(rng) + 2.0 * c;
  }
  for (std::size_t c = 0; c < cols; ++c) s.variable_names.push_back("x" + std::to_string(c + 1));
  return s;
}

TEST(FitLinear, RecoversExactAffineValues) {
  const auto s = random_scenarios(200, 2, 1);
  const Eigen::VectorXd y = 3.0 * s.values.col(0) + 2.0 * s.values.col(1) - Eigen::VectorXd::Ones(200);
  const auto fit = fit_linear(s, y);
  EXPECT_NEAR(fit.betas(0), 3.0, 1e-8);
  EXPECT_NEAR(fit.betas(1), 2.0, 1e-8);
  EXPECT_NEAR(fit.alpha, -1.0, 1e-8);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(fit.residual_variance, 0.0, 1e-20);
}

TEST(FitLinear, ConstantColumnHasZeroSlopes) {
  const auto s = random_scenarios(500, 3, 2);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(500, 4.25);
  const auto fit = fit_linear(s, y);
  EXPECT_LE(fit.betas.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(fit.alpha, 4.25, 1e-10);
  EXPECT_EQ(fit.r_squared, 1.0);
}

TEST(FitLinear, EvenFunctionOfSymmetricVariableHasNoSlope) {
  const auto m = testing::normal_model({{"x1", {0, 1}}}, {{"d1", "x1*x1"}, {"d2", "0"}});
  const auto s = draw_scenarios(m, {100000, 31});
  const Eigen::VectorXd y = s.values.col(0).array().square();
  const auto fit = fit_linear(s, y);
  const Eigen::VectorXd xc = s.values.col(0).array() - s.values.col(0).mean();
  const double se = std::sqrt(fit.residual_variance / xc.squaredNorm());
  EXPECT_LT(std::abs(fit.betas(0)), 3.0 * se);
  // Same conclusion from the direct sample covariance.
  const double cov = xc.dot(y) / (y.size() - 1.0);
  EXPECT_LT(std::abs(cov / (xc.squaredNorm() / (y.size() - 1.0))), 3.0 * se);
  EXPECT_LT(fit.r_squared, 0.01);
}

TEST(FitLinear, AlphaFollowsMeansIdentity) {
  const auto s = random_scenarios(300, 3, 3);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.5);
  Eigen::VectorXd y(300);
  for (int r = 0; r < 300; ++r) y(r) = std::sin(s.values(r, 0)) + s.values(r, 1) * 0.3 + noise(rng);
  const auto fit = fit_linear(s, y);
  const Eigen::RowVectorXd means = s.values.colwise().mean();
  EXPECT_NEAR(fit.alpha, y.mean() - means.dot(fit.betas), 1e-12);
  const Eigen::VectorXd resid = y - (s.values * fit.betas).array().matrix() - Eigen::VectorXd::Constant(300, fit.alpha);
  const double ss_res = resid.squaredNorm();
  const double ss_tot = (y.array() - y.mean()).square().sum();
  EXPECT_NEAR(fit.r_squared, 1.0 - ss_res / ss_tot, 1e-12);
  EXPECT_NEAR(fit.residual_variance, ss_res / (300 - 3 - 1), 1e-12);
}

TEST(FitLinear, CollinearColumnsAreDegenerate) {
  auto s = random_scenarios(100, 3, 4);
  s.values.col(2) = 2.0 * s.values.col(0) - s.values.col(1);
  try {
    LeastSquares solver(s);
    FAIL();
  } catch (const DegenerateFitError& e) {
    EXPECT_EQ(e.columns(), (std::vector<std::string>{"x1", "x2", "x3"}));
    EXPECT_NE(std::string(e.what()).find("raise the sample size"), std::string::npos);
    EXPECT_EQ(e.category(), ErrorCategory::Numerical);
  }
}

TEST(FitLinear, ZeroVarianceColumnIsDegenerate) {
  auto s = random_scenarios(50, 2, 6);
  s.values.col(1).setConstant(3.0);
  try {
    fit_linear(s, s.values.col(0));
    FAIL();
  } catch (const DegenerateFitError& e) {
    EXPECT_EQ(e.columns(), (std::vector<std::string>{"x2"}));
  }
}

TEST(FitLinear, ConditionNumberOfOrthogonalDesignIsSmall) {
  const auto s = random_scenarios(10000, 4, 8);
  EXPECT_LT(LeastSquares(s).condition_number(), 1.1);
}

// Residual orthogonality, shift and scale equivariance, noise-free
// exactness: checked over randomized designs and value columns.
TEST(FitLinearProperty, Invariants) {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 5;
    const std::size_t rows = n + 2 + static_cast<std::size_t>(rng() % 300);
    const auto s = random_scenarios(rows, n, rng());
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    for (Eigen::Index r = 0; r < y.size(); ++r) y(r) = std::exp(0.3 * s.values(r, 0)) + z(rng);
    const LeastSquares solver(s);
    const auto fit = solver.fit(y);

    const Eigen::VectorXd resid = (y - s.values * fit.betas).array() - fit.alpha;
    const double scale = y.cwiseAbs().sum();
    EXPECT_LE(std::abs(resid.sum()), 1e-6 * scale);
    for (Eigen::Index i = 0; i < s.values.cols(); ++i) {
      EXPECT_LE(std::abs(resid.dot(s.values.col(i))), 1e-6 * (s.values.col(i).cwiseAbs().dot(y.cwiseAbs()) + 1.0));
    }

    const double c = 17.5;
    const auto shifted = solver.fit(y.array() + c);
    EXPECT_NEAR(shifted.alpha, fit.alpha + c, 1e-10 * (1.0 + std::abs(fit.alpha + c)));
    for (Eigen::Index i = 0; i < fit.betas.size(); ++i) EXPECT_NEAR(shifted.betas(i), fit.betas(i), 1e-10);

    const double k = -3.25;
    const auto scaled = solver.fit(k * y);
    EXPECT_NEAR(scaled.alpha, k * fit.alpha, 1e-10 * std::abs(k * fit.alpha) + 1e-12);
    for (Eigen::Index i = 0; i < fit.betas.size(); ++i) {
      EXPECT_NEAR(scaled.betas(i), k * fit.betas(i), 1e-10 * std::abs(k * fit.betas(i)) + 1e-12);
    }

    Eigen::VectorXd coef(static_cast<Eigen::Index>(n));
    for (auto& v : coef) v = z(rng);
    const auto exact = solver.fit((s.values * coef).array() + 0.75);
    EXPECT_NEAR(exact.r_squared, 1.0, 1e-12);
  }
}

TEST(StandardizedBetas, SingleVariableMatchesOls) {
  const auto s = random_scenarios(1000, 1, 9);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::VectorXd y(1000);
  for (int r = 0; r < 1000; ++r) y(r) = 2.0 * s.values(r, 0) + z(rng);
  EXPECT_NEAR(standardized_betas(s, y)(0), fit_linear(s, y).betas(0), 1e-10);
}

TEST(StandardizedBetas, IndependentPredictorsAgreeWithOls) {
  const auto m = testing::normal_model({{"a", {0, 1}}, {"b", {5, 2}}, {"c", {-1, 0.5}}},
                                       {{"d1", "3*a - 2*b + 4*c + 1"}, {"d2", "0"}});
  const auto s = draw_scenarios(m, {100000, 12});
  const auto t = evaluate_value_table(m, s);
  const auto ols = fit_linear(s, t.values.col(0));
  const auto corr = standardized_betas(s, t.values.col(0));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(corr(i), ols.betas(i), 0.02 * std::abs(ols.betas(i)));
}

TEST(StandardizedBetas, CorrelatedPredictorsDiverge) {
  // x2 = x1 + small noise, x3 independent: the pairwise-sum form ignores
  // the joint structure and drifts from OLS. Record both.
  std::mt19937_64 rng(13);
  std::normal_distribution<double> z(0.0, 1.0);
  ScenarioMatrix s;
  s.values.resize(5000, 3);
  s.variable_names = {"x1", "x2", "x3"};
  for (int r = 0; r < 5000; ++r) {
    s.values(r, 0) = z(rng);
    s.values(r, 1) = s.values(r, 0) + 0.1 * z(rng);
    s.values(r, 2) = 0.5 * s.values(r, 0) + z(rng);
  }
  const Eigen::VectorXd y = s.values.col(0) + 2.0 * s.values.col(1) - s.values.col(2);
  const auto ols = fit_linear(s, y);
  const auto corr = standardized_betas(s, y);
  EXPECT_NEAR(ols.betas(0), 1.0, 1e-8);
  const double discrepancy = (corr - ols.betas).cwiseAbs().maxCoeff();
  RecordProperty("max_abs_discrepancy", std::to_string(discrepancy));
  EXPECT_TRUE(std::isfinite(discrepancy));
}

TEST(StandardizedBetas, ZeroVarianceColumnIsAnError) {
  auto s = random_scenarios(30, 2, 1);
  s.values.col(0).setConstant(1.0);
  EXPECT_THROW(standardized_betas(s, s.values.col(1)), DegenerateFitError);
}

}  // namespace
}  // namespace evi
