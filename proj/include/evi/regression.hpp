#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "evi/sampling.hpp"

namespace evi {

// Linear metamodel v(X, d_j) ≈ Σ_i betas[i]·x_i + alpha for one decision.
struct LinearFit {
  std::size_t decision = 0;
  Eigen::VectorXd betas;
  double alpha = 0.0;
  double r_squared = 0.0;
  double residual_variance = 0.0;
};

/// Condition numbers above this make the fit a DegenerateFitError.
inline constexpr double kMaxConditionNumber = 1e10;

// Ordinary least squares with intercept, via Householder QR of the centered,
// column-scaled design matrix. Factor once per scenario set and fit any
// number of value columns against it.
class LeastSquares {
 public:
  /// Throws DegenerateFitError naming zero-variance or collinear columns.
  explicit LeastSquares(const ScenarioMatrix& scenarios);

  LinearFit fit(const Eigen::Ref<const Eigen::VectorXd>& values, std::size_t decision = 0) const;

  /// 2-norm condition number of the centered, unit-column-scaled design.
  double condition_number() const { return condition_; }

 private:
  Eigen::MatrixXd centered_;
  Eigen::RowVectorXd means_;
  Eigen::VectorXd scale_;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
  double condition_ = 1.0;
};

LinearFit fit_linear(const ScenarioMatrix& scenarios, const Eigen::Ref<const Eigen::VectorXd>& values,
                     std::size_t decision = 0);

/// Fits every column of the value table against one factorization.
std::vector<LinearFit> fit_all(const ScenarioMatrix& scenarios, const ValueTable& table);

/// Correlation-form regression coefficients, in raw units:
///   beta_j = (R_yj − Σ_{k≠j} R_yk r_jk) / (1 − Σ_{k≠j} r_jk²) · s_y / s_j
/// with R the value/variable and r the variable/variable sample correlations.
/// Exact OLS for n ≤ 2 and for mutually uncorrelated predictors; biased
/// otherwise. Throws DegenerateFitError on a zero-variance variable.
Eigen::VectorXd standardized_betas(const ScenarioMatrix& scenarios,
                                   const Eigen::Ref<const Eigen::VectorXd>& values);

}  // namespace evi
