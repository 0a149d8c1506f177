#include "evi/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evi/error.hpp"

namespace evi {

namespace {

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

}  // namespace

LeastSquares::LeastSquares(const ScenarioMatrix& scenarios) {
  const auto& x = scenarios.values;
  const auto n = x.cols();
  if (x.rows() < n + 2) {
    throw DegenerateFitError({}, "need at least n + 2 scenarios to fit " + std::to_string(n) +
                                     " variables; raise the sample size");
  }
  means_ = x.colwise().mean();
  centered_ = x.rowwise() - means_;
  scale_ = centered_.colwise().norm().transpose();

  std::vector<std::string> flat;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(scale_(i) > 0.0)) flat.push_back(scenarios.variable_names[static_cast<std::size_t>(i)]);
  }
  if (!flat.empty()) {
    throw DegenerateFitError(flat, "zero-variance column(s): " + join(flat) + "; raise the sample size");
  }

  qr_.compute(centered_ * scale_.cwiseInverse().asDiagonal());
  const Eigen::MatrixXd r = qr_.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smin = sv(n - 1);
  condition_ = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();

  if (!(condition_ <= kMaxConditionNumber)) {
    // Columns loading on the weakest direction are the collinear ones.
    const Eigen::VectorXd weakest = svd.matrixV().col(n - 1);
    std::vector<std::string> culprits;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(weakest(i)) >= 0.1) culprits.push_back(scenarios.variable_names[static_cast<std::size_t>(i)]);
    }
    throw DegenerateFitError(culprits, "design matrix is ill-conditioned (condition number " +
                                           std::to_string(condition_) + "); collinear columns: " +
                                           join(culprits) + "; raise the sample size");
  }
}

LinearFit LeastSquares::fit(const Eigen::Ref<const Eigen::VectorXd>& values, std::size_t decision) const {
  const auto rows = centered_.rows();
  const auto n = centered_.cols();
  if (values.size() != rows) throw ModelError("values", "value column length does not match scenarios");

  const double y_mean = values.mean();
  const Eigen::VectorXd yc = values.array() - y_mean;

  Eigen::VectorXd qty = qr_.householderQ().transpose() * yc;
  const Eigen::VectorXd scaled =
      qr_.matrixQR().topLeftCorner(n, n).triangularView<Eigen::Upper>().solve(qty.head(n));

  LinearFit fit;
  fit.decision = decision;
  fit.betas = scaled.cwiseQuotient(scale_);
  fit.alpha = y_mean - means_.dot(fit.betas);

  const Eigen::VectorXd residuals = yc - centered_ * fit.betas;
  const double ss_res = residuals.squaredNorm();
  const double ss_tot = yc.squaredNorm();
  // A constant column has nothing to explain; ss_tot is then pure rounding.
  const bool constant = values.maxCoeff() == values.minCoeff();
  fit.r_squared = constant ? 1.0 : std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  fit.residual_variance = ss_res / static_cast<double>(rows - n - 1);
  return fit;
}

LinearFit fit_linear(const ScenarioMatrix& scenarios, const Eigen::Ref<const Eigen::VectorXd>& values,
                     std::size_t decision) {
  return LeastSquares(scenarios).fit(values, decision);
}

std::vector<LinearFit> fit_all(const ScenarioMatrix& scenarios, const ValueTable& table) {
  const LeastSquares solver(scenarios);
  std::vector<LinearFit> fits;
  for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
    fits.push_back(solver.fit(table.values.col(j), static_cast<std::size_t>(j)));
  }
  return fits;
}

Eigen::VectorXd standardized_betas(const ScenarioMatrix& scenarios,
                                   const Eigen::Ref<const Eigen::VectorXd>& values) {
  const auto& x = scenarios.values;
  const auto n = x.cols();
  if (values.size() != x.rows()) throw ModelError("values", "value column length does not match scenarios");

  const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
  const Eigen::VectorXd yc = values.array() - values.mean();
  const Eigen::VectorXd sx = xc.colwise().norm().transpose();
  const double sy = yc.norm();

  std::vector<std::string> flat;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(sx(i) > 0.0)) flat.push_back(scenarios.variable_names[static_cast<std::size_t>(i)]);
  }
  if (!flat.empty()) throw DegenerateFitError(flat, "zero-variance column(s): " + join(flat));
  if (!(sy > 0.0)) return Eigen::VectorXd::Zero(n);

  // Sample correlations; the common 1/(N-1) factors cancel.
  const Eigen::VectorXd r_y = (xc.transpose() * yc).cwiseQuotient(sx) / sy;
  const Eigen::MatrixXd r_x =
      sx.cwiseInverse().asDiagonal() * (xc.transpose() * xc) * sx.cwiseInverse().asDiagonal();

  Eigen::VectorXd betas(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double num = r_y(j);
    double den = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == j) continue;
      num -= r_y(k) * r_x(j, k);
      den -= r_x(j, k) * r_x(j, k);
    }
    betas(j) = num / den * sy / sx(j);
  }
  return betas;
}

}  // namespace evi
