#include "evi/distribution.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

#include "evi/error.hpp"

namespace evi {

std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::Normal:
      return "normal";
    case DistributionKind::Uniform:
      return "uniform";
    case DistributionKind::Lognormal:
      return "lognormal";
  }
  return "unknown";
}

Distribution Distribution::normal(double mean, double sd) {
  if (!std::isfinite(mean)) throw ModelError("mean", "must be finite");
  if (!(sd > 0.0) || !std::isfinite(sd)) throw ModelError("sd", "must be finite and > 0");
  return {DistributionKind::Normal, mean, sd};
}

Distribution Distribution::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw ModelError("lo", "bounds must be finite");
  if (!(hi > lo)) throw ModelError("hi", "must be > lo");
  return {DistributionKind::Uniform, lo, hi};
}

Distribution Distribution::lognormal(double median, double gsd) {
  if (!(median > 0.0) || !std::isfinite(median)) throw ModelError("median", "must be finite and > 0");
  if (!(gsd > 1.0) || !std::isfinite(gsd)) throw ModelError("gsd", "must be finite and > 1");
  return {DistributionKind::Lognormal, median, gsd};
}

double Distribution::mean() const {
  switch (kind_) {
    case DistributionKind::Normal:
      return a_;
    case DistributionKind::Uniform:
      return 0.5 * (a_ + b_);
    case DistributionKind::Lognormal: {
      const double s = std::log(b_);
      return a_ * std::exp(0.5 * s * s);
    }
  }
  return 0.0;
}

double Distribution::variance() const {
  switch (kind_) {
    case DistributionKind::Normal:
      return b_ * b_;
    case DistributionKind::Uniform:
      return (b_ - a_) * (b_ - a_) / 12.0;
    case DistributionKind::Lognormal: {
      const double s2 = std::log(b_) * std::log(b_);
      return std::expm1(s2) * a_ * a_ * std::exp(s2);
    }
  }
  return 0.0;
}

double Distribution::sd() const { return std::sqrt(variance()); }

double Distribution::from_standard_normal(double z) const {
  switch (kind_) {
    case DistributionKind::Normal:
      return a_ + b_ * z;
    case DistributionKind::Uniform:
      return a_ + (b_ - a_) * standard_normal_cdf(z);
    case DistributionKind::Lognormal:
      return a_ * std::exp(std::log(b_) * z);
  }
  return 0.0;
}

double Distribution::quantile(double u) const {
  if (kind_ == DistributionKind::Uniform) return a_ + (b_ - a_) * u;
  return from_standard_normal(standard_normal_quantile(u));
}

double standard_normal_quantile(double u) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

double standard_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace evi
