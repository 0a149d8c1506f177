#pragma once

#include <string>
#include <string_view>

namespace evi {

enum class DistributionKind { Normal, Uniform, Lognormal };

std::string_view to_string(DistributionKind kind);

// Prior on one state variable. Construct through the named factories, which
// reject illegal parameters with ModelError.
class Distribution {
 public:
  static Distribution normal(double mean, double sd);
  static Distribution uniform(double lo, double hi);
  /// Lognormal parameterized by its median and geometric standard deviation.
  static Distribution lognormal(double median, double gsd);

  DistributionKind kind() const noexcept { return kind_; }
  double first() const noexcept { return a_; }
  double second() const noexcept { return b_; }

  double mean() const;
  double variance() const;
  double sd() const;

  /// Maps a standard normal deviate through the prior's quantile function.
  /// Monotone in `standard_normal`.
  double from_standard_normal(double standard_normal) const;
  /// Maps u in (0,1) through the prior's quantile function.
  double quantile(double u) const;

  bool operator==(const Distribution&) const = default;

 private:
  Distribution(DistributionKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  DistributionKind kind_;
  double a_;
  double b_;
};

/// Standard normal quantile, accurate to full double precision.
double standard_normal_quantile(double u);
double standard_normal_pdf(double x);
double standard_normal_cdf(double x);

}  // namespace evi
