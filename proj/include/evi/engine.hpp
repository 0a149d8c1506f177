#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evi/model.hpp"
#include "evi/regression.hpp"
#include "evi/sampling.hpp"

namespace evi {

// Linear-normal model of z = v(X, d*) − v(X, d+).
struct ZModel {
  std::vector<std::string> variable_names;
  double mu_prime = 0.0;      // prior mean of z from the fitted coefficients
  double sigma2_prime = 0.0;  // prior variance of z, Σ contributions
  std::vector<double> contributions;  // (β*_i − β+_i)² σ'²_i
  std::vector<double> beta_diff;      // β*_i − β+_i
  double delta_alpha = 0.0;           // α* − α+
  double sample_mu_prime = 0.0;       // direct sample mean of z
  double sample_mu_se = 0.0;          // its standard error

  int variable_index(std::string_view name) const;
};

// Contemplated evidence: perfect information on some variables and partial
// information, as a relative information multiple r ≥ 1, on others.
struct EvidenceSpec {
  std::vector<std::string> perfect;
  std::vector<std::pair<std::string, double>> partial;

  bool empty() const { return perfect.empty() && partial.empty(); }
  /// Canonical query text, e.g. "perfect:a,b;rim:c=2".
  std::string label() const;

  static EvidenceSpec perfect_on(std::vector<std::string> names);
};

/// Parses `perfect:v1,v2`, `rim:v1=2,v3=10`, or both joined by `;`.
/// The empty string and "none" mean no evidence. Throws ModelError.
EvidenceSpec parse_evidence(std::string_view text);

// Normal prior on the posterior mean of z.
struct PreposteriorDensity {
  double mean = 0.0;
  double variance = 0.0;
};

enum class LossMethod { ClosedForm, Quadrature };
std::string_view to_string(LossMethod method);

struct EviResult {
  double evi = 0.0;
  EvidenceSpec evidence;
  PreposteriorDensity preposterior;
  std::string star;
  std::string plus;
  LossMethod method = LossMethod::ClosedForm;
  std::optional<double> quadrature_check;
  std::uint64_t seed = 0;
  std::size_t sample_size = 0;
};

ZModel build_z_model(const LinearFit& fit_star, const LinearFit& fit_plus, const DecisionModel& model,
                     const ValueTable& table);

/// Unified preposterior variance for any mix of perfect and partial
/// evidence: Σ_{perfect} c_j + Σ_{partial} (r_i − 1)/r_i · c_i. The mean is
/// always mu_prime. Throws ModelError on unknown names, r < 1, or a variable
/// listed as both perfect and partial.
PreposteriorDensity preposterior_variance(const ZModel& z, const EvidenceSpec& evidence);

/// Expected posterior variance of z after the evidence, computed directly
/// from what each variable leaves unresolved: c_i for unobserved variables,
/// c_i / r_i for partial ones, 0 for perfect ones.
double posterior_variance(const ZModel& z, const EvidenceSpec& evidence);

/// Linear loss integral ∫_{−∞}^0 |t| N(t; mean, variance) dt, closed form.
double normal_loss(double mean, double variance);

/// The same integral by composite Simpson over [mean − 12 sd, min(0, mean + 12 sd)].
/// Requires panels ≥ 16 and variance > 0.
double normal_loss_quadrature(double mean, double variance, int panels);

inline constexpr double kLowRSquared = 0.9;

// The sample → value table → ranking → fit → z-model stage, computed once
// and shared by every EVI query on the same model and sample.
struct Analysis {
  DecisionModel model;
  SampleConfig config;
  ScenarioMatrix scenarios;
  ValueTable table;
  DecisionRanking ranking;
  std::vector<LinearFit> fits;
  ZModel z;
  std::vector<Diagnostic> warnings;

  const LinearFit& star_fit() const { return fits[ranking.star]; }
  const LinearFit& plus_fit() const { return fits[ranking.plus]; }
  bool low_r_squared() const;
};

/// Throws ModelError for invalid models and DegenerateFitError when the
/// scenarios cannot support the regression.
Analysis analyze(const DecisionModel& model, const SampleConfig& config);

struct QueryOptions {
  LossMethod method = LossMethod::ClosedForm;
  bool quadrature_check = false;
  int quadrature_panels = 4096;
};

EviResult query_evi(const Analysis& analysis, const EvidenceSpec& evidence, const QueryOptions& options = {});

EviResult estimate_evi(const DecisionModel& model, const SampleConfig& config, const EvidenceSpec& evidence,
                       const QueryOptions& options = {});

struct EmpiricalEvpi {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Sample form of the general EVPI: mean over scenarios of
/// max(0, v_plus − v_star). No normality assumption.
EmpiricalEvpi empirical_evpi(const ValueTable& table, const DecisionRanking& ranking);

}  // namespace evi
