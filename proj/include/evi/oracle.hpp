#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "evi/engine.hpp"
#include "evi/model.hpp"

namespace evi {

struct DiscreteOutcome {
  double value = 0.0;
  double probability = 0.0;
};

struct DiscreteVariable {
  std::string name;
  std::vector<DiscreteOutcome> outcomes;
};

// Independent discrete state variables and decision value expressions;
// the setting of an exhaustive decision-tree rollback.
struct DiscreteModel {
  std::vector<DiscreteVariable> variables;
  std::vector<Decision> decisions;
};

/// Throws ModelError unless every variable's probabilities are ≥ 0 and sum
/// to 1 within 1e-12, names are unique, and there are ≥ 2 decisions.
void validate_discrete_model(const DiscreteModel& model);

struct OracleEstimate {
  double value = 0.0;
  double standard_error = 0.0;  // 0 for exact methods
  std::string method;
  std::uint64_t cost = 0;  // value-function evaluations
  std::map<std::string, double> settings;
};

inline constexpr std::uint64_t kMaxTreeLeaves = 10'000'000;

/// Exact EVPI on the observed variables by exhaustive rollback:
/// E_obs[max_d E_unobs v] − max_d E v. Visits every leaf once per decision,
/// so cost = m·Π k_i.
OracleEstimate discrete_tree_evpi(const DiscreteModel& model, const std::set<std::string>& observed);

/// EVPI on one variable by tensor Gauss quadrature against normal priors.
/// Requires all-normal priors, n ≤ 4, nodes ≥ 16. Reports the change from
/// doubling the node count under settings["convergence"].
OracleEstimate quadrature_evpi(const DecisionModel& model, const std::string& variable, int nodes);

/// Two-level Monte Carlo EVI. The outer level draws the observed variables'
/// posterior means from N(μ, σ²(r−1)/r); the inner level samples the
/// observed variables from N(mean, σ²/r) and the rest from their priors.
OracleEstimate nested_mc_evi(const DecisionModel& model, const EvidenceSpec& evidence, int outer, int inner,
                             std::uint64_t seed);

struct AdditivityRow {
  std::string label;
  double evi_engine = 0.0;
  double evi_oracle = 0.0;  // NaN when the oracle does not apply
  double oracle_se = 0.0;
};

struct AdditivityOptions {
  int outer = 500;
  int inner = 200;
};

/// EVI on each variable alone, their sum, and EVI on all variables jointly,
/// from the engine with nested Monte Carlo cross-checks. Rows: n + 2.
std::vector<AdditivityRow> additivity_report(const DecisionModel& model, const SampleConfig& config,
                                             const AdditivityOptions& options = {});
std::vector<AdditivityRow> additivity_report(const Analysis& analysis, const AdditivityOptions& options = {});

void write_additivity_csv(std::ostream& out, const std::vector<AdditivityRow>& rows);

}  // namespace evi
