#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evi/model.hpp"

namespace evi {

struct SampleConfig {
  std::size_t sample_size = 10000;
  std::uint64_t seed = 0;
};

// Counter-based random substream keyed by (seed, label). Draw k depends only
// on the key and k, so any subset of draws can be produced in any order.
class Substream {
 public:
  Substream(std::uint64_t seed, std::string_view label);

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const;
  double standard_normal(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

// N scenarios x n variables, columns in model variable order.
struct ScenarioMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> variable_names;
  std::uint64_t seed = 0;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

// Table 1 of the method: N scenarios x m decisions of payoffs.
struct ValueTable {
  Eigen::MatrixXd values;
  Eigen::VectorXd means;
  std::vector<std::string> decision_names;
  std::uint64_t seed = 0;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

struct DecisionRanking {
  std::size_t star = 0;  // d*, highest sample mean
  std::size_t plus = 1;  // d+, runner-up
  std::vector<std::size_t> order;  // all decisions, best first
  std::vector<double> sorted_means;
};

/// Throws ModelError when the sample is too small to regress on n variables
/// (N < n + 2).
void check_sample_config(const DecisionModel& model, const SampleConfig& config);

/// Draws N i.i.d. scenarios; variable i uses the substream (seed, name_i).
ScenarioMatrix draw_scenarios(const DecisionModel& model, const SampleConfig& config);

/// Evaluates every decision at every scenario. Evaluation failures are
/// rethrown as EvalError naming the scenario index and decision.
ValueTable evaluate_value_table(const DecisionModel& model, const ScenarioMatrix& scenarios);

/// Orders decisions by mean, descending; ties go to the lower index.
DecisionRanking rank_decisions(std::span<const double> means);
DecisionRanking rank_decisions(const ValueTable& table);

/// CSV dump: `scenario,<variables...>,<decisions...>` with 17 significant digits.
void write_scenario_csv(std::ostream& out, const ScenarioMatrix& scenarios, const ValueTable& table);

/// Shortest round-trip decimal rendering of a double; "nan"/"inf" spelled out.
std::string format_double(double value);
/// Fixed 17-significant-digit rendering.
std::string format_double17(double value);

}  // namespace evi
