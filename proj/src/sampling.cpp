#include "evi/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "evi/error.hpp"

namespace evi {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

Substream::Substream(std::uint64_t seed, std::string_view label)
    : key_(mix64(mix64(seed + kGolden) ^ fnv1a(label))) {}

std::uint64_t Substream::bits(std::uint64_t counter) const {
  // SplitMix64 output function evaluated at position `counter` of the stream.
  return mix64(key_ + (counter + 1) * kGolden);
}

double Substream::uniform(std::uint64_t counter) const {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double Substream::standard_normal(std::uint64_t counter) const {
  return standard_normal_quantile(uniform(counter));
}

void check_sample_config(const DecisionModel& model, const SampleConfig& config) {
  const std::size_t n = model.variable_count();
  if (config.sample_size < n + 2) {
    throw ModelError("samples", "sample size " + std::to_string(config.sample_size) +
                                    " too small for " + std::to_string(n) +
                                    " variables (need >= " + std::to_string(n + 2) + ")");
  }
}

ScenarioMatrix draw_scenarios(const DecisionModel& model, const SampleConfig& config) {
  check_sample_config(model, config);
  const auto n = static_cast<Eigen::Index>(model.variable_count());
  const auto rows = static_cast<Eigen::Index>(config.sample_size);

  ScenarioMatrix out;
  out.values.resize(rows, n);
  out.variable_names = model.variable_names();
  out.seed = config.seed;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& var = model.variables[static_cast<std::size_t>(i)];
    const Substream stream(config.seed, var.name);
    for (Eigen::Index s = 0; s < rows; ++s) {
      out.values(s, i) = var.prior.quantile(stream.uniform(static_cast<std::uint64_t>(s)));
    }
  }
  return out;
}

ValueTable evaluate_value_table(const DecisionModel& model, const ScenarioMatrix& scenarios) {
  if (scenarios.variable_names != model.variable_names()) {
    throw ModelError("scenarios", "scenario columns do not match model variables");
  }
  const auto rows = scenarios.values.rows();
  const auto m = static_cast<Eigen::Index>(model.decision_count());

  ValueTable table;
  table.values.resize(rows, m);
  table.seed = scenarios.seed;
  for (const auto& d : model.decisions) table.decision_names.push_back(d.name);

  // Row-major copy so each scenario is a contiguous span.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x = scenarios.values;
  std::vector<Expression> bound;
  const auto names = model.variable_names();
  for (const auto& d : model.decisions) bound.push_back(d.value.is_bound() ? d.value : d.value.bind(names));

  for (Eigen::Index s = 0; s < rows; ++s) {
    const std::span<const double> row(x.data() + s * x.cols(), static_cast<std::size_t>(x.cols()));
    for (Eigen::Index j = 0; j < m; ++j) {
      try {
        table.values(s, j) = bound[static_cast<std::size_t>(j)].evaluate(row);
      } catch (const EvalError& e) {
        throw EvalError(e.kind(), "scenario " + std::to_string(s) + ", decision '" +
                                      model.decisions[static_cast<std::size_t>(j)].name +
                                      "': " + e.what());
      }
    }
  }
  table.means = table.values.colwise().mean().transpose();
  return table;
}

DecisionRanking rank_decisions(std::span<const double> means) {
  if (means.size() < 2) throw ModelError("decisions", "need ≥2 decision alternatives");
  DecisionRanking r;
  r.order.resize(means.size());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t a, std::size_t b) { return means[a] > means[b]; });
  r.star = r.order[0];
  r.plus = r.order[1];
  for (auto i : r.order) r.sorted_means.push_back(means[i]);
  return r;
}

DecisionRanking rank_decisions(const ValueTable& table) {
  return rank_decisions(std::span<const double>(table.means.data(), table.cols()));
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string format_double17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_scenario_csv(std::ostream& out, const ScenarioMatrix& scenarios, const ValueTable& table) {
  out << "scenario";
  for (const auto& v : scenarios.variable_names) out << ',' << v;
  for (const auto& d : table.decision_names) out << ',' << d;
  out << '\n';
  for (Eigen::Index s = 0; s < scenarios.values.rows(); ++s) {
    out << s;
    for (Eigen::Index i = 0; i < scenarios.values.cols(); ++i) out << ',' << format_double17(scenarios.values(s, i));
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) out << ',' << format_double17(table.values(s, j));
    out << '\n';
  }
}

}  // namespace evi
