#include "evi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "evi/error.hpp"
#include "evi/quadrature.hpp"

namespace evi {

namespace {

std::vector<Expression> bind_decisions(const std::vector<Decision>& decisions, const std::vector<std::string>& names) {
  std::vector<Expression> bound;
  for (std::size_t j = 0; j < decisions.size(); ++j) {
    try {
      bound.push_back(decisions[j].value.bind(names));
    } catch (const ModelError& e) {
      throw ModelError("decisions[" + std::to_string(j) + "].value", e.what());
    }
  }
  return bound;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// Visits every point of a tensor grid given per-axis sizes, fastest axis last.
template <typename Visit>
void for_each_index(const std::vector<std::size_t>& sizes, Visit&& visit) {
  std::vector<std::size_t> digits(sizes.size(), 0);
  if (std::any_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s == 0; })) return;
  while (true) {
    visit(digits);
    std::size_t axis = sizes.size();
    while (axis > 0) {
      --axis;
      if (++digits[axis] < sizes[axis]) break;
      digits[axis] = 0;
      if (axis == 0) return;
    }
    if (sizes.empty()) return;
  }
}

}  // namespace

void validate_discrete_model(const DiscreteModel& model) {
  if (model.decisions.size() < 2) throw ModelError("decisions", "need ≥2 decision alternatives");
  if (model.variables.empty()) throw ModelError("variables", "need >=1 state variable");
  std::set<std::string> names;
  for (std::size_t i = 0; i < model.variables.size(); ++i) {
    const auto& v = model.variables[i];
    const std::string path = "variables[" + std::to_string(i) + "]";
    if (!names.insert(v.name).second) throw ModelError(path + ".name", "duplicate variable name '" + v.name + "'");
    if (v.outcomes.empty()) throw ModelError(path + ".outcomes", "need at least one outcome");
    double total = 0.0;
    for (const auto& o : v.outcomes) {
      if (!(o.probability >= 0.0)) throw ModelError(path + ".outcomes", "probabilities must be >= 0");
      total += o.probability;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ModelError(path + ".outcomes", "probabilities must sum to 1");
  }
}

OracleEstimate discrete_tree_evpi(const DiscreteModel& model, const std::set<std::string>& observed) {
  validate_discrete_model(model);
  const std::size_t n = model.variables.size();
  const std::size_t m = model.decisions.size();

  std::vector<std::string> names;
  for (const auto& v : model.variables) names.push_back(v.name);
  for (const auto& o : observed) {
    if (std::find(names.begin(), names.end(), o) == names.end()) {
      throw ModelError("observed", "unknown variable '" + o + "'");
    }
  }
  const auto bound = bind_decisions(model.decisions, names);

  std::uint64_t leaves = 1;
  for (const auto& v : model.variables) {
    leaves *= v.outcomes.size();
    if (leaves > kMaxTreeLeaves) {
      throw ModelError("variables", "decision tree exceeds " + std::to_string(kMaxTreeLeaves) + " leaves");
    }
  }

  // Observed variables head the tree; the rollback maximizes after them.
  std::vector<std::size_t> outer_vars;
  std::vector<std::size_t> inner_vars;
  for (std::size_t i = 0; i < n; ++i) (observed.contains(names[i]) ? outer_vars : inner_vars).push_back(i);
  auto sizes_of = [&](const std::vector<std::size_t>& vars) {
    std::vector<std::size_t> sizes;
    for (auto i : vars) sizes.push_back(model.variables[i].outcomes.size());
    return sizes;
  };

  OracleEstimate est;
  est.method = "discrete-tree";
  std::vector<double> point(n, 0.0);
  std::vector<double> overall(m, 0.0);
  double informed = 0.0;

  for_each_index(sizes_of(outer_vars), [&](const std::vector<std::size_t>& od) {
    double p_outer = 1.0;
    for (std::size_t a = 0; a < outer_vars.size(); ++a) {
      const auto& o = model.variables[outer_vars[a]].outcomes[od[a]];
      point[outer_vars[a]] = o.value;
      p_outer *= o.probability;
    }
    std::vector<double> branch(m, 0.0);
    for_each_index(sizes_of(inner_vars), [&](const std::vector<std::size_t>& id) {
      double p = p_outer;
      for (std::size_t a = 0; a < inner_vars.size(); ++a) {
        const auto& o = model.variables[inner_vars[a]].outcomes[id[a]];
        point[inner_vars[a]] = o.value;
        p *= o.probability;
      }
      for (std::size_t d = 0; d < m; ++d) {
        branch[d] += p * bound[d].evaluate(point);
        ++est.cost;
      }
    });
    informed += max_of(branch);
    for (std::size_t d = 0; d < m; ++d) overall[d] += branch[d];
  });

  est.value = informed - max_of(overall);
  est.settings["leaves"] = static_cast<double>(leaves);
  est.settings["observed"] = static_cast<double>(outer_vars.size());
  return est;
}

OracleEstimate quadrature_evpi(const DecisionModel& model, const std::string& variable, int nodes) {
  const std::size_t n = model.variable_count();
  if (!model.all_priors_normal()) throw ModelError("variables", "quadrature oracle needs all-normal priors");
  if (n > 4) throw ModelError("variables", "quadrature oracle is limited to n <= 4 variables");
  if (nodes < 16) throw ModelError("nodes", "quadrature oracle needs at least 16 nodes");
  if (model.decision_count() < 2) throw ModelError("decisions", "need ≥2 decision alternatives");
  const int observed = model.variable_index(variable);
  if (observed < 0) throw ModelError("variable", "unknown variable '" + variable + "'");

  const auto names = model.variable_names();
  const auto bound = bind_decisions(model.decisions, names);
  const std::size_t m = bound.size();
  const auto k = static_cast<std::size_t>(observed);

  // Inner tensor grid sized so one pass stays around 2·10^6 points.
  const int inner_points =
      n == 1 ? 1
             : std::clamp(static_cast<int>(std::pow(2e6 / nodes, 1.0 / static_cast<double>(n - 1))), 16, 64);
  const QuadratureRule inner_rule = standard_normal_rule(inner_points);

  std::uint64_t cost = 0;
  auto evaluate = [&](int outer_points) {
    const QuadratureRule outer_rule = standard_normal_rule(outer_points);
    std::vector<std::size_t> inner_sizes(n - 1, inner_rule.nodes.size());
    std::vector<double> point(n, 0.0);
    std::vector<double> overall(m, 0.0);
    double informed = 0.0;
    for (std::size_t o = 0; o < outer_rule.nodes.size(); ++o) {
      point[k] = model.variables[k].prior.from_standard_normal(outer_rule.nodes[o]);
      std::vector<double> conditional(m, 0.0);
      for_each_index(inner_sizes, [&](const std::vector<std::size_t>& digits) {
        double w = 1.0;
        for (std::size_t a = 0, i = 0; i < n; ++i) {
          if (i == k) continue;
          point[i] = model.variables[i].prior.from_standard_normal(inner_rule.nodes[digits[a]]);
          w *= inner_rule.weights[digits[a]];
          ++a;
        }
        for (std::size_t d = 0; d < m; ++d) {
          conditional[d] += w * bound[d].evaluate(point);
          ++cost;
        }
      });
      informed += outer_rule.weights[o] * max_of(conditional);
      for (std::size_t d = 0; d < m; ++d) overall[d] += outer_rule.weights[o] * conditional[d];
    }
    return informed - max_of(overall);
  };

  OracleEstimate est;
  est.method = "quadrature";
  est.value = evaluate(nodes);
  const double refined = evaluate(2 * nodes);
  est.cost = cost;
  est.settings["nodes"] = nodes;
  est.settings["inner_nodes"] = n == 1 ? 0 : inner_points;
  est.settings["convergence"] = std::abs(refined - est.value);
  return est;
}

OracleEstimate nested_mc_evi(const DecisionModel& model, const EvidenceSpec& evidence, int outer, int inner,
                             std::uint64_t seed) {
  if (outer < 100 || inner < 100) throw ModelError("samples", "nested Monte Carlo needs outer, inner >= 100");
  const std::size_t n = model.variable_count();
  const auto names = model.variable_names();
  const auto bound = bind_decisions(model.decisions, names);
  const std::size_t m = bound.size();
  if (m < 2) throw ModelError("decisions", "need ≥2 decision alternatives");

  // rim[i] = 0 marks an unobserved variable; ∞ marks perfect information.
  std::vector<double> rim(n, 0.0);
  auto observe = [&](const std::string& name, double r, const char* field) {
    const int i = model.variable_index(name);
    if (i < 0) throw ModelError(std::string("evidence.") + field, "unknown variable '" + name + "'");
    if (!(r >= 1.0)) throw ModelError("evidence.rim", "relative information multiple must be >= 1");
    if (rim[static_cast<std::size_t>(i)] != 0.0) {
      throw ModelError(std::string("evidence.") + field, "variable '" + name + "' listed more than once");
    }
    if (model.variables[static_cast<std::size_t>(i)].prior.kind() != DistributionKind::Normal) {
      throw ModelError(std::string("evidence.") + field, "observed variable '" + name + "' must have a normal prior");
    }
    rim[static_cast<std::size_t>(i)] = r;
  };
  for (const auto& name : evidence.perfect) observe(name, std::numeric_limits<double>::infinity(), "perfect");
  for (const auto& [name, r] : evidence.partial) observe(name, r, "rim");

  OracleEstimate est;
  est.method = "nested-monte-carlo";
  est.settings["outer"] = outer;
  est.settings["inner"] = inner;
  est.settings["seed"] = static_cast<double>(seed);
  if (evidence.empty()) return est;  // nothing observed, nothing to gain

  std::vector<Substream> outer_streams;
  std::vector<Substream> inner_streams;
  for (const auto& name : names) {
    outer_streams.emplace_back(seed, "outer:" + name);
    inner_streams.emplace_back(seed, "inner:" + name);
  }

  std::vector<double> inner_means(static_cast<std::size_t>(outer) * m, 0.0);
  std::vector<double> grand(m, 0.0);
  std::vector<double> point(n, 0.0);
  std::vector<double> posterior_mean(n, 0.0);
  std::vector<double> posterior_sd(n, 0.0);

  for (int o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rim[i] == 0.0) continue;
      const auto& prior = model.variables[i].prior;
      const double resolved = std::isinf(rim[i]) ? 1.0 : (rim[i] - 1.0) / rim[i];
      posterior_mean[i] = prior.mean() + std::sqrt(prior.variance() * resolved) *
                                             outer_streams[i].standard_normal(static_cast<std::uint64_t>(o));
      posterior_sd[i] = std::isinf(rim[i]) ? 0.0 : std::sqrt(prior.variance() / rim[i]);
    }
    double* means = inner_means.data() + static_cast<std::size_t>(o) * m;
    for (int s = 0; s < inner; ++s) {
      const auto counter = static_cast<std::uint64_t>(o) * static_cast<std::uint64_t>(inner) + static_cast<std::uint64_t>(s);
      for (std::size_t i = 0; i < n; ++i) {
        if (rim[i] == 0.0) {
          point[i] = model.variables[i].prior.quantile(inner_streams[i].uniform(counter));
        } else if (posterior_sd[i] == 0.0) {
          point[i] = posterior_mean[i];
        } else {
          point[i] = posterior_mean[i] + posterior_sd[i] * inner_streams[i].standard_normal(counter);
        }
      }
      for (std::size_t d = 0; d < m; ++d) means[d] += bound[d].evaluate(point);
    }
    for (std::size_t d = 0; d < m; ++d) {
      means[d] /= inner;
      grand[d] += means[d];
    }
  }
  est.cost = static_cast<std::uint64_t>(outer) * static_cast<std::uint64_t>(inner) * m;

  // Gain per outer draw relative to the prior Bayes decision.
  const std::size_t star = argmax(grand);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int o = 0; o < outer; ++o) {
    const double* means = inner_means.data() + static_cast<std::size_t>(o) * m;
    const double gain = *std::max_element(means, means + m) - means[star];
    sum += gain;
    sum_sq += gain * gain;
  }
  est.value = sum / outer;
  const double var = std::max(0.0, (sum_sq - outer * est.value * est.value) / (outer - 1));
  est.standard_error = std::sqrt(var / outer);
  return est;
}

std::vector<AdditivityRow> additivity_report(const Analysis& analysis, const AdditivityOptions& options) {
  const auto& model = analysis.model;
  std::vector<AdditivityRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::uint64_t seed = analysis.config.seed;

  AdditivityRow total{"sum", 0.0, 0.0, 0.0};
  bool oracle_everywhere = true;
  for (std::size_t i = 0; i < model.variable_count(); ++i) {
    const auto& name = model.variables[i].name;
    const auto evidence = EvidenceSpec::perfect_on({name});
    AdditivityRow row{name, query_evi(analysis, evidence).evi, nan, nan};
    if (model.variables[i].prior.kind() == DistributionKind::Normal) {
      const auto est = nested_mc_evi(model, evidence, options.outer, options.inner, seed + 1 + i);
      row.evi_oracle = est.value;
      row.oracle_se = est.standard_error;
      total.evi_oracle += est.value;
      total.oracle_se += est.standard_error * est.standard_error;
    } else {
      oracle_everywhere = false;
    }
    total.evi_engine += row.evi_engine;
    rows.push_back(std::move(row));
  }
  total.oracle_se = std::sqrt(total.oracle_se);
  if (!oracle_everywhere) total.evi_oracle = total.oracle_se = nan;

  const auto all = EvidenceSpec::perfect_on(model.variable_names());
  AdditivityRow joint{"all", query_evi(analysis, all).evi, nan, nan};
  if (model.all_priors_normal()) {
    const auto est = nested_mc_evi(model, all, options.outer, options.inner, seed + 1 + model.variable_count());
    joint.evi_oracle = est.value;
    joint.oracle_se = est.standard_error;
  }
  rows.push_back(std::move(total));
  rows.push_back(std::move(joint));
  return rows;
}

std::vector<AdditivityRow> additivity_report(const DecisionModel& model, const SampleConfig& config,
                                             const AdditivityOptions& options) {
  return additivity_report(analyze(model, config), options);
}

void write_additivity_csv(std::ostream& out, const std::vector<AdditivityRow>& rows) {
  out << "variable,evi_engine,evi_oracle,oracle_se\n";
  for (const auto& r : rows) {
    out << r.label << ',' << format_double17(r.evi_engine) << ',' << format_double17(r.evi_oracle) << ','
        << format_double17(r.oracle_se) << '\n';
  }
}

}  // namespace evi
