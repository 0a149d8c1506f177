#include "evi/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "evi/error.hpp"

namespace evi {

namespace {

// (r − 1)/r, with r = ∞ meaning perfect information.
double resolved_fraction(double rim) { return std::isinf(rim) ? 1.0 : (rim - 1.0) / rim; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

// Indices of the evidence variables with the fraction of their variance
// contribution that the evidence resolves.
std::vector<std::pair<std::size_t, double>> resolve(const ZModel& z, const EvidenceSpec& evidence) {
  std::vector<std::pair<std::size_t, double>> out;
  std::set<std::string, std::less<>> seen;
  auto lookup = [&](const std::string& name, const char* field) {
    const int i = z.variable_index(name);
    if (i < 0) throw ModelError(std::string("evidence.") + field, "unknown variable '" + name + "'");
    if (!seen.insert(name).second) {
      throw ModelError(std::string("evidence.") + field, "variable '" + name + "' listed more than once");
    }
    return static_cast<std::size_t>(i);
  };
  for (const auto& name : evidence.perfect) out.emplace_back(lookup(name, "perfect"), 1.0);
  for (const auto& [name, rim] : evidence.partial) {
    if (!(rim >= 1.0)) {
      throw ModelError("evidence.rim", "relative information multiple for '" + name + "' must be >= 1");
    }
    out.emplace_back(lookup(name, "rim"), resolved_fraction(rim));
  }
  return out;
}

}  // namespace

int ZModel::variable_index(std::string_view name) const {
  const auto it = std::find(variable_names.begin(), variable_names.end(), name);
  return it == variable_names.end() ? -1 : static_cast<int>(it - variable_names.begin());
}

std::string EvidenceSpec::label() const {
  if (empty()) return "none";
  std::string out;
  if (!perfect.empty()) {
    out += "perfect:";
    for (std::size_t i = 0; i < perfect.size(); ++i) out += (i ? "," : "") + perfect[i];
  }
  if (!partial.empty()) {
    if (!out.empty()) out += ';';
    out += "rim:";
    for (std::size_t i = 0; i < partial.size(); ++i) {
      out += (i ? "," : "") + partial[i].first + "=" + format_double(partial[i].second);
    }
  }
  return out;
}

EvidenceSpec EvidenceSpec::perfect_on(std::vector<std::string> names) {
  EvidenceSpec e;
  e.perfect = std::move(names);
  return e;
}

EvidenceSpec parse_evidence(std::string_view text) {
  EvidenceSpec spec;
  text = trim(text);
  if (text.empty() || text == "none") return spec;
  for (auto clause : split(text, ';')) {
    const auto colon = clause.find(':');
    if (colon == std::string_view::npos) {
      throw ModelError("evidence", "clause '" + std::string(clause) + "' lacks a 'perfect:' or 'rim:' prefix");
    }
    const auto kind = trim(clause.substr(0, colon));
    const auto body = clause.substr(colon + 1);
    if (kind == "perfect") {
      for (auto name : split(body, ',')) {
        if (!is_identifier(name)) throw ModelError("evidence.perfect", "bad variable name '" + std::string(name) + "'");
        spec.perfect.emplace_back(name);
      }
    } else if (kind == "rim") {
      for (auto item : split(body, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
          throw ModelError("evidence.rim", "expected name=multiple, got '" + std::string(item) + "'");
        }
        const auto name = trim(item.substr(0, eq));
        const auto number = trim(item.substr(eq + 1));
        if (!is_identifier(name)) throw ModelError("evidence.rim", "bad variable name '" + std::string(name) + "'");
        double rim = 0.0;
        auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), rim);
        if (ec != std::errc() || ptr != number.data() + number.size() || std::isnan(rim)) {
          throw ModelError("evidence.rim", "bad multiple '" + std::string(number) + "'");
        }
        if (!(rim >= 1.0)) throw ModelError("evidence.rim", "relative information multiple must be >= 1");
        spec.partial.emplace_back(std::string(name), rim);
      }
    } else {
      throw ModelError("evidence", "unknown evidence kind '" + std::string(kind) + "'");
    }
  }
  return spec;
}

std::string_view to_string(LossMethod method) {
  return method == LossMethod::ClosedForm ? "closed-form" : "quadrature";
}

ZModel build_z_model(const LinearFit& fit_star, const LinearFit& fit_plus, const DecisionModel& model,
                     const ValueTable& table) {
  const auto n = model.variable_count();
  if (static_cast<std::size_t>(fit_star.betas.size()) != n || static_cast<std::size_t>(fit_plus.betas.size()) != n) {
    throw ModelError("fits", "coefficient count does not match the model's variables");
  }
  if (fit_star.decision == fit_plus.decision) throw ModelError("fits", "d* and d+ must be distinct decisions");
  if (fit_star.decision >= table.cols() || fit_plus.decision >= table.cols()) {
    throw ModelError("fits", "decision index outside the value table");
  }

  ZModel z;
  z.variable_names = model.variable_names();
  z.delta_alpha = fit_star.alpha - fit_plus.alpha;
  z.mu_prime = z.delta_alpha;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& prior = model.variables[i].prior;
    const double diff = fit_star.betas(static_cast<Eigen::Index>(i)) - fit_plus.betas(static_cast<Eigen::Index>(i));
    z.beta_diff.push_back(diff);
    z.contributions.push_back(diff * diff * prior.variance());
    z.mu_prime += diff * prior.mean();
  }
  for (double c : z.contributions) z.sigma2_prime += c;

  const Eigen::VectorXd samples =
      table.values.col(static_cast<Eigen::Index>(fit_star.decision)) - table.values.col(static_cast<Eigen::Index>(fit_plus.decision));
  const auto rows = static_cast<double>(samples.size());
  z.sample_mu_prime = samples.mean();
  const double var = rows > 1 ? (samples.array() - z.sample_mu_prime).square().sum() / (rows - 1) : 0.0;
  z.sample_mu_se = std::sqrt(var / rows);
  return z;
}

PreposteriorDensity preposterior_variance(const ZModel& z, const EvidenceSpec& evidence) {
  PreposteriorDensity d;
  d.mean = z.mu_prime;
  for (const auto& [i, fraction] : resolve(z, evidence)) d.variance += fraction * z.contributions[i];
  return d;
}

double posterior_variance(const ZModel& z, const EvidenceSpec& evidence) {
  std::vector<double> remaining = z.contributions;
  for (const auto& name : evidence.perfect) {
    const int i = z.variable_index(name);
    if (i < 0) throw ModelError("evidence.perfect", "unknown variable '" + name + "'");
    remaining[static_cast<std::size_t>(i)] = 0.0;
  }
  for (const auto& [name, rim] : evidence.partial) {
    const int i = z.variable_index(name);
    if (i < 0) throw ModelError("evidence.rim", "unknown variable '" + name + "'");
    if (!(rim >= 1.0)) throw ModelError("evidence.rim", "relative information multiple must be >= 1");
    remaining[static_cast<std::size_t>(i)] /= rim;
  }
  double total = 0.0;
  for (double r : remaining) total += r;
  return total;
}

double normal_loss(double mean, double variance) {
  if (!(variance >= 0.0)) throw ModelError("variance", "must be >= 0");
  if (variance == 0.0) return std::max(0.0, -mean);
  const double s = std::sqrt(variance);
  const double t = mean / s;
  return std::max(0.0, s * standard_normal_pdf(t) - mean * standard_normal_cdf(-t));
}

double normal_loss_quadrature(double mean, double variance, int panels) {
  if (panels < 16) throw ModelError("panels", "need at least 16 panels");
  if (!(variance > 0.0)) throw ModelError("variance", "must be > 0 for quadrature");
  const double s = std::sqrt(variance);
  const double a = mean - 12.0 * s;
  const double b = std::min(0.0, mean + 12.0 * s);
  if (!(b > a)) return 0.0;

  auto f = [&](double t) { return -t * standard_normal_pdf((t - mean) / s) / s; };
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h;
    sum += f(lo) + 4.0 * f(lo + 0.5 * h) + f(lo + h);
  }
  return sum * h / 6.0;
}

bool Analysis::low_r_squared() const {
  return star_fit().r_squared < kLowRSquared || plus_fit().r_squared < kLowRSquared;
}

Analysis analyze(const DecisionModel& model, const SampleConfig& config) {
  Analysis a;
  for (auto& d : validate_model(model)) {
    if (d.is_error()) throw ModelError(d.path, d.message);
    a.warnings.push_back(std::move(d));
  }
  a.model = bind_model(model);
  a.config = config;
  a.scenarios = draw_scenarios(a.model, config);
  a.table = evaluate_value_table(a.model, a.scenarios);
  a.ranking = rank_decisions(a.table);
  a.fits = fit_all(a.scenarios, a.table);
  a.z = build_z_model(a.star_fit(), a.plus_fit(), a.model, a.table);

  for (const std::size_t j : {a.ranking.star, a.ranking.plus}) {
    const double r2 = a.fits[j].r_squared;
    if (r2 < kLowRSquared) {
      a.warnings.push_back({Diagnostic::Severity::Warning, "decisions[" + std::to_string(j) + "]",
                            "low R² " + format_double(r2) + " < 0.9 for '" + a.model.decisions[j].name +
                                "': the linear value model is a poor fit and EVI is approximate"});
    }
  }
  const double gap = std::abs(a.z.mu_prime - a.z.sample_mu_prime);
  if (gap > 2.0 * a.z.sample_mu_se) {
    a.warnings.push_back({Diagnostic::Severity::Warning, "z",
                          "regression mean of z (" + format_double(a.z.mu_prime) +
                              ") differs from its sample mean (" + format_double(a.z.sample_mu_prime) +
                              ") by more than 2 standard errors"});
  }
  return a;
}

EviResult query_evi(const Analysis& analysis, const EvidenceSpec& evidence, const QueryOptions& options) {
  EviResult r;
  r.evidence = evidence;
  r.preposterior = preposterior_variance(analysis.z, evidence);
  r.star = analysis.model.decisions[analysis.ranking.star].name;
  r.plus = analysis.model.decisions[analysis.ranking.plus].name;
  r.method = options.method;
  r.seed = analysis.config.seed;
  r.sample_size = analysis.config.sample_size;

  const double mean = r.preposterior.mean;
  const double var = r.preposterior.variance;
  auto quadrature = [&] {
    return var > 0.0 ? normal_loss_quadrature(mean, var, options.quadrature_panels) : normal_loss(mean, 0.0);
  };
  r.evi = options.method == LossMethod::ClosedForm ? normal_loss(mean, var) : quadrature();
  if (options.quadrature_check) r.quadrature_check = quadrature();
  return r;
}

EviResult estimate_evi(const DecisionModel& model, const SampleConfig& config, const EvidenceSpec& evidence,
                       const QueryOptions& options) {
  return query_evi(analyze(model, config), evidence, options);
}

EmpiricalEvpi empirical_evpi(const ValueTable& table, const DecisionRanking& ranking) {
  const auto star = static_cast<Eigen::Index>(ranking.star);
  const auto plus = static_cast<Eigen::Index>(ranking.plus);
  const Eigen::ArrayXd gain = (table.values.col(plus) - table.values.col(star)).array().max(0.0);
  EmpiricalEvpi out;
  const auto rows = static_cast<double>(gain.size());
  if (rows == 0) return out;
  out.value = gain.mean();
  if (rows > 1) {
    out.standard_error = std::sqrt((gain - out.value).square().sum() / (rows - 1) / rows);
  }
  return out;
}

}  // namespace evi
