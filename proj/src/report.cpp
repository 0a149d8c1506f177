#include "evi/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "evi/error.hpp"

namespace evi {

using nlohmann::ordered_json;

namespace {

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

ordered_json fit_report_json(const Analysis& analysis) {
  ordered_json out = ordered_json::array();
  for (const auto& fit : analysis.fits) {
    ordered_json betas = ordered_json::object();
    for (std::size_t i = 0; i < analysis.model.variable_count(); ++i) {
      betas[analysis.model.variables[i].name] = fit.betas(static_cast<Eigen::Index>(i));
    }
    out.push_back({{"decision", analysis.model.decisions[fit.decision].name},
                   {"alpha", fit.alpha},
                   {"betas", std::move(betas)},
                   {"r_squared", fit.r_squared},
                   {"residual_variance", fit.residual_variance}});
  }
  return out;
}

ordered_json oracle_json(const OracleEstimate& estimate) {
  ordered_json settings = ordered_json::object();
  for (const auto& [key, value] : estimate.settings) settings[key] = number_or_null(value);
  return {{"method", estimate.method},
          {"value", number_or_null(estimate.value)},
          {"standard_error", number_or_null(estimate.standard_error)},
          {"cost", estimate.cost},
          {"settings", std::move(settings)}};
}

ordered_json evi_report_json(const Analysis& analysis, const std::vector<QueryReport>& queries) {
  const auto& z = analysis.z;
  ordered_json contributions = ordered_json::object();
  for (std::size_t i = 0; i < z.variable_names.size(); ++i) contributions[z.variable_names[i]] = z.contributions[i];

  ordered_json warnings = ordered_json::array();
  for (const auto& w : analysis.warnings) warnings.push_back(w.path.empty() ? w.message : w.path + ": " + w.message);

  ordered_json rows = ordered_json::array();
  for (const auto& q : queries) {
    const auto& r = q.result;
    ordered_json row{{"evidence", r.evidence.label()},
                     {"preposterior_mean", r.preposterior.mean},
                     {"preposterior_variance", r.preposterior.variance},
                     {"evi", r.evi},
                     {"method", std::string(to_string(r.method))}};
    if (r.quadrature_check) row["quadrature_check"] = *r.quadrature_check;
    if (q.oracle) row["oracle"] = oracle_json(*q.oracle);
    rows.push_back(std::move(row));
  }

  const auto& star = analysis.star_fit();
  const auto& plus = analysis.plus_fit();
  return {{"title", analysis.model.title},
          {"value_units", analysis.model.value_units},
          {"seed", analysis.config.seed},
          {"N", analysis.config.sample_size},
          {"star", analysis.model.decisions[analysis.ranking.star].name},
          {"plus", analysis.model.decisions[analysis.ranking.plus].name},
          {"star_mean", analysis.table.means(static_cast<Eigen::Index>(analysis.ranking.star))},
          {"plus_mean", analysis.table.means(static_cast<Eigen::Index>(analysis.ranking.plus))},
          {"r_squared_star", star.r_squared},
          {"r_squared_plus", plus.r_squared},
          {"low_r_squared", analysis.low_r_squared()},
          {"mu_prime", z.mu_prime},
          {"sample_mu_prime", z.sample_mu_prime},
          {"sigma2_prime", z.sigma2_prime},
          {"contributions", std::move(contributions)},
          {"warnings", std::move(warnings)},
          {"queries", std::move(rows)}};
}

void write_plot_csv(std::ostream& out, const std::vector<EviResult>& results) {
  if (results.empty()) throw ModelError("results", "no EVI results to plot");
  std::vector<const EviResult*> sorted;
  for (const auto& r : results) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const EviResult* a, const EviResult* b) {
    if (a->evi != b->evi) return a->evi > b->evi;
    return a->evidence.label() < b->evidence.label();
  });
  out << "label,evi,preposterior_sd\n";
  for (const auto* r : sorted) {
    out << csv_field(r->evidence.label()) << ',' << format_double17(r->evi) << ','
        << format_double17(std::sqrt(r->preposterior.variance)) << '\n';
  }
}

void emit_plot_data(const std::vector<EviResult>& results, const std::filesystem::path& path) {
  std::ostringstream buf;
  write_plot_csv(buf, results);
  write_file_atomic(path, buf.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

}  // namespace evi
