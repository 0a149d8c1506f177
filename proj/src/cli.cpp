#include "evi/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "evi/engine.hpp"
#include "evi/error.hpp"
#include "evi/oracle.hpp"
#include "evi/report.hpp"

namespace evi::cli {

namespace {

constexpr int kOracleOuter = 500;
constexpr int kOracleInner = 200;
constexpr int kOracleNodes = 1024;

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Validation:
      return kExitValidation;
    case ErrorCategory::Numerical:
      return kExitNumerical;
    case ErrorCategory::Io:
      return kExitIo;
  }
  return kExitValidation;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::optional<OracleEstimate> oracle_for(const Analysis& analysis, const EvidenceSpec& evidence, std::uint64_t seed) {
  const auto& model = analysis.model;
  const bool single_perfect = evidence.perfect.size() == 1 && evidence.partial.empty();
  if (single_perfect && model.all_priors_normal() && model.variable_count() <= 4) {
    return quadrature_evpi(model, evidence.perfect.front(), kOracleNodes);
  }
  auto normal = [&](const std::string& name) {
    return model.variables[static_cast<std::size_t>(model.variable_index(name))].prior.kind() ==
           DistributionKind::Normal;
  };
  for (const auto& name : evidence.perfect) {
    if (!normal(name)) return std::nullopt;
  }
  for (const auto& [name, r] : evidence.partial) {
    if (!normal(name)) return std::nullopt;
  }
  return nested_mc_evi(model, evidence, kOracleOuter, kOracleInner, seed);
}

void print_table(std::ostream& out, const Analysis& analysis, const std::vector<QueryReport>& queries) {
  const auto& model = analysis.model;
  const auto& units = model.value_units;
  out << model.title << "  (N=" << analysis.config.sample_size << ", seed=" << analysis.config.seed << ")\n";
  out << "d* = " << model.decisions[analysis.ranking.star].name << "  mean "
      << fixed(analysis.table.means(static_cast<Eigen::Index>(analysis.ranking.star)), 4) << " " << units
      << "  R^2 " << fixed(analysis.star_fit().r_squared, 4) << "\n";
  out << "d+ = " << model.decisions[analysis.ranking.plus].name << "  mean "
      << fixed(analysis.table.means(static_cast<Eigen::Index>(analysis.ranking.plus)), 4) << " " << units
      << "  R^2 " << fixed(analysis.plus_fit().r_squared, 4) << "\n";
  out << "mu'_z = " << fixed(analysis.z.mu_prime, 6) << "  sigma'^2_z = " << fixed(analysis.z.sigma2_prime, 6)
      << "\n\n";

  std::vector<const QueryReport*> ranked;
  for (const auto& q : queries) ranked.push_back(&q);
  std::stable_sort(ranked.begin(), ranked.end(), [](const QueryReport* a, const QueryReport* b) {
    if (a->result.evi != b->result.evi) return a->result.evi > b->result.evi;
    return a->result.evidence.label() < b->result.evidence.label();
  });

  std::size_t width = 8;
  for (const auto* q : ranked) width = std::max(width, q->result.evidence.label().size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  out << pad("rank", 6) << pad("evidence", width + 2) << pad("EVI (" + units + ")", 16) << "prepost sd";
  const bool with_oracle = std::any_of(ranked.begin(), ranked.end(), [](const QueryReport* q) { return q->oracle.has_value(); });
  if (with_oracle) out << "    oracle (se)";
  out << "\n";
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    const auto& r = ranked[k]->result;
    out << pad(std::to_string(k + 1), 6) << pad(r.evidence.label(), width + 2) << pad(fixed(r.evi, 6), 16)
        << fixed(std::sqrt(r.preposterior.variance), 6);
    if (ranked[k]->oracle) {
      out << "    " << fixed(ranked[k]->oracle->value, 6) << " (" << fixed(ranked[k]->oracle->standard_error, 6)
          << ")";
    }
    out << "\n";
  }
  for (const auto& w : analysis.warnings) out << "warning: " << w.path << ": " << w.message << "\n";
}

}  // namespace

int run_report(const RunArgs& args, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  try {
    const DecisionModel model = load_model(args.model_path);
    const SampleConfig config{args.samples, args.seed};

    std::vector<EvidenceSpec> evidence;
    if (args.evidence.empty()) {
      for (const auto& v : model.variables) evidence.push_back(EvidenceSpec::perfect_on({v.name}));
    } else {
      for (const auto& text : args.evidence) evidence.push_back(parse_evidence(text));
    }

    const Analysis analysis = analyze(model, config);
    QueryOptions options;
    options.quadrature_check = args.quadrature_check;

    std::vector<QueryReport> queries;
    std::vector<EviResult> results;
    for (std::size_t q = 0; q < evidence.size(); ++q) {
      QueryReport report{query_evi(analysis, evidence[q], options), std::nullopt};
      if (args.oracle) report.oracle = oracle_for(analysis, evidence[q], args.seed + 1 + q);
      results.push_back(report.result);
      queries.push_back(std::move(report));
    }

    const auto report = evi_report_json(analysis, queries).dump(2) + "\n";
    std::ostringstream plot;
    write_plot_csv(plot, results);

    std::vector<std::pair<std::string, std::string>> artifacts{
        {"evi_report.json", report},
        {"evi_plot.csv", plot.str()},
        {"fit_report.json", fit_report_json(analysis).dump(2) + "\n"}};
    if (args.oracle) {
      std::ostringstream additivity;
      write_additivity_csv(additivity, additivity_report(analysis, {kOracleOuter, kOracleInner}));
      artifacts.emplace_back("additivity.csv", additivity.str());
      nlohmann::ordered_json oracles = nlohmann::ordered_json::array();
      for (const auto& q : queries) {
        if (!q.oracle) continue;
        auto entry = oracle_json(*q.oracle);
        entry["evidence"] = q.result.evidence.label();
        oracles.push_back(std::move(entry));
      }
      artifacts.emplace_back("oracle_report.json", oracles.dump(2) + "\n");
    }
    if (args.dump_scenarios) {
      std::ostringstream dump;
      write_scenario_csv(dump, analysis.scenarios, analysis.table);
      artifacts.emplace_back("scenarios.csv", dump.str());
    }

    if (args.out_dir) {
      std::error_code ec;
      std::filesystem::create_directories(*args.out_dir, ec);
      if (ec) throw IoError("cannot create output directory '" + args.out_dir->string() + "'");
      for (const auto& [name, content] : artifacts) write_file_atomic(*args.out_dir / name, content);
    }

    switch (args.format) {
      case OutputFormat::Table:
        print_table(out, analysis, queries);
        break;
      case OutputFormat::Json:
        out << report;
        break;
      case OutputFormat::Csv:
        out << plot.str();
        break;
    }
    out.flush();

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    err << "elapsed " << fixed(seconds, 3) << " s\n";
    return kExitOk;
  } catch (const DegenerateFitError& e) {
    err << "error (numerical): " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    const char* label = e.category() == ErrorCategory::Io ? "io" : "validation";
    if (e.category() == ErrorCategory::Numerical) label = "numerical";
    err << "error (" << label << "): " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Estimate the expected value of information in a Monte Carlo decision model"};
  RunArgs args;
  std::string format = "table";
  std::string out_dir;
  app.add_option("--model", args.model_path, "Model JSON file")->required();
  app.add_option("--seed", args.seed, "Random seed")->capture_default_str();
  app.add_option("--samples", args.samples, "Monte Carlo sample size N")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--evidence", args.evidence,
                 "Evidence query, e.g. perfect:x1,x2 or rim:x1=2 or both joined by ';' (repeatable)");
  app.add_flag("--oracle", args.oracle, "Cross-check each query against an independent oracle");
  app.add_flag("--quadrature-check", args.quadrature_check, "Also evaluate the loss integral numerically");
  app.add_flag("--dump-scenarios", args.dump_scenarios, "Write scenarios.csv to the output directory");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "json", "csv"}))->capture_default_str();
  app.add_option("--out", out_dir, "Directory for report files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
  }
  args.format = format == "json" ? OutputFormat::Json : format == "csv" ? OutputFormat::Csv : OutputFormat::Table;
  if (!out_dir.empty()) args.out_dir = out_dir;
  return run_report(args, out, err);
}

}  // namespace evi::cli
