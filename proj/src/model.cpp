#include "evi/model.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "evi/error.hpp"

namespace evi {

using nlohmann::json;

std::vector<std::string> DecisionModel::variable_names() const {
  std::vector<std::string> names;
  names.reserve(variables.size());
  for (const auto& v : variables) names.push_back(v.name);
  return names;
}

int DecisionModel::variable_index(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

bool DecisionModel::all_priors_normal() const {
  return std::all_of(variables.begin(), variables.end(), [](const StateVariable& v) {
    return v.prior.kind() == DistributionKind::Normal;
  });
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  if (!alpha(text.front())) return false;
  return std::all_of(text.begin() + 1, text.end(),
                     [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

std::vector<Diagnostic> validate_model(const DecisionModel& model) {
  std::vector<Diagnostic> out;
  auto error = [&out](std::string path, std::string message) {
    out.push_back({Diagnostic::Severity::Error, std::move(path), std::move(message)});
  };

  if (model.variables.empty()) error("variables", "need >=1 state variable");
  if (model.decisions.size() < 2) error("decisions", "need ≥2 decision alternatives");

  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < model.variables.size(); ++i) {
    const auto& v = model.variables[i];
    const std::string path = "variables[" + std::to_string(i) + "].name";
    if (!is_identifier(v.name)) error(path, "'" + v.name + "' is not a valid identifier");
    if (!seen.insert(v.name).second) error(path, "duplicate variable name '" + v.name + "'");
  }

  std::set<std::string, std::less<>> decision_names;
  for (std::size_t j = 0; j < model.decisions.size(); ++j) {
    const auto& d = model.decisions[j];
    const std::string base = "decisions[" + std::to_string(j) + "]";
    if (!is_identifier(d.name)) error(base + ".name", "'" + d.name + "' is not a valid identifier");
    if (!decision_names.insert(d.name).second) {
      error(base + ".name", "duplicate decision name '" + d.name + "'");
    }
    for (const auto& ref : d.value.variables()) {
      if (!seen.contains(ref)) error(base + ".value", "unresolved variable reference '" + ref + "'");
    }
  }

  for (std::size_t i = 0; i < model.variables.size(); ++i) {
    const auto kind = model.variables[i].prior.kind();
    if (kind != DistributionKind::Normal) {
      out.push_back({Diagnostic::Severity::Warning,
                     "variables[" + std::to_string(i) + "].dist",
                     std::string(to_string(kind)) +
                         " prior: the normal-z assumption is an extra approximation here, "
                         "not analytically true"});
    }
  }
  return out;
}

DecisionModel bind_model(DecisionModel model) {
  const auto names = model.variable_names();
  for (std::size_t j = 0; j < model.decisions.size(); ++j) {
    try {
      model.decisions[j].value = model.decisions[j].value.bind(names);
    } catch (const ModelError& e) {
      throw ModelError("decisions[" + std::to_string(j) + "].value", e.what());
    }
  }
  return model;
}

namespace {

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ModelError(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ModelError(path + "." + key, "missing required field");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw ModelError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

double require_number(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) throw ModelError(path + "." + key, "expected a number");
  return v.get<double>();
}

Distribution parse_distribution(const json& dist, const std::string& path) {
  const std::string kind = require_string(dist, "kind", path);
  try {
    if (kind == "normal") {
      return Distribution::normal(require_number(dist, "mean", path), require_number(dist, "sd", path));
    }
    if (kind == "uniform") {
      return Distribution::uniform(require_number(dist, "lo", path), require_number(dist, "hi", path));
    }
    if (kind == "lognormal") {
      return Distribution::lognormal(require_number(dist, "median", path),
                                     require_number(dist, "gsd", path));
    }
  } catch (const ModelError& e) {
    if (e.path().starts_with(path)) throw;
    throw ModelError(path + "." + e.path(), std::string(e.what()).substr(e.path().size() + 2));
  }
  throw ModelError(path + ".kind", "unknown distribution kind '" + kind + "'");
}

}  // namespace

DecisionModel parse_model(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ModelError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("", "model document must be a JSON object");

  DecisionModel model;
  model.title = require_string(doc, "title", "");
  model.value_units = require_string(doc, "value_units", "");

  const json& vars = require(doc, "variables", "");
  if (!vars.is_array()) throw ModelError("variables", "expected an array");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string path = "variables[" + std::to_string(i) + "]";
    StateVariable v{require_string(vars[i], "name", path),
                    parse_distribution(require(vars[i], "dist", path), path + ".dist")};
    model.variables.push_back(std::move(v));
  }

  const json& decs = require(doc, "decisions", "");
  if (!decs.is_array()) throw ModelError("decisions", "expected an array");
  for (std::size_t j = 0; j < decs.size(); ++j) {
    const std::string path = "decisions[" + std::to_string(j) + "]";
    std::string name = require_string(decs[j], "name", path);
    const std::string text = require_string(decs[j], "value", path);
    try {
      model.decisions.push_back({std::move(name), parse_expression(text)});
    } catch (const ParseError& e) {
      throw ModelError(path + ".value", e.what());
    }
  }

  for (const auto& d : validate_model(model)) {
    if (d.is_error()) throw ModelError(d.path, d.message);
  }
  return bind_model(std::move(model));
}

DecisionModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read model file '" + path.string() + "'");
  return parse_model(buf.str());
}

}  // namespace evi
