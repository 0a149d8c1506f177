#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "evi/distribution.hpp"
#include "evi/expression.hpp"

namespace evi {

struct StateVariable {
  std::string name;
  Distribution prior;
};

// One decision alternative and its value function v(X, d).
struct Decision {
  std::string name;
  Expression value;
};

struct DecisionModel {
  std::string title;
  std::string value_units;
  std::vector<StateVariable> variables;
  std::vector<Decision> decisions;

  std::size_t variable_count() const { return variables.size(); }
  std::size_t decision_count() const { return decisions.size(); }
  std::vector<std::string> variable_names() const;
  /// Index of the named variable, or -1.
  int variable_index(std::string_view name) const;
  bool all_priors_normal() const;
};

struct Diagnostic {
  enum class Severity { Warning, Error };
  Severity severity;
  std::string path;
  std::string message;

  bool is_error() const { return severity == Severity::Error; }
};

bool is_identifier(std::string_view text);

/// Checks every model invariant. Errors for structural violations; a
/// warning for each non-normal prior, since the preposterior analysis then
/// relies on assuming z is normal without that being analytically true.
std::vector<Diagnostic> validate_model(const DecisionModel& model);

/// Parses and validates a JSON model document. Decision expressions come
/// back bound to the variable order. Throws ModelError with a field path.
DecisionModel parse_model(std::string_view document);
/// Throws IoError when the file cannot be read.
DecisionModel load_model(const std::filesystem::path& path);

/// Returns a copy with every decision expression bound to variable order.
/// Throws ModelError on unresolved references.
DecisionModel bind_model(DecisionModel model);

}  // namespace evi
