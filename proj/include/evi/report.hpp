#pragma once

#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "evi/engine.hpp"
#include "evi/oracle.hpp"

namespace evi {

// One evaluated evidence query plus its optional oracle cross-check.
struct QueryReport {
  EviResult result;
  std::optional<OracleEstimate> oracle;
};

nlohmann::ordered_json fit_report_json(const Analysis& analysis);
nlohmann::ordered_json oracle_json(const OracleEstimate& estimate);
nlohmann::ordered_json evi_report_json(const Analysis& analysis, const std::vector<QueryReport>& queries);

/// Figure-style bar data: `label,evi,preposterior_sd`, sorted by descending
/// EVI with ties ordered by label. Throws ModelError on an empty list.
void write_plot_csv(std::ostream& out, const std::vector<EviResult>& results);
void emit_plot_data(const std::vector<EviResult>& results, const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace evi
