#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace evi::cli {

enum class OutputFormat { Table, Json, Csv };

struct RunArgs {
  std::filesystem::path model_path;
  std::uint64_t seed = 0;
  std::size_t samples = 10000;
  std::vector<std::string> evidence;  // empty: perfect info on each variable
  OutputFormat format = OutputFormat::Table;
  bool oracle = false;
  bool quadrature_check = false;
  bool dump_scenarios = false;
  std::optional<std::filesystem::path> out_dir;
};

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitIo = 3;

/// Runs the pipeline and writes reports. Report files land in out_dir only
/// after every computation has succeeded. Returns an exit status.
int run_report(const RunArgs& args, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to run_report.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace evi::cli
