#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergoham/config.hpp"

namespace ergoham {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitVerify = 3 };

struct RunOutcome {
  /// Deterministic report (written as report.json when json output is on).
  nlohmann::ordered_json report;
  /// Wall-clock data, kept out of the report (written as timing.json).
  nlohmann::ordered_json timing;
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
};

/// solve or sweep: runs the configured experiment and writes the outputs.
RunOutcome run(const std::string& command, const RunConfig& config);

/// Runs the named acceptance suites; exit code 3 when any criterion fails.
RunOutcome verify(const std::vector<std::string>& suites, const RunConfig& config);

/// Rewrites the CSV table and plot script of a stored report into `out_dir`
/// without solving anything. Returns the written paths.
std::vector<std::filesystem::path> regenerate(const std::filesystem::path& report_json,
                                              const std::filesystem::path& out_dir);

/// CSV text of a report's result table (17 significant digits, "nan" for null).
std::string table_csv(const nlohmann::ordered_json& report);

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

} // namespace ergoham
