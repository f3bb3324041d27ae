#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergoham/field.hpp"

namespace ergoham {

/// One numeric check: `value` compared against `limit` by `relation`
/// ("<=", ">=" or "==" for verdict flags).
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;
  double limit = 0.0;
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string suite;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  double budget = 0.0;
  /// Every check passes, and the run finished within the budget.
  bool pass = false;
};

struct SuiteOptions {
  int workers = 1;
  /// First seed of the standard corpus (seeds seed .. seed + 9).
  std::uint64_t seed = 1;
};

/// Suite names in criterion order, then "all".
const std::vector<std::string>& suite_names();

/// Runs one named suite (or "all"). ConfigError for unknown names.
std::vector<CriterionResult> run_suite(const std::string& name, const SuiteOptions& opt = {});

/// Standard corpus: 10 seeded random smooth potentials on the d = 1 grid
/// 64 x 64 (T = 1, amplitude 2).
std::vector<SpaceTimeField> standard_corpus(std::uint64_t seed);

nlohmann::ordered_json to_json(const CriterionResult& r);
/// "PASS  3 frequency-limits  (0.2 s / 120 s)  ..." one-line summary.
std::string summary_line(const CriterionResult& r);

} // namespace ergoham
