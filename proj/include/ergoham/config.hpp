#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergoham/experiments.hpp"

namespace ergoham {

enum class KeyType { Int, Real, Text, Flag, RealList, TextList };

struct KeySpec {
  const char* section;
  const char* key;
  KeyType type;
  const char* fallback;  ///< default in config syntax ("" = unset)
  const char* flag;      ///< command-line spelling without dashes
  const char* help;
};

/// Every accepted key, in report order.
const std::vector<KeySpec>& config_schema();

/// Raw key/value store checked against the schema on every write.
///
///   [problem]
///   n = 64            # comments start with '#' or ';'
///   hamiltonian = power:r=4
class ConfigStore {
public:
  ConfigStore();

  /// Parses INI text; `source` names the origin in error messages.
  void load(const std::string& text, const std::string& source = "config");
  void load_file(const std::string& path);
  /// Type-checks and stores one value; ConfigError on unknown keys or bad values.
  void set(const std::string& section, const std::string& key, const std::string& value);
  /// Same, addressed by command-line flag name.
  void set_flag(const std::string& flag, const std::string& value);

  bool has(const std::string& section, const std::string& key) const;
  const std::string& text(const std::string& section, const std::string& key) const;
  long long integer(const std::string& section, const std::string& key) const;
  double real(const std::string& section, const std::string& key) const;
  bool flag(const std::string& section, const std::string& key) const;
  std::vector<double> reals(const std::string& section, const std::string& key) const;
  std::vector<std::string> texts(const std::string& section, const std::string& key) const;

  /// Typed echo in schema order (unset keys omitted).
  nlohmann::ordered_json echo() const;
  /// Inverse of echo(): rebuilds the store from a report's config block.
  static ConfigStore from_echo(const nlohmann::ordered_json& j);

private:
  const KeySpec& spec(const std::string& section, const std::string& key) const;
  std::map<std::string, std::string> values_;
};

/// A "name:k=v,k=v" recipe string.
struct Recipe {
  std::string name;
  std::map<std::string, double> params;
};
Recipe parse_recipe(const std::string& text);

/// Fully validated run description.
struct RunConfig {
  ConfigStore store;

  TorusGrid space{1, 64};
  TimeGrid time{1.0, 64};
  std::string potential;
  std::string field_file;
  Hamiltonian hamiltonian = Hamiltonian::quadratic();
  OperatorParams params;
  Flow flow = Flow::Zero;
  bool has_flow = false;

  std::string experiment;
  std::vector<double> values;
  double kappa = 1.0;
  double amplitude = 1.0;
  std::vector<int> modes;
  std::uint64_t seed = 1;
  bool exploratory = false;

  std::string out_dir;
  std::vector<std::string> formats;
  bool write_fields = false;

  SolveSettings settings;

  bool wants(const std::string& format) const;
  /// The potential named by the config (recipe or ERGH file).
  SpaceTimeField make_potential() const;
};

/// Cross-key validation; ConfigError on any inconsistency.
RunConfig build_config(const ConfigStore& store);

} // namespace ergoham
