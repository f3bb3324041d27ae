#include "ergoham/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ergoham/errors.hpp"
#include "ergoham/field_io.hpp"
#include "ergoham/recipes.hpp"
#include "ergoham/util.hpp"

namespace ergoham {

using nlohmann::ordered_json;

const std::vector<KeySpec>& config_schema() {
  static const std::vector<KeySpec> schema = {
      {"problem", "dim", KeyType::Int, "1", "dim", "space dimension (1 or 2)"},
      {"problem", "n", KeyType::Int, "64", "n", "grid points per axis"},
      {"problem", "nt", KeyType::Int, "64", "nt", "time steps per period"},
      {"problem", "period", KeyType::Real, "1", "period", "time period T"},
      {"problem", "stationary", KeyType::Flag, "false", "stationary", "time-independent problem"},
      {"problem", "potential", KeyType::Text, "traveling_bump", "potential", "recipe name[:k=v,...]"},
      {"problem", "field", KeyType::Text, "", "field", "ERGH file with the potential"},
      {"problem", "hamiltonian", KeyType::Text, "quadratic", "H", "Hamiltonian string"},
      {"problem", "tau", KeyType::Real, "1", "tau", "time scale"},
      {"problem", "mu", KeyType::Real, "1", "mu", "diffusion"},
      {"problem", "eps", KeyType::Real, "1", "eps", "Hamiltonian weight"},
      {"problem", "direction", KeyType::Text, "forward", "direction", "forward or backward"},
      {"problem", "flow", KeyType::Text, "none", "flow", "advection: none, zero, rational, near_irrational, shear"},
      {"problem", "backend", KeyType::Text, "spectral", "backend", "spectral or fd"},
      {"experiment", "name", KeyType::Text, "solve", "experiment",
       "solve, frequency, diffusion, large_heat, amplitude, reversibility, advection"},
      {"experiment", "values", KeyType::RealList, "", "values", "parameter values"},
      {"experiment", "grid", KeyType::RealList, "", "grid", "geometric grid lo,hi,count"},
      {"experiment", "kappa", KeyType::Real, "1", "kappa", "bump concentration (amplitude probe)"},
      {"experiment", "amplitude", KeyType::Real, "2", "amplitude", "bump amplitude (amplitude probe)"},
      {"experiment", "modes", KeyType::RealList, "", "modes", "two_mode witness modes j,l"},
      {"experiment", "seed", KeyType::Int, "1", "seed", "first seed of randomized corpora"},
      {"experiment", "exploratory", KeyType::Flag, "false", "exploratory", "allow the shear flow"},
      {"output", "dir", KeyType::Text, "ergoham_out", "out", "output directory"},
      {"output", "formats", KeyType::TextList, "csv,json,ergh,plot", "formats", "csv, json, ergh, plot"},
      {"solver", "drift", KeyType::Real, "", "drift", "relaxation drift tolerance"},
      {"solver", "ratio_tol", KeyType::Real, "1e-10", "ratio-tol", "power iteration spread"},
      {"solver", "max_step", KeyType::Real, "0.02", "max-step", "step bound"},
      {"solver", "max_periods", KeyType::Int, "2000", "max-periods", "relaxation period cap"},
      {"solver", "max_iters", KeyType::Int, "5000", "max-iters", "power iteration cap"},
      {"solver", "upwind_below", KeyType::Real, "0.02", "upwind-below", "upwind switch for small mu"},
      {"solver", "workers", KeyType::Int, "1", "workers", "parallel sweep entries (0 = all cores)"},
  };
  return schema;
}

namespace {

std::string full(const std::string& s, const std::string& k) { return s + "." + k; }

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("not a boolean: '" + v + "'");
}

std::vector<std::string> list_items(const std::string& v) {
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  for (const auto& s : split(v, ',')) {
    auto t = trim(s);
    if (t.empty()) throw ConfigError("empty list item in '" + v + "'");
    out.push_back(t);
  }
  return out;
}

void check_type(const KeySpec& k, const std::string& v) {
  const std::string where = full(k.section, k.key);
  try {
    switch (k.type) {
      case KeyType::Int: parse_int(v); break;
      case KeyType::Real: parse_double(v); break;
      case KeyType::Flag: parse_bool(v); break;
      case KeyType::RealList:
        for (const auto& s : list_items(v)) parse_double(s);
        break;
      case KeyType::TextList: list_items(v); break;
      case KeyType::Text: break;
    }
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

} // namespace

ConfigStore::ConfigStore() {
  for (const auto& k : config_schema())
    if (*k.fallback) values_[full(k.section, k.key)] = k.fallback;
}

const KeySpec& ConfigStore::spec(const std::string& section, const std::string& key) const {
  for (const auto& k : config_schema())
    if (section == k.section && key == k.key) return k;
  throw ConfigError("unknown key '" + full(section, key) + "'");
}

void ConfigStore::set(const std::string& section, const std::string& key, const std::string& value) {
  const auto& k = spec(section, key);
  const auto v = trim(value);
  check_type(k, v);
  if (v.empty() && k.type != KeyType::Text && k.type != KeyType::RealList)
    throw ConfigError(full(section, key) + ": empty value");
  values_[full(section, key)] = v;
}

void ConfigStore::set_flag(const std::string& flag, const std::string& value) {
  for (const auto& k : config_schema())
    if (flag == k.flag) return set(k.section, k.key, value);
  throw ConfigError("unknown option '--" + flag + "'");
}

void ConfigStore::load(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    auto t = trim(cut == std::string::npos ? line : line.substr(0, cut));
    if (t.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + "malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      bool known = false;
      for (const auto& k : config_schema()) known = known || section == k.section;
      if (!known) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside any section");
    try {
      set(section, trim(t.substr(0, eq)), t.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

void ConfigStore::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  load(ss.str(), path);
}

bool ConfigStore::has(const std::string& section, const std::string& key) const {
  spec(section, key);
  auto it = values_.find(full(section, key));
  return it != values_.end() && !it->second.empty();
}

const std::string& ConfigStore::text(const std::string& section, const std::string& key) const {
  spec(section, key);
  static const std::string empty;
  auto it = values_.find(full(section, key));
  return it == values_.end() ? empty : it->second;
}

long long ConfigStore::integer(const std::string& section, const std::string& key) const {
  return parse_int(text(section, key));
}
double ConfigStore::real(const std::string& section, const std::string& key) const {
  return parse_double(text(section, key));
}
bool ConfigStore::flag(const std::string& section, const std::string& key) const {
  return parse_bool(text(section, key));
}
std::vector<double> ConfigStore::reals(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : list_items(text(section, key))) out.push_back(parse_double(s));
  return out;
}
std::vector<std::string> ConfigStore::texts(const std::string& section, const std::string& key) const {
  return list_items(text(section, key));
}

ordered_json ConfigStore::echo() const {
  ordered_json j = ordered_json::object();
  for (const auto& k : config_schema()) {
    if (!has(k.section, k.key)) continue;
    auto& slot = j[k.section][k.key];
    switch (k.type) {
      case KeyType::Int: slot = integer(k.section, k.key); break;
      case KeyType::Real: slot = real(k.section, k.key); break;
      case KeyType::Flag: slot = flag(k.section, k.key); break;
      case KeyType::Text: slot = text(k.section, k.key); break;
      case KeyType::RealList: slot = reals(k.section, k.key); break;
      case KeyType::TextList: slot = texts(k.section, k.key); break;
    }
  }
  return j;
}

ConfigStore ConfigStore::from_echo(const ordered_json& j) {
  ConfigStore s;
  if (!j.is_object()) throw ConfigError("config block must be an object");
  for (const auto& [section, keys] : j.items()) {
    if (!keys.is_object()) throw ConfigError("config section '" + section + "' must be an object");
    for (const auto& [key, v] : keys.items()) {
      std::string text;
      auto scalar = [](const ordered_json& x) -> std::string {
        if (x.is_string()) return x.get<std::string>();
        if (x.is_boolean()) return x.get<bool>() ? "true" : "false";
        if (x.is_number_integer()) return std::to_string(x.get<long long>());
        if (x.is_number()) return format_double(x.get<double>());
        throw ConfigError("unsupported config value");
      };
      if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) text += (i ? "," : "") + scalar(v[i]);
      } else {
        text = scalar(v);
      }
      s.set(section, key, text);
    }
  }
  return s;
}

Recipe parse_recipe(const std::string& text) {
  Recipe r;
  const auto colon = text.find(':');
  r.name = trim(text.substr(0, colon));
  if (r.name.empty()) throw ConfigError("empty potential name");
  if (colon == std::string::npos) return r;
  for (const auto& item : list_items(text.substr(colon + 1))) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("potential parameter '" + item + "' needs k=v");
    const auto key = trim(item.substr(0, eq));
    if (r.params.count(key)) throw ConfigError("potential parameter '" + key + "' given twice");
    r.params[key] = parse_double(trim(item.substr(eq + 1)));
  }
  return r;
}

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

SpaceTimeField RunConfig::make_potential() const {
  if (!field_file.empty()) return read_ergh(field_file);
  const auto r = parse_recipe(potential);
  return ergoham::make_potential(r.name, r.params, space, time);
}

namespace {

std::vector<double> default_values(const std::string& experiment) {
  if (experiment == "frequency") return geometric_grid(1e-2, 1e2, 9);
  if (experiment == "diffusion") return {1e-2, 1.0, 1e2};
  if (experiment == "large_heat" || experiment == "reversibility") return {0.08, 0.04, 0.02, 0.01};
  if (experiment == "amplitude") return {0.25, 0.125, 0.0625};
  if (experiment == "advection") return {1e-2};
  return {};
}

} // namespace

RunConfig build_config(const ConfigStore& store) {
  RunConfig c;
  c.store = store;
  const auto& s = store;
  try {
    const int dim = static_cast<int>(s.integer("problem", "dim"));
    const int n = static_cast<int>(s.integer("problem", "n"));
    c.potential = s.text("problem", "potential");
    c.field_file = s.text("problem", "field");
    c.space = TorusGrid(dim, n);
    const bool stationary = s.flag("problem", "stationary") || parse_recipe(c.potential).name == "static";
    c.time = stationary ? TimeGrid::stationary()
                        : TimeGrid(s.real("problem", "period"), static_cast<int>(s.integer("problem", "nt")));
    if (!c.field_file.empty()) {
      const auto f = read_ergh(c.field_file);
      c.space = f.space();
      c.time = f.time();
    }
    c.hamiltonian = Hamiltonian::parse(s.text("problem", "hamiltonian"));
    c.hamiltonian.check_dimension(c.space.dim());
    c.params.tau = s.real("problem", "tau");
    c.params.mu = s.real("problem", "mu");
    c.params.eps = s.real("problem", "eps");
    c.params.direction = direction_from_string(s.text("problem", "direction"));
    c.exploratory = s.flag("experiment", "exploratory");
    const auto flow = s.text("problem", "flow");
    if (flow != "none") {
      c.flow = flow_from_string(flow);
      c.has_flow = true;
      c.params.advection = make_flow(c.flow, c.space, c.exploratory);
    }
    c.params.validate();
    const Backend backend = backend_from_string(s.text("problem", "backend"));

    c.experiment = s.text("experiment", "name");
    static const std::set<std::string> known = {"solve",     "frequency",     "diffusion", "large_heat",
                                                "amplitude", "reversibility", "advection"};
    if (!known.count(c.experiment)) throw ConfigError("unknown experiment '" + c.experiment + "'");
    if (s.has("experiment", "values") && s.has("experiment", "grid"))
      throw ConfigError("experiment.values and experiment.grid are exclusive");
    if (s.has("experiment", "values")) {
      c.values = s.reals("experiment", "values");
    } else if (s.has("experiment", "grid")) {
      const auto g = s.reals("experiment", "grid");
      if (g.size() != 3 || g[2] != std::floor(g[2])) throw ConfigError("experiment.grid is lo,hi,count");
      c.values = geometric_grid(g[0], g[1], static_cast<int>(g[2]));
    } else {
      c.values = default_values(c.experiment);
    }
    const auto seed = s.integer("experiment", "seed");
    if (seed < 0) throw ConfigError("experiment.seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    c.kappa = s.real("experiment", "kappa");
    c.amplitude = s.real("experiment", "amplitude");
    for (double m : s.reals("experiment", "modes")) {
      if (m != std::floor(m) || m < 1) throw ConfigError("experiment.modes must be positive integers");
      c.modes.push_back(static_cast<int>(m));
    }
    if (!c.modes.empty() && c.modes.size() != 2) throw ConfigError("experiment.modes takes two modes j,l");

    c.out_dir = s.text("output", "dir");
    if (c.out_dir.empty()) throw ConfigError("output.dir must not be empty");
    c.formats = s.texts("output", "formats");
    for (const auto& f : c.formats)
      if (f != "csv" && f != "json" && f != "ergh" && f != "plot")
        throw ConfigError("unknown output format '" + f + "'");
    c.write_fields = c.wants("ergh");

    auto& st = c.settings;
    st.linear.backend = backend;
    st.linear.ratio_tol = s.real("solver", "ratio_tol");
    st.linear.max_step = s.real("solver", "max_step");
    st.linear.max_iters = static_cast<int>(s.integer("solver", "max_iters"));
    st.cell.backend = backend;
    st.cell.max_step = st.linear.max_step;
    st.cell.max_periods = static_cast<int>(s.integer("solver", "max_periods"));
    st.cell.upwind_below_mu = s.real("solver", "upwind_below");
    if (s.has("solver", "drift")) st.cell.tol_drift = s.real("solver", "drift");
    const auto workers = s.integer("solver", "workers");
    if (workers < 0) throw ConfigError("solver.workers must be >= 0");
    st.workers = worker_count(static_cast<int>(workers));
    if (!(st.linear.ratio_tol > 0.0) || !(st.linear.max_step > 0.0) || st.linear.max_iters < 1 ||
        st.cell.max_periods < 1)
      throw ConfigError("solver settings must be positive");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

} // namespace ergoham
