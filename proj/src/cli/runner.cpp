#include "ergoham/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "ergoham/errors.hpp"
#include "ergoham/experiments.hpp"
#include "ergoham/field_io.hpp"
#include "ergoham/suites.hpp"

namespace ergoham {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr int kReportVersion = 1;

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string csv_number(const ordered_json& v) {
  if (v.is_null()) return "nan";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
  return buf;
}

void write_text(const fs::path& p, const std::string& text, std::vector<fs::path>& files) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot open " + p.string() + " for writing");
  os << text;
  if (!os) throw Error("write failed: " + p.string());
  files.push_back(p);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // column-major

  ordered_json json() const {
    ordered_json t;
    t["columns"] = columns;
    auto& rows = t["rows"] = ordered_json::array();
    const std::size_t n = data.empty() ? 0 : data.front().size();
    for (std::size_t r = 0; r < n; ++r) {
      ordered_json row = ordered_json::array();
      for (const auto& c : data) row.push_back(number(c[r]));
      rows.push_back(row);
    }
    return t;
  }
};

Table sweep_table(const SweepResult& r) {
  Table t;
  t.columns.push_back(r.parameter);
  t.data.push_back(r.values);
  t.columns.push_back("lambda");
  t.data.push_back(r.lambda);
  if (!r.residual.empty()) {
    t.columns.push_back("residual");
    t.data.push_back(r.residual);
  }
  for (const auto& [name, col] : r.columns) {
    t.columns.push_back(name);
    t.data.push_back(col);
  }
  return t;
}

ordered_json summary_json(const std::vector<std::pair<std::string, double>>& s) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : s) j[k] = number(v);
  return j;
}

ordered_json check(const std::string& name, double value, const std::string& rel, double limit) {
  bool pass = false;
  if (rel == "<=") pass = value <= limit;
  else if (rel == ">=") pass = value >= limit;
  else pass = value == limit;
  ordered_json c;
  c["name"] = name;
  c["value"] = number(value);
  c["relation"] = rel;
  c["limit"] = limit;
  c["pass"] = pass;
  return c;
}

bool all_pass(const ordered_json& checks) {
  for (const auto& c : checks)
    if (!c["pass"].get<bool>()) return false;
  return true;
}

/// Plot description: x column, log-x flag, and the series drawn against it.
ordered_json plot_spec(const Table& t) {
  static const std::vector<std::pair<std::string, double>> extra = {
      {"limit_low", 1.0}, {"limit_high", 1.0}, {"lambda_minus", 1.0}, {"crest_bound", -1.0}, {"slope", 1.0}};
  ordered_json p;
  p["x"] = t.columns.front();
  const auto& xs = t.data.front();
  bool logx = !xs.empty();
  double lo = INFINITY, hi = 0.0;
  for (double x : xs) {
    logx = logx && x > 0.0;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  p["logx"] = logx && hi >= 10.0 * lo;
  auto& series = p["series"] = ordered_json::array();
  auto add = [&](const std::string& name, double scale) {
    for (std::size_t i = 0; i < t.columns.size(); ++i)
      if (t.columns[i] == name) series.push_back({{"column", name}, {"index", i + 1}, {"scale", scale}});
  };
  add("eps_lambda", 1.0);
  if (series.empty()) add("lambda", 1.0);
  for (const auto& [name, scale] : extra) add(name, scale);
  return p;
}

std::string plot_script(const ordered_json& plot, const std::string& csv, const std::string& png) {
  std::ostringstream s;
  s << "# gnuplot " << fs::path(png).replace_extension(".gp").string() << "\n";
  s << "set datafile separator ','\n";
  s << "set terminal pngcairo size 900,600\n";
  s << "set output '" << png << "'\n";
  s << "set xlabel '" << plot["x"].get<std::string>() << "'\n";
  s << "set ylabel 'value'\n";
  s << "set key left top\n";
  if (plot["logx"].get<bool>()) s << "set logscale x\n";
  s << "plot ";
  bool first = true;
  for (const auto& sr : plot["series"]) {
    const auto idx = sr["index"].get<int>();
    const double scale = sr["scale"].get<double>();
    const auto name = sr["column"].get<std::string>();
    if (!first) s << ", \\\n     ";
    s << "'" << csv << "' skip 1 using 1:";
    if (scale == 1.0) s << idx;
    else s << "(" << csv_number(ordered_json(scale)) << "*$" << idx << ")";
    s << " with linespoints title '" << (scale == 1.0 ? name : "-" + name) << "'";
    first = false;
  }
  s << "\n";
  return s.str();
}

void write_field(const fs::path& dir, const std::string& stem, const SpaceTimeField& f,
                 std::vector<fs::path>& files) {
  const auto p = dir / (stem + ".ergh");
  write_ergh(p, f);
  files.push_back(p);
  const auto side = dir / (stem + ".ergh.json");
  write_ergh_sidecar(side, f);
  files.push_back(side);
}

/// Space-time data of a field (d = 1) or its first slice (d = 2) with a
/// matching splot script.
void write_field_plot(const fs::path& dir, const std::string& stem, const SpaceTimeField& f,
                      std::vector<fs::path>& files) {
  std::ostringstream d;
  const auto& g = f.space();
  if (g.dim() == 1) {
    d << "# t x value\n";
    for (int k = 0; k < f.nt(); ++k) {
      for (int i = 0; i < g.n(); ++i)
        d << csv_number(ordered_json(f.time().t(k))) << ' ' << csv_number(ordered_json(g.coord(i))) << ' '
          << csv_number(ordered_json(f(k, static_cast<std::size_t>(i)))) << '\n';
      d << '\n';
    }
  } else {
    d << "# x y value (t = 0)\n";
    for (int i = 0; i < g.n(); ++i) {
      for (int j = 0; j < g.n(); ++j)
        d << csv_number(ordered_json(g.coord(i))) << ' ' << csv_number(ordered_json(g.coord(j))) << ' '
          << csv_number(ordered_json(f(0, g.index(i, j)))) << '\n';
      d << '\n';
    }
  }
  write_text(dir / (stem + ".dat"), d.str(), files);
  std::ostringstream s;
  s << "set terminal pngcairo size 900,600\n";
  s << "set output '" << stem << ".png'\n";
  s << "set view map\n";
  s << (g.dim() == 1 ? "set xlabel 't'\nset ylabel 'x'\n" : "set xlabel 'x'\nset ylabel 'y'\n");
  s << "splot '" << stem << ".dat' using 1:2:3 with pm3d title '" << stem << "'\n";
  write_text(dir / (stem + ".gp"), s.str(), files);
}

ordered_json header(const std::string& command, const RunConfig& c) {
  ordered_json r;
  r["tool"] = "ergoham";
  r["report_version"] = kReportVersion;
  r["command"] = command;
  r["config"] = c.store.echo();
  return r;
}

void emit(const fs::path& dir, const RunConfig& c, RunOutcome& out, bool table_outputs) {
  fs::create_directories(dir);
  if (c.wants("json")) write_text(dir / "report.json", out.report.dump(2) + "\n", out.files);
  if (table_outputs && c.wants("csv")) write_text(dir / "results.csv", table_csv(out.report), out.files);
  if (table_outputs && c.wants("plot") && out.report.contains("plot"))
    write_text(dir / "results.gp", plot_script(out.report["plot"], "results.csv", "results.png"), out.files);
  write_text(dir / "timing.json", out.timing.dump(2) + "\n", out.files);
}

SweepResult reversibility_table(const ReversibilityReport& rep) {
  SweepResult r;
  r.parameter = "eps";
  r.values = rep.eps;
  r.lambda = rep.lambda_plus;
  r.add_column("lambda_minus", rep.lambda_minus);
  std::vector<double> gap(rep.eps.size());
  for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = std::abs(rep.lambda_plus[i] - rep.lambda_minus[i]);
  r.add_column("lambda_gap", gap);
  r.set("max_lambda_gap", rep.max_lambda_gap);
  r.set("slope_plus", rep.slope_plus);
  r.set("slope_minus", rep.slope_minus);
  r.set("prediction_plus", rep.prediction_plus);
  r.set("prediction_minus", rep.prediction_minus);
  r.set("slope_tolerance", rep.slope_tolerance);
  if (rep.modes) {
    r.set("mode_integral_plus", rep.modes->forward);
    r.set("mode_integral_minus", rep.modes->backward);
  }
  return r;
}

SweepResult run_experiment(const RunConfig& c, const SpaceTimeField& m) {
  const auto& e = c.experiment;
  const auto& h = c.hamiltonian;
  if (e == "solve") throw ConfigError("sweep needs experiment.name (frequency, diffusion, ...)");
  if (c.values.empty()) throw ConfigError("experiment '" + e + "' needs parameter values");
  if (e == "frequency") return sweep_frequency(m, c.values, h, c.params, c.settings);
  if (e == "diffusion") return sweep_diffusion(m, c.values, h, c.params, c.settings);
  if (e == "large_heat") return large_heat_slope(m, c.values, h, c.params, c.settings);
  if (e == "amplitude") return amplitude_probe(c.space, c.time, c.kappa, c.amplitude, c.values, h, c.settings);
  if (e == "reversibility") {
    std::optional<std::pair<int, int>> jl;
    double amp = 1.0;
    if (!c.modes.empty()) {
      jl = std::pair{c.modes[0], c.modes[1]};
      const auto r = parse_recipe(c.potential);
      if (r.params.count("amplitude")) amp = r.params.at("amplitude");
    }
    return reversibility_table(reversibility_probe(h, m, c.values, c.params, c.settings, jl, amp));
  }
  if (e == "advection") {
    if (!m.is_stationary()) throw ConfigError("advection experiment needs a time-independent potential");
    return advection_limit(m, c.has_flow ? c.flow : Flow::Zero, c.values, h, c.settings, c.exploratory);
  }
  throw ConfigError("sweep needs an experiment other than '" + e + "'");
}

ordered_json sweep_checks(const std::string& e, const SweepResult& r) {
  ordered_json checks = ordered_json::array();
  auto verdict = [&](const std::string& key) {
    for (const auto& [k, v] : r.summary)
      if (k == key) checks.push_back(check(key, v, "==", 1.0));
  };
  if (e == "frequency") verdict("monotone");
  if (e == "frequency" || e == "diffusion") verdict("bounds_ok");
  if (e == "amplitude") verdict("plateau_ok");
  return checks;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

std::string table_csv(const ordered_json& report) {
  const auto& t = report.at("table");
  std::string out;
  const auto& cols = t.at("columns");
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i].get<std::string>();
  out += "\n";
  for (const auto& row : t.at("rows")) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_number(row[i]);
    out += "\n";
  }
  return out;
}

RunOutcome run(const std::string& command, const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out;
  out.report = header(command, c);
  const fs::path dir = c.out_dir;
  const auto m = c.make_potential();
  c.params.validate_for(m);
  std::vector<fs::path> field_files;

  if (command == "solve") {
    if (c.experiment != "solve") throw ConfigError("solve runs a single eigenproblem; use sweep for '" + c.experiment + "'");
    const auto eig = principal_eigenvalue(m, c.hamiltonian, c.params, c.settings);
    const double slack = 1e-8 * (1.0 + m.max_abs());
    Table t;
    t.columns = {"lambda", "residual", "iterations"};
    t.data = {{eig.lambda}, {eig.residual}, {static_cast<double>(eig.iterations)}};
    out.report["table"] = t.json();
    ordered_json res;
    res["lambda"] = number(eig.lambda);
    res["residual"] = number(eig.residual);
    res["iterations"] = eig.iterations;
    res["form"] = eig.form == EigenResult::Form::U ? "u" : "phi";
    res["lower_bound"] = number(-m.max());
    res["upper_bound"] = number(-m.min());
    out.report["result"] = res;
    ordered_json checks = ordered_json::array();
    checks.push_back(check("lambda >= -max m", eig.lambda, ">=", -m.max() - slack));
    checks.push_back(check("lambda <= -min m", eig.lambda, "<=", -m.min() + slack));
    out.report["checks"] = checks;
    if (c.write_fields) {
      fs::create_directories(dir);
      write_field(dir, "potential", m, field_files);
      if (eig.field) {
        write_field(dir, "solution", *eig.field, field_files);
        if (c.wants("plot")) write_field_plot(dir, "solution", *eig.field, field_files);
      }
    }
  } else if (command == "sweep") {
    const auto r = run_experiment(c, m);
    const auto t = sweep_table(r);
    out.report["experiment"] = c.experiment;
    out.report["table"] = t.json();
    out.report["summary"] = summary_json(r.summary);
    out.report["checks"] = sweep_checks(c.experiment, r);
    out.report["plot"] = plot_spec(t);
    if (c.write_fields) {
      fs::create_directories(dir);
      write_field(dir, "potential", m, field_files);
    }
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  out.report["status"] = all_pass(out.report["checks"]) ? "ok" : "checks_failed";
  out.timing["command"] = command;
  out.timing["workers"] = c.settings.workers;
  out.timing["wall_seconds"] = seconds_since(t0);
  emit(dir, c, out, true);
  out.files.insert(out.files.end(), field_files.begin(), field_files.end());
  return out;
}

RunOutcome verify(const std::vector<std::string>& suites, const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out;
  out.report = header("verify", c);
  SuiteOptions opt;
  opt.workers = c.settings.workers;
  opt.seed = c.seed;
  std::vector<CriterionResult> results;
  for (const auto& s : suites) {
    if (s != "all" && std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw ConfigError("unknown suite '" + s + "'");
  }
  for (const auto& s : suites)
    for (auto& r : run_suite(s, opt)) results.push_back(std::move(r));

  Table t;
  t.columns = {"criterion", "pass", "checks_passed", "checks"};
  t.data.assign(4, {});
  auto criteria = ordered_json::array();
  auto timing = ordered_json::array();
  bool pass = true;
  for (const auto& r : results) {
    int ok = 0;
    for (const auto& ch : r.checks) ok += ch.pass;
    t.data[0].push_back(r.id);
    t.data[1].push_back(r.pass);
    t.data[2].push_back(ok);
    t.data[3].push_back(static_cast<double>(r.checks.size()));
    criteria.push_back(to_json(r));
    timing.push_back({{"id", r.id}, {"suite", r.suite}, {"seconds", r.seconds}, {"budget_seconds", r.budget}});
    pass = pass && r.pass;
  }
  out.report["suites"] = suites;
  out.report["table"] = t.json();
  out.report["criteria"] = criteria;
  out.report["status"] = pass ? "ok" : "failed";
  out.exit_code = pass ? kExitOk : kExitVerify;
  out.timing["command"] = "verify";
  out.timing["workers"] = c.settings.workers;
  out.timing["criteria"] = timing;
  out.timing["wall_seconds"] = seconds_since(t0);
  emit(c.out_dir, c, out, true);
  for (const auto& r : results) std::printf("%s\n", summary_line(r).c_str());
  return out;
}

std::vector<fs::path> regenerate(const fs::path& report_json, const fs::path& out_dir) {
  std::ifstream is(report_json);
  if (!is) throw ConfigError("cannot read report '" + report_json.string() + "'");
  ordered_json report;
  try {
    report = ordered_json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed report '" + report_json.string() + "': " + e.what());
  }
  if (!report.is_object() || report.value("tool", "") != "ergoham" || !report.contains("table"))
    throw ConfigError("'" + report_json.string() + "' is not an ergoham report");
  if (report.value("report_version", 0) != kReportVersion)
    throw ConfigError("unsupported report version in '" + report_json.string() + "'");
  // schema check of the stored config; nothing is solved or read
  ConfigStore::from_echo(report.at("config"));

  std::vector<fs::path> files;
  fs::create_directories(out_dir);
  write_text(out_dir / "results.csv", table_csv(report), files);
  if (report.contains("plot"))
    write_text(out_dir / "results.gp", plot_script(report["plot"], "results.csv", "results.png"), files);
  return files;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const SolverError*>(&e)) return kExitSolver;
  return kExitConfig;
}

} // namespace ergoham
