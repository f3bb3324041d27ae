// ergoham: command-line front end (solve | sweep | verify | report).

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ergoham/config.hpp"
#include "ergoham/errors.hpp"
#include "ergoham/runner.hpp"
#include "ergoham/suites.hpp"

namespace {

using namespace ergoham;

/// Registers one option per schema key; values are collected as text and
/// type-checked by ConfigStore.
struct KeyOptions {
  std::map<std::string, std::string> text;
  std::map<std::string, bool> flags;
  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App* app) {
    for (const auto& k : config_schema()) {
      const std::string flag = k.flag;
      std::string names = "--" + flag;
      if (flag == "H") names += ",--hamiltonian";
      std::string help = std::string(k.help) + " [" + k.section + "." + k.key + "]";
      if (k.type == KeyType::Flag)
        opts[flag] = app->add_flag(names, flags[flag], help);
      else
        opts[flag] = app->add_option(names, text[flag], help);
    }
  }

  void apply(ConfigStore& store) const {
    for (const auto& [flag, opt] : opts) {
      if (opt->count() == 0) continue;
      const auto it = flags.find(flag);
      store.set_flag(flag, it != flags.end() ? (it->second ? "true" : "false") : text.at(flag));
    }
  }
};

void print_paths(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Principal eigenvalues and ergodic constants of periodic viscous Hamilton-Jacobi problems"};
  app.require_subcommand(1);

  std::string config_file;
  std::vector<std::string> suites{"all"};
  std::string report_path, report_out;

  auto* solve = app.add_subcommand("solve", "solve one eigenproblem");
  auto* sweep = app.add_subcommand("sweep", "run an experiment over a parameter grid");
  auto* verify_cmd = app.add_subcommand("verify", "run acceptance suites");
  auto* report = app.add_subcommand("report", "regenerate tables and plots from a stored report");

  KeyOptions keys[3];
  CLI::App* runnable[3] = {solve, sweep, verify_cmd};
  for (int i = 0; i < 3; ++i) {
    runnable[i]->add_option("-c,--config", config_file, "config file (INI sections)")->check(CLI::ExistingFile);
    keys[i].attach(runnable[i]);
  }
  std::string suite_help = "suite name, repeatable:";
  for (const auto& s : suite_names()) suite_help += " " + s;
  verify_cmd->add_option("--suite", suites, suite_help);
  report->add_option("report", report_path, "report.json of an earlier run")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--out", report_out, "output directory (default: the report's directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (report->parsed()) {
      const std::filesystem::path p = report_path;
      print_paths(regenerate(p, report_out.empty() ? p.parent_path() : std::filesystem::path(report_out)));
      return kExitOk;
    }
    int which = solve->parsed() ? 0 : sweep->parsed() ? 1 : 2;
    ConfigStore store;
    if (!config_file.empty()) store.load_file(config_file);
    keys[which].apply(store);
    const auto config = build_config(store);

    if (which == 2) {
      auto out = ergoham::verify(suites, config);
      print_paths(out.files);
      std::printf("verify: %s\n", out.exit_code == kExitOk ? "all criteria passed" : "FAILED");
      return out.exit_code;
    }
    auto out = run(which == 0 ? "solve" : "sweep", config);
    if (which == 0) {
      const auto& r = out.report["result"];
      std::printf("lambda   = %.15g\nresidual = %.3g\n", r["lambda"].is_null() ? NAN : r["lambda"].get<double>(),
                  r["residual"].is_null() ? NAN : r["residual"].get<double>());
    }
    std::printf("status: %s\n", out.report["status"].get<std::string>().c_str());
    print_paths(out.files);
    return out.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
}
