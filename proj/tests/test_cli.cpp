#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ergoham/config.hpp"
#include "ergoham/errors.hpp"
#include "ergoham/field_io.hpp"
#include "ergoham/runner.hpp"
#include "ergoham/suites.hpp"

using namespace ergoham;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::path("cli_out") / name;
  fs::remove_all(d);
  return d;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(ERGOHAM_BIN) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

ConfigStore small_store(const std::string& dir) {
  ConfigStore s;
  s.load("[problem]\nn = 32\nnt = 16\n[output]\ndir = " + dir + "\n");
  return s;
}

} // namespace

TEST_CASE("config: typed keys, sections and overrides") {
  ConfigStore s;
  s.load(R"(
# comment
[problem]
dim = 2      ; trailing comment
hamiltonian = power:r=4
tau = 0.5
[experiment]
name = frequency
values = 0.1, 1, 10
)");
  CHECK(s.integer("problem", "dim") == 2);
  CHECK(s.real("problem", "tau") == 0.5);
  CHECK(s.reals("experiment", "values") == std::vector<double>{0.1, 1.0, 10.0});
  CHECK(s.text("problem", "n") == "64");
  s.set_flag("H", "quadratic");
  CHECK(s.text("problem", "hamiltonian") == "quadratic");
  s.set_flag("stationary", "true");
  CHECK(s.flag("problem", "stationary"));

  CHECK_THROWS_AS(s.load("[problem]\nfoo = 1\n"), ConfigError);
  CHECK_THROWS_AS(s.load("[nowhere]\n"), ConfigError);
  CHECK_THROWS_AS(s.load("n = 3\n"), ConfigError);
  CHECK_THROWS_AS(s.load("[problem]\nn = sixty\n"), ConfigError);
  CHECK_THROWS_AS(s.load("[problem]\ntau = 1e\n"), ConfigError);
  CHECK_THROWS_AS(s.load("[problem]\nstationary = maybe\n"), ConfigError);
  CHECK_THROWS_AS(s.set_flag("bogus", "1"), ConfigError);
}

TEST_CASE("config: echo round-trips and validation rejects bad runs") {
  ConfigStore s;
  s.load("[problem]\ntau = 0.25\nhamiltonian = aniso:w=1,2\ndim = 2\n[experiment]\nvalues = 1e-2,3\n");
  auto back = ConfigStore::from_echo(s.echo());
  CHECK(back.echo() == s.echo());
  CHECK(back.echo().dump() == s.echo().dump());

  auto c = build_config(s);
  CHECK(c.space.dim() == 2);
  CHECK(c.params.tau == 0.25);
  CHECK(c.values == std::vector<double>{1e-2, 3.0});

  auto bad = [](const std::string& text) {
    ConfigStore b;
    b.load(text);
    return build_config(b);
  };
  CHECK_THROWS_AS(bad("[problem]\ndim = 3\n"), ConfigError);
  CHECK_THROWS_AS(bad("[problem]\nn = 14\n"), ConfigError);
  CHECK_THROWS_AS(bad("[problem]\nmu = -1\n"), ConfigError);
  CHECK_THROWS_AS(bad("[problem]\nhamiltonian = cubic\n"), ConfigError);
  CHECK_THROWS_AS(bad("[problem]\nflow = rational\n"), ConfigError);  // needs d = 2
  CHECK_THROWS_AS(bad("[problem]\ndim = 2\nflow = shear\n"), ConfigError);
  CHECK_NOTHROW(bad("[problem]\ndim = 2\nflow = shear\n[experiment]\nexploratory = true\n"));
  CHECK_THROWS_AS(bad("[experiment]\nname = everything\n"), ConfigError);
  CHECK_THROWS_AS(bad("[experiment]\nvalues = 1\ngrid = 1,2,3\n"), ConfigError);
  CHECK_THROWS_AS(bad("[output]\nformats = csv,pdf\n"), ConfigError);

  ConfigStore g;
  g.load("[experiment]\nname = frequency\ngrid = 0.01, 100, 5\n");
  CHECK(build_config(g).values.size() == 5);

  auto r = parse_recipe("traveling_bump:kappa=2,amplitude=0.5");
  CHECK(r.name == "traveling_bump");
  CHECK(r.params.at("kappa") == 2.0);
  CHECK_THROWS_AS(parse_recipe("random:seed"), ConfigError);
}

TEST_CASE("solve: constant potential and field files") {
  const auto d = fresh_dir("solve");
  auto s = small_store(d.string());
  s.set("problem", "potential", "constant:value=2");
  s.set("problem", "stationary", "true");
  auto out = run("solve", build_config(s));
  CHECK(out.exit_code == kExitOk);
  CHECK(out.report["result"]["lambda"].get<double>() == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(out.report["status"] == "ok");
  for (const char* f : {"report.json", "results.csv", "timing.json", "potential.ergh", "solution.ergh",
                        "solution.ergh.json", "solution.gp", "solution.dat"})
    CHECK(fs::exists(d / f));
  CHECK(read_ergh(d / "potential.ergh").max() == 2.0);
  CHECK(slurp(d / "report.json").find("wall") == std::string::npos);
  CHECK(slurp(d / "timing.json").find("wall_seconds") != std::string::npos);
}

TEST_CASE("sweep: csv columns, determinism and report regeneration") {
  const auto dir = fresh_dir("sweep");
  auto s = small_store(dir.string());
  s.set("experiment", "name", "frequency");
  s.set("experiment", "values", "0.1,1,10");
  auto c = build_config(s);
  auto a = run("sweep", c);
  const auto csv = slurp(dir / "results.csv");
  const auto json = slurp(dir / "report.json");
  CHECK(csv.rfind("tau,lambda,residual,limit_low,limit_high,gap_low,gap_high,monotone_ok,bounds_ok\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(fs::exists(dir / "results.gp"));

  // identical configs give identical reports, independent of the worker count
  run("sweep", c);
  CHECK(slurp(dir / "report.json") == json);
  auto c4 = c;
  c4.settings.workers = 4;
  CHECK(run("sweep", c4).report.dump() == a.report.dump());

  // every CSV number is in the JSON report
  const auto& rows = a.report["table"]["rows"];
  CHECK(rows.size() == 3);
  CHECK(rows[1][1].get<double>() == a.report["table"]["rows"][1][1].get<double>());

  const auto regen = fresh_dir("regen");
  regenerate(dir / "report.json", regen);
  CHECK(slurp(regen / "results.csv") == csv);
  CHECK(slurp(regen / "results.gp") == slurp(dir / "results.gp"));
}

TEST_CASE("sweep: reversibility and advection tables") {
  const auto dir = fresh_dir("rev");
  auto s = small_store(dir.string());
  s.set("problem", "potential", "two_mode");
  s.set("problem", "hamiltonian", "power:r=4");
  s.set("experiment", "name", "reversibility");
  s.set("experiment", "values", "0.08,0.04");
  s.set("experiment", "modes", "1,3");
  auto out = run("sweep", build_config(s));
  CHECK(out.report["table"]["columns"][0] == "eps");
  CHECK(out.report["summary"].contains("mode_integral_plus"));

  auto v = small_store(fresh_dir("adv").string());
  v.set("problem", "dim", "2");
  v.set("problem", "n", "16");
  v.set("problem", "potential", "static");
  v.set("problem", "flow", "near_irrational");
  v.set("experiment", "name", "advection");
  v.set("experiment", "values", "0.2");
  auto adv = run("sweep", build_config(v));
  CHECK(adv.report["summary"]["limit"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));

  auto t = small_store(fresh_dir("adv_bad").string());
  t.set("experiment", "name", "advection");
  CHECK_THROWS_AS(run("sweep", build_config(t)), ConfigError);
}

TEST_CASE("suites: names and unknown suites") {
  CHECK(suite_names().size() == 12);
  CHECK(suite_names().back() == "all");
  CHECK_THROWS_AS(run_suite("nothing"), ConfigError);
  auto r = run_suite("basic-bounds");
  REQUIRE(r.size() == 1);
  CHECK(r[0].id == 2);
  CHECK(r[0].pass);
  CHECK(standard_corpus(1).size() == 10);
}

TEST_CASE("exit codes of the command-line tool") {
  const auto d = fresh_dir("tool");
  CHECK(run_tool("solve --potential traveling_bump --H quadratic --tau 1 --mu 1 --eps 1 --n 32 --nt 16 --out " +
                 d.string()) == 0);
  CHECK(fs::exists(d / "solution.ergh"));
  CHECK(run_tool("solve --no-such-flag 1") == 1);
  CHECK(run_tool("solve --tau -1 --out " + d.string()) == 1);
  CHECK(run_tool("solve --hamiltonian power:r=0.5 --out " + d.string()) == 1);
  CHECK(run_tool("verify --suite nothing --out " + d.string()) == 1);
  CHECK(run_tool("verify --suite basic-bounds --out " + (d / "v").string()) == 0);
  CHECK(run_tool("solve --n 16 --nt 8 --max-periods 1 --mu 0.3 --eps 0.5 --H power:r=4 --out " + d.string()) == 2);
  CHECK(run_tool("report " + (d / "v" / "report.json").string() + " --out " + (d / "r").string()) == 0);
  CHECK(slurp(d / "r" / "results.csv") == slurp(d / "v" / "results.csv"));
  CHECK(run_tool("report " + (d / "solution.ergh").string()) == 1);
}
