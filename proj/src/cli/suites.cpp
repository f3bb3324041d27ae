#include "ergoham/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>

#include "ergoham/cell_solver.hpp"
#include "ergoham/errors.hpp"
#include "ergoham/experiments.hpp"
#include "ergoham/field_ops.hpp"
#include "ergoham/invariant_measure.hpp"
#include "ergoham/linear_eig.hpp"
#include "ergoham/recipes.hpp"
#include "ergoham/util.hpp"
#include "ergoham/variational.hpp"

namespace ergoham {

namespace {

// Pinned acceptance tolerances.
constexpr double kCrossRoute = 1e-6;
constexpr double kStrictMargin = 1e-4;
constexpr double kBoundEquality = 1e-8;
constexpr double kFrequencyRel = 0.02;
constexpr double kFlatness = 1e-7;
constexpr double kDiffusionRel = 0.05;
constexpr double kDiffusionSmall = -0.1;
constexpr double kDiffusionDip = -1.0;
constexpr double kHeatRelQuadratic = 0.02;
constexpr double kHeatRelQuartic = 0.05;
constexpr double kReversibleGap = 1e-7;
constexpr double kWitnessFactor = 10.0;
constexpr double kModeAgreement = 1e-10;
constexpr double kGapFloor = -1e-8;
constexpr double kRemainder = 1e-6;
constexpr double kControlEquality = 1e-6;
constexpr double kControlSlack = 1e-7;
constexpr double kSliceMass = 1e-8;
constexpr double kWeakResidual = 1e-6;
constexpr double kDuality = 1e-6;
constexpr double kAdvectionRel = 0.05;

Check le(std::string name, double v, double lim) { return {std::move(name), v, "<=", lim, v <= lim}; }
Check ge(std::string name, double v, double lim) { return {std::move(name), v, ">=", lim, v >= lim}; }
Check gt(std::string name, double v, double lim) { return {std::move(name), v, ">", lim, v > lim}; }
Check verdict(std::string name, double v) { return {std::move(name), v, "==", 1.0, v == 1.0}; }

double rel_error(double v, double limit, const SpaceTimeField& m) {
  return std::abs(v - limit) / std::max(std::abs(limit), m.max_abs());
}

SolveSettings settings(const SuiteOptions& o) {
  SolveSettings s;
  s.workers = o.workers;
  return s;
}

/// fn(i) for i < count on the configured workers, results in index order.
std::vector<double> map_values(int count, int workers, const std::function<double(int)>& fn) {
  std::vector<double> out(count);
  parallel_for(count, workers, [&](int i) { out[i] = fn(i); });
  return out;
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }
double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

// 1
std::vector<Check> cross_route(const SuiteOptions& o) {
  const auto corpus = standard_corpus(o.seed);
  const auto diff = map_values(static_cast<int>(corpus.size()), o.workers, [&](int i) {
    const OperatorParams p;
    const double lin = parabolic_principal_eig(corpus[i], p).lambda;
    const double hj = effective_hamiltonian(corpus[i], Hamiltonian::quadratic(), p).eig.lambda;
    return std::abs(hj - lin);
  });
  return {le("max |lambda_hj - lambda_linear|", max_of(diff), kCrossRoute)};
}

// 2
std::vector<Check> basic_bounds(const SuiteOptions& o) {
  const auto corpus = standard_corpus(o.seed);
  const int n = static_cast<int>(corpus.size());
  std::vector<double> lower(n), upper(n);
  parallel_for(n, o.workers, [&](int i) {
    const double lam = parabolic_principal_eig(corpus[i], OperatorParams{}).lambda;
    const double xi = elliptic_xi(time_average(corpus[i]), 1.0).lambda;
    lower[i] = lam + corpus[i].max_abs();
    upper[i] = xi - lam;
  });
  const auto& g = corpus[0].space();
  const auto& tg = corpus[0].time();
  auto c = SpaceTimeField::constant(g, tg, 0.7);
  const double lc = parabolic_principal_eig(c, OperatorParams{}).lambda;
  const double xc = elliptic_xi(time_average(c), 1.0).lambda;
  auto st = random_smooth(g, TimeGrid::stationary(), o.seed + 50, 1.0);
  const double ls = parabolic_principal_eig(st.broadcast(tg), OperatorParams{}).lambda;
  const double xs = elliptic_xi(st, 1.0).lambda;
  return {gt("min (lambda + max|m|)", min_of(lower), kStrictMargin),
          gt("min (xi(avg_t m) - lambda)", min_of(upper), kStrictMargin),
          le("constant m: |lambda + max|m||", std::abs(lc + 0.7), kBoundEquality),
          le("constant m: |lambda - xi(avg_t m)|", std::abs(lc - xc), kBoundEquality),
          le("static m: |lambda - xi(m)|", std::abs(ls - xs), kBoundEquality)};
}

// 3
std::vector<Check> frequency_limits(const SuiteOptions& o) {
  TorusGrid g(1, 64);
  TimeGrid tg(1.0, 64);
  const auto m = traveling_bump(g, tg);
  auto r = sweep_frequency(m, geometric_grid(1e-2, 1e2, 9), Hamiltonian::quadratic(), OperatorParams{}, settings(o));
  return {le("tau = 1e2: rel |lambda - xi(avg_t m)|", rel_error(r.lambda.back(), r.get("limit_high"), m), kFrequencyRel),
          le("tau = 1e-2: rel |lambda - avg_t xi(m)|", rel_error(r.lambda.front(), r.get("limit_low"), m), kFrequencyRel),
          verdict("gaps shrink along the grid", r.get("gaps_shrinking"))};
}

// 4
std::vector<Check> frequency_monotone(const SuiteOptions& o) {
  TorusGrid g(1, 64);
  TimeGrid tg(1.0, 64);
  const auto taus = geometric_grid(1e-2, 1e2, 9);
  const auto q = Hamiltonian::quadratic();
  const auto r4 = Hamiltonian::power_law(4.0);
  const auto s = settings(o);
  std::vector<Check> out;
  out.push_back(verdict("quadratic, traveling bump: monotone",
                        sweep_frequency(traveling_bump(g, tg), taus, q, OperatorParams{}, s).get("monotone")));
  out.push_back(verdict("quadratic, random m: monotone",
                        sweep_frequency(standard_corpus(o.seed)[0], taus, q, OperatorParams{}, s).get("monotone")));
  out.push_back(verdict("r = 4, time-symmetric m: monotone",
                        sweep_frequency(time_symmetric(g, tg), taus, r4, OperatorParams{}, s).get("monotone")));
  const auto sep = separable(g, tg);
  out.push_back(le("quadratic, separable m: flatness",
                   sweep_frequency(sep, taus, q, OperatorParams{}, s).get("flatness"), kFlatness));
  out.push_back(le("r = 4, separable m: flatness",
                   sweep_frequency(sep, taus, r4, OperatorParams{}, s).get("flatness"), kFlatness));
  return out;
}

// 5
std::vector<Check> diffusion(const SuiteOptions& o) {
  TorusGrid g(1, 128);
  TimeGrid tg(0.1, 64);
  const auto h = Hamiltonian::quadratic();
  auto [m, amp] = carrere_nadin_bump(g, tg, h, kDiffusionDip, 1.0, 1.0, settings(o));
  auto r = sweep_diffusion(m, {1e-2, 1.0, 1e2}, h, OperatorParams{}, settings(o));
  return {ge("lambda(mu = 1e-2)", r.lambda[0], kDiffusionSmall),
          le("lambda(mu = 1)", r.lambda[1], kDiffusionDip),
          ge("lambda(mu = 1e2)", r.lambda[2], kDiffusionSmall),
          verdict("non-monotonicity certified", r.get("non_monotone")),
          le("mu = 1e-2: rel |lambda + max_x avg_t m|", rel_error(r.lambda[0], r.get("limit_low"), m), kDiffusionRel),
          le("mu = 1e2: rel |lambda + avg m|", rel_error(r.lambda[2], r.get("limit_high"), m), kDiffusionRel)};
}

// 6
std::vector<Check> large_heat(const SuiteOptions& o) {
  TorusGrid g(1, 64);
  TimeGrid tg(1.0, 32);
  const auto m = random_smooth(g, tg, o.seed + 2, 20.0);
  const std::vector<double> eps{0.08, 0.04, 0.02, 0.01};
  auto q = large_heat_slope(m, eps, Hamiltonian::quadratic(), OperatorParams{}, settings(o));
  auto r4 = large_heat_slope(m, eps, Hamiltonian::power_law(4.0), OperatorParams{}, settings(o));
  return {le("quadratic: rel |slope_R - avg H(grad psi0)|", q.get("rel_error"), kHeatRelQuadratic),
          le("r = 4: rel |slope_R - avg H(grad psi0)|", r4.get("rel_error"), kHeatRelQuartic)};
}

// 7
std::vector<Check> blow_up(const SuiteOptions& o) {
  TorusGrid g(1, 64);
  TimeGrid tg(1.0, 64);
  auto r = amplitude_probe(g, tg, 1.0, 2.0, {0.25, 0.125, 0.0625}, Hamiltonian::quadratic(), settings(o));
  const double c = r.get("c");
  std::vector<Check> out{gt("crest constant c", c, 0.0)};
  const auto& el = r.column("eps_lambda");
  for (std::size_t i = 0; i < el.size(); ++i)
    out.push_back(le("eps = " + format_double(r.values[i]) + ": eps lambda + c", el[i] + c, 0.0));
  return out;
}

// 8
std::vector<Check> reversibility(const SuiteOptions& o) {
  TorusGrid g(1, 64);
  TimeGrid tg(1.0, 64);
  const auto gaps = map_values(20, o.workers, [&](int i) {
    const auto m = random_smooth(g, tg, o.seed + 100 + static_cast<std::uint64_t>(i), 1.0);
    OperatorParams p;
    const double f = principal_eigenvalue(m, Hamiltonian::quadratic(), p).lambda;
    p.direction = Direction::Backward;
    return std::abs(f - principal_eigenvalue(m, Hamiltonian::quadratic(), p).lambda);
  });
  TimeGrid tw(1.0, 32);
  auto rep = reversibility_probe(Hamiltonian::power_law(4.0), two_mode(g, tw), {0.08, 0.04, 0.02, 0.01},
                                 OperatorParams{}, settings(o), std::pair{1, 3});
  const double mode_gap = std::abs(rep.modes->forward - rep.modes->backward);
  const double agree = std::max(std::abs(rep.modes->forward - rep.prediction_plus),
                                std::abs(rep.modes->backward - rep.prediction_minus));
  return {le("quadratic: max |lambda+ - lambda-|", max_of(gaps), kReversibleGap),
          gt("two_mode: mode-integral gap", mode_gap, 0.0),
          le("two_mode: |mode integral - grid quadrature|", agree, kModeAgreement),
          ge("two_mode: |slope+ - slope-| / tolerance", std::abs(rep.slope_plus - rep.slope_minus) / rep.slope_tolerance,
             kWitnessFactor)};
}

// 9
std::vector<Check> dv_saddle(const SuiteOptions& o) {
  TorusGrid g(1, 64);
  TimeGrid tg(1.0, 32);
  OperatorParams p;
  p.mu = 0.2;
  p.eps = 0.6;
  const auto m = random_smooth(g, tg, o.seed, 1.5);
  const auto q = Hamiltonian::quadratic();
  const auto r4 = Hamiltonian::power_law(4.0);

  auto sq = effective_hamiltonian(m, q, p).eig;
  auto eq = invariant_for_solution(sq, q, p);
  auto s4 = effective_hamiltonian(m, r4, p).eig;
  auto e4 = invariant_for_solution(s4, r4, p);

  double worst_gap = std::numeric_limits<double>::infinity();
  double remainder = 0.0;
  for (std::uint64_t k = 1; k <= 50; ++k) {
    const double amp = 0.02 * static_cast<double>(1 + k % 5);
    const auto w = random_smooth(g, tg, o.seed + 1000 + k, amp);
    worst_gap = std::min(worst_gap, dv_gap(*s4.field + w, s4, e4, m, r4, p).gap);
    auto rq = dv_gap(*sq.field + w, sq, eq, m, q, p);
    worst_gap = std::min(worst_gap, rq.gap);
    remainder = std::max(remainder, std::abs(rq.gap - rq.quadratic_form));
  }

  auto b = optimal_drift(*sq.field, q, p);
  const double optimal = std::abs(control_value(b, m, q, p) + sq.lambda);
  const auto excess = map_values(20, o.workers, [&](int i) {
    const auto a = random_smooth(g, tg, o.seed + 500 + static_cast<std::uint64_t>(i), 0.5 + 0.1 * i);
    return control_value(SpaceVectorField({a}), m, q, p) + sq.lambda;
  });
  return {ge("min gap over 50 perturbations (quadratic, r = 4)", worst_gap, kGapFloor),
          le("quadratic: max |gap - quadratic remainder|", remainder, kRemainder),
          le("|J(optimal drift) + lambda|", optimal, kControlEquality),
          le("max J(alpha) + lambda over 20 controls", max_of(excess), kControlSlack)};
}

// 10
std::vector<Check> invariant_measure(const SuiteOptions& o) {
  const auto corpus = standard_corpus(o.seed);
  const int n = static_cast<int>(corpus.size());
  std::vector<double> min_density(n), mass(n), weak(n), duality(n);
  const auto h = Hamiltonian::quadratic();
  parallel_for(n, o.workers, [&](int i) {
    const auto& m = corpus[i];
    const OperatorParams p;
    auto eig = effective_hamiltonian(m, h, p).eig;
    const auto& phi = *eig.field;
    auto b = optimal_drift(phi, h, p);
    auto eta = invariant_for_drift(b, p);
    min_density[i] = eta.density.min();
    mass[i] = 0.0;
    for (double s : eta.per_slice_mass) mass[i] = std::max(mass[i], std::abs(s - 1.0 / m.time().period()));
    weak[i] = 0.0;
    for (std::uint64_t k = 1; k <= 5; ++k) {
      auto f = random_smooth(m.space(), m.time(), o.seed + 200 + k, 1.0);
      const double c2 = f.max_abs() + gradient(f)[0].max_abs() + laplacian(f).max_abs();
      weak[i] = std::max(weak[i], weak_residual(eta, b, f, p) / c2);
    }
    // int m deta = -lambda - eps int [H - <grad_p H, grad phi>] deta
    const auto gp = gradient(phi)[0];
    std::vector<double> d(phi.values().size());
    for (std::size_t j = 0; j < d.size(); ++j) {
      const double v = gp.values()[j];
      double g0, g1;
      h.gradient(v, 0.0, g0, g1);
      d[j] = p.eps * (h.value(v, 0.0) - g0 * v);
    }
    duality[i] = std::abs(integrate_against(m, eta.density) + eig.lambda +
                          integrate_against(SpaceTimeField(m.space(), m.time(), d), eta.density));
  });
  return {gt("min density", min_of(min_density), 0.0),
          le("max |slice mass - 1/T|", max_of(mass), kSliceMass),
          le("max weak residual / C2 norm of f", max_of(weak), kWeakResidual),
          le("max duality defect", max_of(duality), kDuality)};
}

// 11
std::vector<Check> advection(const SuiteOptions& o) {
  TorusGrid g(2, 48);
  const auto m = SpaceTimeField::sample(g, TimeGrid::stationary(), [](double, double x, double y) {
    return std::sin(2 * std::numbers::pi * x) + std::cos(2 * std::numbers::pi * y);
  });
  std::vector<Check> out;
  const Flow flows[] = {Flow::Rational, Flow::NearIrrational};
  std::vector<SweepResult> res(2);
  parallel_for(2, o.workers, [&](int i) {
    SolveSettings s;
    res[i] = advection_limit(m, flows[i], {1e-2}, Hamiltonian::quadratic(), s);
  });
  for (int i = 0; i < 2; ++i)
    out.push_back(le(std::string(to_string(flows[i])) + ": rel |lambda(1e-2) - limit|",
                     res[i].column("rel_error")[0], kAdvectionRel));
  return out;
}

struct Criterion {
  int id;
  const char* suite;
  const char* title;
  double budget;
  std::vector<Check> (*run)(const SuiteOptions&);
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "cross-route", "Cross-route equivalence", 60, cross_route},
      {2, "basic-bounds", "Basic bounds", 30, basic_bounds},
      {3, "frequency-limits", "Frequency limits", 120, frequency_limits},
      {4, "frequency-monotone", "Frequency monotonicity", 180, frequency_monotone},
      {5, "diffusion", "Diffusion limits and non-monotonicity", 120, diffusion},
      {6, "large-heat", "Large-heat expansion", 90, large_heat},
      {7, "blow-up", "Blow-up of eps lambda", 120, blow_up},
      {8, "reversibility", "Reversibility dichotomy", 120, reversibility},
      {9, "dv-saddle", "Donsker-Varadhan saddle", 90, dv_saddle},
      {10, "invariant-measure", "Invariant measure", 60, invariant_measure},
      {11, "advection", "Advection limit", 180, advection},
  };
  return all;
}

CriterionResult run_one(const Criterion& c, const SuiteOptions& o) {
  CriterionResult r;
  r.id = c.id;
  r.suite = c.suite;
  r.title = c.title;
  r.budget = c.budget;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.checks = c.run(o);
  } catch (const Error& e) {
    r.checks.push_back({std::string("error: ") + e.what(), std::nan(""), "==", 0.0, false});
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = r.seconds <= r.budget;
  for (const auto& ch : r.checks) r.pass = r.pass && ch.pass;
  return r;
}

} // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& c : criteria()) v.push_back(c.suite);
    v.push_back("all");
    return v;
  }();
  return names;
}

std::vector<CriterionResult> run_suite(const std::string& name, const SuiteOptions& opt) {
  std::vector<CriterionResult> out;
  for (const auto& c : criteria())
    if (name == "all" || name == c.suite) out.push_back(run_one(c, opt));
  if (out.empty()) throw ConfigError("unknown suite '" + name + "'");
  return out;
}

std::vector<SpaceTimeField> standard_corpus(std::uint64_t seed) {
  TorusGrid g(1, 64);
  TimeGrid tg(1.0, 64);
  std::vector<SpaceTimeField> out;
  for (std::uint64_t i = 0; i < 10; ++i) out.push_back(random_smooth(g, tg, seed + i, 2.0));
  return out;
}

nlohmann::ordered_json to_json(const CriterionResult& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["suite"] = r.suite;
  j["title"] = r.title;
  j["pass"] = r.pass;
  j["budget_seconds"] = r.budget;
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["value"] = std::isfinite(c.value) ? nlohmann::ordered_json(c.value) : nlohmann::ordered_json(nullptr);
    cj["relation"] = c.relation;
    cj["limit"] = c.limit;
    cj["pass"] = c.pass;
    checks.push_back(cj);
  }
  return j;
}

std::string summary_line(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "%s %2d %-19s (%.1f s / %.0f s)", r.pass ? "PASS" : "FAIL", r.id,
                r.suite.c_str(), r.seconds, r.budget);
  std::string line = head;
  for (const auto& c : r.checks) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "\n       %s %s: %.6g %s %.6g", c.pass ? "ok  " : "FAIL", c.name.c_str(), c.value,
                  c.relation.c_str(), c.limit);
    line += buf;
  }
  if (r.seconds > r.budget) line += "\n       FAIL runtime over budget";
  return line;
}

} // namespace ergoham
