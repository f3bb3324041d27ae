#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ergoham/cell_solver.hpp"
#include "ergoham/errors.hpp"
#include "ergoham/field_ops.hpp"
#include "ergoham/recipes.hpp"
#include "ergoham/variational.hpp"

using namespace ergoham;
using std::numbers::pi;

namespace {

struct Saddle {
  SpaceTimeField m;
  Hamiltonian h;
  OperatorParams p;
  EigenResult eig;
  InvariantMeasure eta;
};

Saddle solve(const SpaceTimeField& m, const Hamiltonian& h, const OperatorParams& p) {
  auto sol = effective_hamiltonian(m, h, p);
  auto eta = invariant_for_solution(sol.eig, h, p);
  return {m, h, p, sol.eig, eta};
}

SpaceTimeField sin_x(const TorusGrid& g, const TimeGrid& t) {
  return SpaceTimeField::sample(g, t, [](double, double x, double) { return std::sin(2 * pi * x); });
}

} // namespace

TEST_CASE("trivial values") {
  TorusGrid g(1, 32);
  TimeGrid tg(1.0, 16);
  auto m = SpaceTimeField::constant(g, tg, 0.75);
  const double zero[1] = {0.0};
  auto eta = invariant_for_drift(SpaceVectorField::constant(g, tg, zero), OperatorParams{});
  auto zphi = SpaceTimeField::constant(g, tg, 0.0);
  CHECK(dv_value(zphi, eta, m, Hamiltonian::quadratic(), OperatorParams{}) == doctest::Approx(0.75));
  CHECK(control_value(SpaceVectorField::constant(g, tg, zero), m, Hamiltonian::power_law(3.0), OperatorParams{}) ==
        doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("saddle value and constant invariance") {
  TorusGrid g(1, 64);
  TimeGrid tg(1.0, 32);
  OperatorParams p;
  p.mu = 0.2;
  p.eps = 0.5;
  for (const auto& h : {Hamiltonian::quadratic(), Hamiltonian::power_law(4.0), Hamiltonian::power_law(3.0)}) {
    auto s = solve(traveling_bump(g, tg), h, p);
    const auto& phi = *s.eig.field;
    const double v = dv_value(phi, s.eta, s.m, h, p);
    CHECK(std::abs(v + s.eig.lambda) < 1e-7);
    CHECK(std::abs(dv_value(phi + 3.5, s.eta, s.m, h, p) - v) < 1e-13);
    CHECK(std::abs(dv_gap(phi, s.eig, s.eta, s.m, h, p).gap) < 1e-7);
  }
}

TEST_CASE("quadratic gap equals the closed-form remainder") {
  TorusGrid g(1, 64);
  TimeGrid tg(1.0, 32);
  OperatorParams p;
  p.mu = 0.2;
  p.eps = 0.6;
  const auto h = Hamiltonian::quadratic();
  auto s = solve(random_smooth(g, tg, 2, 1.5), h, p);
  const auto w = sin_x(g, tg);
  auto cos2 = SpaceTimeField::sample(g, tg, [](double, double x, double) { return std::pow(std::cos(2 * pi * x), 2); });
  const double c2 = integrate_against(cos2, s.eta.density);
  std::vector<double> ratios;
  for (double delta : {1e-2, 5e-3, 2.5e-3, 0.3}) {
    auto r = dv_gap(*s.eig.field + w * delta, s.eig, s.eta, s.m, h, p);
    const double exact = p.eps * delta * delta * 4 * pi * pi * c2;
    CHECK(std::abs(r.gap - exact) < 1e-6);
    CHECK(std::abs(r.gap - r.quadratic_form) < 1e-6);
    CHECK(r.gap >= -1e-8);
    if (delta < 0.1) ratios.push_back(r.gap / (delta * delta));
  }
  for (double q : ratios) CHECK(std::abs(q / ratios.front() - 1.0) < 0.05);
}

TEST_CASE("anisotropic remainder in two dimensions") {
  TorusGrid g(2, 24);
  TimeGrid tg(1.0, 16);
  OperatorParams p;
  p.mu = 0.3;
  p.eps = 0.5;
  const auto h = Hamiltonian::anisotropic({1.0, 2.0});
  auto s = solve(traveling_bump(g, tg), h, p);
  auto w = SpaceTimeField::sample(g, tg, [](double t, double x, double y) {
    return std::sin(2 * pi * (x + y)) * std::cos(2 * pi * t);
  });
  auto r = dv_gap(*s.eig.field + w * 0.1, s.eig, s.eta, s.m, h, p);
  CHECK(std::abs(r.gap - r.quadratic_form) < 1e-6);
  CHECK(r.gap > 0.0);
}

TEST_CASE("power law perturbations never lower the value") {
  TorusGrid g(1, 48);
  TimeGrid tg(1.0, 24);
  OperatorParams p;
  p.mu = 0.25;
  p.eps = 0.5;
  const auto h = Hamiltonian::power_law(4.0);
  auto s = solve(random_smooth(g, tg, 7, 1.0), h, p);
  auto r0 = dv_gap(*s.eig.field, s.eig, s.eta, s.m, h, p);
  CHECK(std::isnan(r0.quadratic_form));
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const double amp = 0.02 * static_cast<double>(1 + seed % 5);
    auto phi = *s.eig.field + random_smooth(g, tg, 1000 + seed, amp);
    CHECK(dv_gap(phi, s.eig, s.eta, s.m, h, p).gap >= -1e-8);
  }
}

TEST_CASE("optimal control attains -lambda and random controls stay below") {
  TorusGrid g(1, 48);
  TimeGrid tg(1.0, 24);
  OperatorParams p;
  p.mu = 0.25;
  p.eps = 0.5;
  for (const auto& h : {Hamiltonian::quadratic(), Hamiltonian::power_law(3.0)}) {
    auto s = solve(traveling_bump(g, tg), h, p);
    auto b = optimal_drift(*s.eig.field, h, p);
    CHECK(std::abs(control_value(b, s.m, h, p) + s.eig.lambda) < 1e-6);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto a = random_smooth(g, tg, 500 + seed, 0.5 + 0.1 * static_cast<double>(seed));
      CHECK(control_value(SpaceVectorField({a}), s.m, h, p) <= -s.eig.lambda + 1e-7);
    }
  }
}

TEST_CASE("control value needs positive eps") {
  TorusGrid g(1, 16);
  TimeGrid tg(1.0, 8);
  OperatorParams p;
  p.eps = 0.0;
  const double zero[1] = {0.0};
  CHECK_THROWS_AS(control_value(SpaceVectorField::constant(g, tg, zero), SpaceTimeField::constant(g, tg, 1.0),
                                Hamiltonian::quadratic(), p),
                  ValidationError);
}
