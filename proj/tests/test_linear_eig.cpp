#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ergoham/errors.hpp"
#include "ergoham/field_ops.hpp"
#include "ergoham/linear_eig.hpp"
#include "ergoham/recipes.hpp"
#include "oracles.hpp"

using namespace ergoham;
using std::numbers::pi;

namespace {

// Band-limited in time so that sampling at nt = 16 loses nothing.
double smooth_m(double t, double x) {
  return 0.8 * std::cos(2 * pi * x) * std::sin(2 * pi * t) + 0.5 * std::sin(4 * pi * x + 0.3) +
         0.3 * std::cos(2 * pi * (x - 2 * t)) + 0.2;
}

} // namespace

TEST_CASE("constant potential") {
  TorusGrid g(1, 32);
  TimeGrid tg(1.0, 16);
  OperatorParams p;
  auto r = parabolic_principal_eig(SpaceTimeField::constant(g, tg, 0.7), p);
  CHECK(r.lambda == doctest::Approx(-0.7).epsilon(1e-10).scale(1.0));
  CHECK((*r.field + (-1.0)).max_abs() < 1e-10);
  CHECK(r.form == EigenResult::Form::U);
}

TEST_CASE("time-independent potential gives the elliptic eigenvalue") {
  TorusGrid g(1, 64);
  auto m = static_potential(g);
  OperatorParams p;
  p.mu = p.eps = 0.5;
  const double xi = elliptic_xi(m, Hamiltonian::quadratic(), p).lambda;
  CHECK(parabolic_principal_eig(m, p).lambda == doctest::Approx(xi).epsilon(1e-8).scale(1.0));
  // the same static data broadcast on a genuine time grid
  auto mt = m.broadcast(TimeGrid(1.0, 16));
  CHECK(parabolic_principal_eig(mt, p).lambda == doctest::Approx(xi).epsilon(1e-8).scale(1.0));
}

TEST_CASE("dense monodromy oracle") {
  TorusGrid g(1, 16);
  for (double period : {1.0, 0.5}) {
    TimeGrid tg(period, 16);
    for (double tau : {1.0, 0.3}) {
      OperatorParams p;
      p.tau = tau;
      p.mu = p.eps = 0.1;
      auto mf = [&](double t, double x) { return smooth_m(t / period, x); };
      auto m = SpaceTimeField::sample(g, tg, [&](double t, double x, double) { return mf(t, x); });
      const double ref = oracle::monodromy_lambda(16, period, tau, 0.1, mf, 400);
      CHECK(parabolic_principal_eig(m, p).lambda == doctest::Approx(ref).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("random potentials against the dense monodromy oracle") {
  TorusGrid g(1, 16);
  TimeGrid tg(1.0, 16);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto m = random_smooth(g, tg, seed, 2.0);
    // random_smooth has time modes <= 2: its trigonometric interpolant is exact
    TimeInterpolant interp(m);
    std::vector<double> buf(16);
    auto mf = [&](double t, double x) {
      interp.evaluate(t, buf);
      return buf[static_cast<int>(std::lround(x * 16)) % 16];
    };
    OperatorParams p;
    const double ref = oracle::monodromy_lambda(16, 1.0, 1.0, 1.0, mf, 400);
    CHECK(parabolic_principal_eig(m, p).lambda == doctest::Approx(ref).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("elliptic eigenvalue") {
  TorusGrid g(1, 32);
  auto c = SpaceTimeField::constant(g, TimeGrid::stationary(), 1.5);
  CHECK(elliptic_xi(c, 1.0).lambda == doctest::Approx(-1.5).epsilon(1e-10).scale(1.0));

  auto mf = [](double x) { return std::exp(std::sin(2 * pi * x)) - 1.0 + 0.3 * std::cos(6 * pi * x); };
  auto m = SpaceTimeField::sample(g, TimeGrid::stationary(), [&](double, double x, double) { return mf(x); });
  for (double mu : {1.0, 0.1, 0.01}) {
    const double ref = oracle::elliptic_lambda(32, mu, mf);
    auto r = elliptic_xi(m, mu);
    CHECK(r.lambda == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
    CHECK(r.field->min() > 0.0);
    CHECK(r.residual < 1e-9);
    for (double shift : {-2.0, 0.5, 3.0})
      CHECK(elliptic_xi(m + shift, mu).lambda ==
            doctest::Approx(r.lambda - shift).epsilon(1e-10).scale(1.0));
  }
  CHECK_THROWS_AS(elliptic_xi(two_mode(g, TimeGrid(1.0, 16)), 1.0), ValidationError);
}

TEST_CASE("elliptic eigenvalue in two dimensions with advection") {
  TorusGrid g(2, 16);
  auto m = static_potential(g);
  OperatorParams p;
  p.mu = p.eps = 0.2;
  const double a[2] = {1.0, 0.5};
  p.advection = SpaceVectorField::constant(g, TimeGrid::stationary(), a);
  auto xi = elliptic_xi(m, Hamiltonian::quadratic(), p);
  CHECK(xi.field->min() > 0.0);
  // cross-check: the parabolic route on the same static operator
  CHECK(parabolic_principal_eig(m, p).lambda == doctest::Approx(xi.lambda).epsilon(1e-8).scale(1.0));
}

TEST_CASE("Hopf-Cole transform") {
  TorusGrid g(1, 16);
  TimeGrid tg(1.0, 8);
  CHECK(hopf_cole(SpaceTimeField::constant(g, tg, 1.0)).max_abs() == 0.0);
  auto u = random_smooth(g, tg, 9).map([](double v) { return std::exp(v); });
  u = u * (1.0 / std::sqrt(space_time_average(u * u)));
  CHECK((inverse_hopf_cole(hopf_cole(u)) - u).max_abs() < 1e-12);
  CHECK(std::abs(space_time_average(hopf_cole(u))) < 1e-12);
  CHECK_THROWS_AS(hopf_cole(u + (-10.0)), DomainError);
}

TEST_CASE("eigenfunction satisfies the quadratic cell problem") {
  TorusGrid g(1, 64);
  TimeGrid tg(1.0, 64);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto m = random_smooth(g, tg, seed, 2.0);
    OperatorParams p;
    auto r = parabolic_principal_eig(m, p);
    CHECK(std::abs(space_time_average(*r.field * *r.field) - 1.0) < 1e-10);
    auto phi = hopf_cole(*r.field);
    CHECK(quadratic_hj_residual(r.lambda, phi, m, p) <= 1e-5);
  }
}

TEST_CASE("basic bounds, direction symmetry and shift covariance") {
  TorusGrid g(1, 32);
  TimeGrid tg(1.0, 32);
  for (std::uint64_t seed = 11; seed <= 14; ++seed) {
    auto m = random_smooth(g, tg, seed, 1.5);
    for (double mu : {1.0, 0.2}) {
      OperatorParams p;
      p.mu = p.eps = mu;
      p.tau = 0.7;
      const double lf = parabolic_principal_eig(m, p).lambda;
      const double xi = elliptic_xi(time_average(m), mu).lambda;
      CHECK(lf > -m.max_abs());
      CHECK(lf < xi);
      p.direction = Direction::Backward;
      auto back = parabolic_principal_eig(m, p);
      CHECK(back.lambda == doctest::Approx(lf).epsilon(1e-8).scale(1.0));
      CHECK(parabolic_principal_eig(m + 0.37, p).lambda ==
            doctest::Approx(back.lambda - 0.37).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("grid refinement") {
  for (std::uint64_t seed : {3u, 4u}) {
    TorusGrid g1(1, 32), g2(1, 64);
    TimeGrid t1(1.0, 32), t2(1.0, 64);
    OperatorParams p;
    const double a = parabolic_principal_eig(random_smooth(g1, t1, seed, 2.0), p).lambda;
    const double b = parabolic_principal_eig(random_smooth(g2, t2, seed, 2.0), p).lambda;
    CHECK(std::abs(a - b) < 1e-6);
  }
}

TEST_CASE("linear route guards") {
  TorusGrid g(1, 16);
  TimeGrid tg(1.0, 8);
  OperatorParams p;
  p.eps = 0.5;
  CHECK_THROWS_AS(parabolic_principal_eig(random_smooth(g, tg, 1), p), ValidationError);
  p.eps = 1.0;
  CHECK_THROWS_AS(parabolic_principal_eig(random_smooth(g, tg, 1), Hamiltonian::power_law(4.0), p),
                  ValidationError);
  LinearOptions lo;
  lo.max_iters = 1;
  p.mu = p.eps = 0.01;
  CHECK_THROWS_AS(parabolic_principal_eig(random_smooth(g, tg, 1), p, lo), SolverError);
}
