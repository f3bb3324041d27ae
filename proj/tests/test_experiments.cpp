#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>

#include "ergoham/errors.hpp"
#include "ergoham/experiments.hpp"
#include "ergoham/field_ops.hpp"
#include "ergoham/recipes.hpp"

using namespace ergoham;
using std::numbers::pi;

TEST_CASE("heat cell problem: zero source and a single mode") {
  TorusGrid g(1, 32);
  TimeGrid tg(2.0, 32);
  CHECK(heat_cell_problem(SpaceTimeField::constant(g, tg, 3.0)).max_abs() == 0.0);

  auto m = SpaceTimeField::sample(g, tg, [](double t, double x, double) {
    return std::cos(2 * pi * t / 2.0) * std::sin(2 * pi * x);
  });
  for (Direction d : {Direction::Forward, Direction::Backward}) {
    const double sgn = d == Direction::Forward ? 1.0 : -1.0;
    const double w = 2 * pi / 2.0;
    // sgn a' + 4 pi^2 a = -cos(w t)
    const std::complex<double> c = -1.0 / std::complex<double>(4 * pi * pi, sgn * w);
    auto exact = SpaceTimeField::sample(g, tg, [&](double t, double x, double) {
      return (c * std::exp(std::complex<double>(0.0, w * t))).real() * std::sin(2 * pi * x);
    });
    CHECK((heat_cell_problem(m, d) - exact).max_abs() < 1e-10);
  }
}

TEST_CASE("heat cell problem: residual and time symmetry") {
  TorusGrid g(1, 48);
  TimeGrid tg(1.0, 32);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto m = random_smooth(g, tg, seed, 2.0);
    const double tau = 0.7, mu = 1.3;
    auto psi = heat_cell_problem(m, Direction::Forward, tau, mu);
    auto r = time_derivative(psi) * tau - laplacian(psi) * mu + m + (-space_time_average(m));
    CHECK(r.max_abs() < 1e-10);
    CHECK(std::abs(space_time_average(psi)) < 1e-14);
    auto th = heat_cell_problem(m, Direction::Backward, tau, mu);
    auto rb = time_derivative(th) * (-tau) - laplacian(th) * mu + m + (-space_time_average(m));
    CHECK(rb.max_abs() < 1e-10);
  }
  auto ms = time_symmetric(g, tg);
  CHECK((heat_cell_problem(ms, Direction::Backward) - heat_cell_problem(ms).time_reversed()).max_abs() < 1e-10);
}

TEST_CASE("frequency sweep: separable, static and traveling potentials") {
  TorusGrid g(1, 32);
  TimeGrid tg(1.0, 32);
  const auto taus = geometric_grid(1e-2, 1e2, 5);
  auto sep = sweep_frequency(separable(g, tg), taus, Hamiltonian::quadratic(), OperatorParams{});
  CHECK(sep.get("separable") == 1.0);
  CHECK(sep.get("flatness") < 1e-7);
  // xi(m0) - avg h with avg h = 0
  const double xi0 = elliptic_xi(time_average(separable(g, tg)), 1.0).lambda;
  for (double l : sep.lambda) CHECK(l == doctest::Approx(xi0).epsilon(1e-7).scale(1.0));

  auto st = sweep_frequency(static_potential(g), taus, Hamiltonian::power_law(4.0), OperatorParams{});
  CHECK(st.get("flatness") == 0.0);
  CHECK(st.lambda.front() == doctest::Approx(st.get("limit_high")).epsilon(1e-12));

  auto tb = sweep_frequency(traveling_bump(g, tg), geometric_grid(1e-2, 1e2, 9), Hamiltonian::quadratic(),
                            OperatorParams{});
  CHECK(tb.get("monotone") == 1.0);
  CHECK(tb.get("gaps_shrinking") == 1.0);
  CHECK(tb.get("bounds_ok") == 1.0);
  for (std::size_t i = 1; i < tb.lambda.size(); ++i) CHECK(tb.lambda[i] > tb.lambda[i - 1]);
  const double scale = traveling_bump(g, tg).max_abs();
  CHECK(std::abs(tb.lambda.back() - tb.get("limit_high")) <= 0.02 * std::max(std::abs(tb.get("limit_high")), scale));
  CHECK(std::abs(tb.lambda.front() - tb.get("limit_low")) <= 0.02 * std::abs(tb.get("limit_low")));
  CHECK(tb.column("monotone_ok").size() == 9);
}

TEST_CASE("diffusion sweep: limits and the non-monotonicity certificate") {
  TorusGrid g(1, 32);
  auto st = static_potential(g);
  auto r = sweep_diffusion(st, {1e-1, 1.0}, Hamiltonian::quadratic(), OperatorParams{});
  CHECK(r.get("limit_low") == -st.max());
  CHECK(r.get("limit_high") == doctest::Approx(-space_time_average(st)).scale(1.0));
  CHECK(r.get("non_monotone") == 0.0);

  TorusGrid g2(1, 128);
  TimeGrid tg(0.1, 64);
  auto [m, amp] = carrere_nadin_bump(g2, tg, Hamiltonian::quadratic());
  CHECK(amp == 16.0);
  auto cn = sweep_diffusion(m, {1e-2, 1.0, 1e2}, Hamiltonian::quadratic(), OperatorParams{});
  CHECK(cn.lambda[0] >= -0.1);
  CHECK(cn.lambda[1] <= -1.0);
  CHECK(cn.lambda[2] >= -0.1);
  CHECK(cn.get("non_monotone") == 1.0);
  CHECK(cn.get("cert_j") == 1.0);
  CHECK(cn.get("bounds_ok") == 1.0);
}

TEST_CASE("large heat slope") {
  TorusGrid g(1, 48);
  TimeGrid tg(1.0, 24);
  const std::vector<double> eps{0.08, 0.04, 0.02, 0.01};
  auto c = large_heat_slope(SpaceTimeField::constant(g, tg, 0.4), eps, Hamiltonian::quadratic(), OperatorParams{});
  CHECK(c.get("prediction") == 0.0);
  for (double s : c.column("slope")) CHECK(std::abs(s) < 1e-10);

  auto m = random_smooth(g, tg, 3, 20.0);
  auto q = large_heat_slope(m, eps, Hamiltonian::quadratic(), OperatorParams{});
  CHECK(q.get("rel_error") < 0.02);
  CHECK(q.get("min_error_ratio") >= 1.8);
  // the quadratic route and the relaxation agree on the slope
  SolveSettings relax;
  relax.linear_route = false;
  auto qr = large_heat_slope(m, {0.04, 0.02}, Hamiltonian::quadratic(), OperatorParams{}, relax);
  CHECK(qr.column("slope")[1] == doctest::Approx(q.column("slope")[2]).epsilon(1e-4));

  auto r4 = large_heat_slope(m, eps, Hamiltonian::power_law(4.0), OperatorParams{});
  CHECK(r4.get("rel_error") < 0.05);
  CHECK(r4.get("min_error_ratio") >= 1.8);
}

TEST_CASE("crest bound and amplitude probe") {
  TorusGrid g(1, 64);
  TimeGrid tg(1.0, 32);
  const auto h = Hamiltonian::quadratic();
  // the bound grows as eps shrinks and approaches the crest value
  const auto b1 = crest_bound(1.0, 2.0, 1.0, h, 0.25, 0.25, 64);
  const auto b2 = crest_bound(1.0, 2.0, 1.0, h, 0.0625, 0.25, 64);
  CHECK(b1.bound > 0.0);
  CHECK(b2.bound > b1.bound);
  CHECK(b2.bound < 2.0 * (std::exp(1.0) - std::cyl_bessel_i(0.0, 1.0)));
  auto r = amplitude_probe(g, tg, 1.0, 2.0, {0.25, 0.125, 0.0625}, h);
  CHECK(r.get("plateau_ok") == 1.0);
  CHECK(r.get("c") == doctest::Approx(b1.bound));
  for (std::size_t i = 0; i < 3; ++i) CHECK(r.column("eps_lambda")[i] <= -r.column("crest_bound")[i]);
}

TEST_CASE("static potential: lambda(m/eps) matches the elliptic eigenvalue and blows up") {
  TorusGrid g(1, 64);
  auto m = static_potential(g);
  double prev = 0.0;
  for (double e : {0.5, 0.25, 0.125}) {
    const double lam = principal_eigenvalue(m * (1.0 / e), Hamiltonian::quadratic(), OperatorParams{}).lambda;
    CHECK(lam == doctest::Approx(elliptic_xi(m * (1.0 / e), 1.0).lambda).epsilon(1e-10));
    CHECK(lam < prev);
    prev = lam;
  }
}

TEST_CASE("crest-free potential: eps lambda stays bounded") {
  TorusGrid g(1, 32);
  TimeGrid tg(1.0, 32);
  // max_x m(t, .) = 0 at every time, so the blow-up assumption fails:
  // 0 <= eps lambda(m/eps) <= -avg m = 1/2 for every eps
  auto m = SpaceTimeField::sample(g, tg, [](double t, double x, double) {
    const double s = std::sin(2 * pi * (x - t));
    return -s * s;
  });
  for (double e : {0.25, 0.125, 0.0625}) {
    const double el = e * principal_eigenvalue(m * (1.0 / e), Hamiltonian::quadratic(), OperatorParams{}).lambda;
    CHECK(el >= -1e-12);
    CHECK(el <= 0.5 + 1e-12);
  }
  auto zero = SpaceTimeField::constant(g, tg, 0.0);
  CHECK(principal_eigenvalue(zero * 16.0, Hamiltonian::quadratic(), OperatorParams{}).lambda == 0.0);
}

TEST_CASE("reversibility probe") {
  TorusGrid g(1, 48);
  TimeGrid tg(1.0, 24);
  const std::vector<double> eps{0.5, 0.25};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto rep = reversibility_probe(Hamiltonian::quadratic(), random_smooth(g, tg, seed, 2.0), eps, OperatorParams{});
    CHECK(rep.max_lambda_gap <= 1e-7);
  }
  auto sym = reversibility_probe(Hamiltonian::power_law(4.0), time_symmetric(g, tg, 3.0), eps, OperatorParams{});
  CHECK(sym.max_lambda_gap <= 1e-7);

  auto rep = reversibility_probe(Hamiltonian::power_law(4.0), two_mode(g, tg), {0.08, 0.04, 0.02, 0.01},
                                 OperatorParams{}, {}, std::pair{1, 3});
  REQUIRE(rep.modes);
  CHECK(rep.modes->forward == doctest::Approx(rep.prediction_plus).epsilon(1e-10));
  CHECK(rep.modes->backward == doctest::Approx(rep.prediction_minus).epsilon(1e-10));
  CHECK(std::abs(rep.modes->forward - rep.modes->backward) > 1e-6);
  CHECK(std::abs(rep.slope_plus - rep.slope_minus) >= 10.0 * rep.slope_tolerance);
  // quadratic H has no mode-level gap
  auto mq = two_mode_integrals(Hamiltonian::quadratic(), 1.0, 1, 3, 1.0, 1.0, 1.0);
  CHECK(mq.forward == doctest::Approx(mq.backward).epsilon(1e-12));
}

TEST_CASE("advection flows") {
  CHECK(near_irrational_slope(48) == std::pair{41, 29});
  CHECK(near_irrational_slope(16) == std::pair{17, 12});
  TorusGrid g(2, 16);
  CHECK_THROWS_AS(make_flow(Flow::Shear, g), ValidationError);
  CHECK(make_flow(Flow::Shear, g, true).max_norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(make_flow(Flow::Rational, TorusGrid(1, 16)), ValidationError);
  CHECK(flow_from_string("near_irrational") == Flow::NearIrrational);
  CHECK_THROWS_AS(flow_from_string("diagonal"), ConfigError);

  auto m = SpaceTimeField::sample(g, TimeGrid::stationary(), [](double, double x, double y) {
    return std::sin(2 * pi * x) + std::cos(2 * pi * y);
  });
  auto z = advection_limit(m, Flow::Zero, {0.05}, Hamiltonian::quadratic());
  CHECK(z.get("limit") == -m.max());
  auto r = advection_limit(m, Flow::Rational, {0.05}, Hamiltonian::quadratic());
  CHECK(r.get("limit") == doctest::Approx(-1.0));
  CHECK(r.lambda[0] > -1.0);
  auto ir = advection_limit(m, Flow::NearIrrational, {0.05}, Hamiltonian::quadratic());
  CHECK(std::abs(ir.get("limit")) < 1e-14);
  auto sh = advection_limit(m, Flow::Shear, {0.05}, Hamiltonian::quadratic(), {}, true);
  CHECK(std::isnan(sh.get("limit")));
}

TEST_CASE("quadratic rescaling matches the relaxation") {
  TorusGrid g(1, 48);
  TimeGrid tg(1.0, 24);
  auto m = random_smooth(g, tg, 11, 2.0);
  OperatorParams p;
  p.mu = 0.5;
  p.eps = 1.7;
  SolveSettings relax;
  relax.linear_route = false;
  const auto h = Hamiltonian::quadratic(0.6);
  CHECK(principal_eigenvalue(m, h, p).lambda ==
        doctest::Approx(principal_eigenvalue(m, h, p, relax).lambda).epsilon(1e-7));
}

TEST_CASE("parallel sweeps are deterministic and report the first failure") {
  TorusGrid g(1, 32);
  TimeGrid tg(1.0, 16);
  auto m = traveling_bump(g, tg);
  SolveSettings one, four;
  four.workers = 4;
  const auto taus = geometric_grid(0.1, 10.0, 6);
  auto a = sweep_frequency(m, taus, Hamiltonian::power_law(3.0), OperatorParams{}, one);
  auto b = sweep_frequency(m, taus, Hamiltonian::power_law(3.0), OperatorParams{}, four);
  CHECK(a.lambda == b.lambda);

  std::vector<int> hit(10, 0);
  CHECK_THROWS_WITH(parallel_for(10, 3,
                                 [&](int i) {
                                   hit[i] = 1;
                                   if (i == 4 || i == 7) throw SolverError("entry " + std::to_string(i), {});
                                 }),
                    "entry 4");
  for (int v : hit) CHECK(v == 1);

  setenv("ERGOHAM_WORKERS", "2", 1);
  CHECK(worker_count(8) == 2);
  setenv("ERGOHAM_WORKERS", "zero", 1);
  CHECK_THROWS_AS(worker_count(8), ConfigError);
  unsetenv("ERGOHAM_WORKERS");
  CHECK(worker_count(3) == 3);
}

TEST_CASE("sweep validation") {
  TorusGrid g(1, 16);
  TimeGrid tg(1.0, 8);
  auto m = traveling_bump(g, tg);
  CHECK_THROWS_AS(sweep_frequency(m, {1.0, 0.5}, Hamiltonian::quadratic(), OperatorParams{}), ValidationError);
  CHECK_THROWS_AS(large_heat_slope(m, {0.01, 0.02}, Hamiltonian::quadratic(), OperatorParams{}), ValidationError);
  CHECK_THROWS_AS(geometric_grid(0.0, 1.0, 3), ValidationError);
  const auto grid = geometric_grid(1e-2, 1e2, 9);
  CHECK(grid.front() == 1e-2);
  CHECK(grid.back() == 1e2);
  CHECK(grid[4] == doctest::Approx(1.0));
}
