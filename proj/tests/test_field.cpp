#include <doctest.h>

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <filesystem>
#include <numbers>
#include <random>

#include "ergoham/errors.hpp"
#include "ergoham/field_io.hpp"
#include "ergoham/field_ops.hpp"

using namespace ergoham;
using std::numbers::pi;

namespace {

double max_diff(const SpaceTimeField& a, const SpaceTimeField& b) { return (a - b).max_abs(); }

// Smooth random trigonometric polynomial in (t, x, y), low modes only.
SpaceTimeField random_smooth(const TorusGrid& g, const TimeGrid& tg, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<std::array<double, 6>> terms;
  for (int i = 0; i < 6; ++i)
    terms.push_back({nd(rng), double(rng() % 4), double(rng() % 3), double(rng() % 3),
                     nd(rng), nd(rng)});
  return SpaceTimeField::sample(g, tg, [&](double t, double x, double y) {
    double s = 0;
    for (auto& c : terms)
      s += c[0] * std::cos(2 * pi * (c[1] * x + c[2] * y + c[3] * t / tg.period()) + c[4]);
    return s;
  });
}

} // namespace

TEST_CASE("grids validate their sizes") {
  CHECK_THROWS_AS(TorusGrid(1, 4), ValidationError);
  CHECK_THROWS_AS(TorusGrid(3, 16), ValidationError);
  CHECK_THROWS_AS(TorusGrid(1, 14), ValidationError);
  CHECK_NOTHROW(TorusGrid(2, 48));
  CHECK_THROWS_AS(TimeGrid(1.0, 4), ValidationError);
  CHECK_THROWS_AS(TimeGrid(-1.0, 16), ValidationError);
  TorusGrid g(1, 16);
  CHECK(g.h() * g.n() == 1.0);
  TimeGrid tg(2.0, 8);
  CHECK(tg.t(3) == doctest::Approx(0.75));
}

TEST_CASE("fields reject non-finite values and wrap indices") {
  TorusGrid g(1, 8);
  TimeGrid tg(1.0, 8);
  std::vector<double> v(64, 0.0);
  v[5] = std::nan("");
  CHECK_THROWS_AS(SpaceTimeField(g, tg, v), ValidationError);
  auto f = SpaceTimeField::sample(g, tg, [](double t, double x, double) { return t + 10 * x; });
  CHECK(f(-1, 2) == f(7, 2));
  CHECK(f(9, 0) == f(1, 0));
}

TEST_CASE("gradient and laplacian annihilate constants") {
  for (auto b : {Backend::Spectral, Backend::FiniteDifference}) {
    TorusGrid g(2, 16);
    TimeGrid tg(1.0, 8);
    auto f = SpaceTimeField::constant(g, tg, 5.0);
    auto gr = gradient(f, b);
    CHECK(gr[0].max_abs() == 0.0);
    CHECK(gr[1].max_abs() == 0.0);
    CHECK(laplacian(f, b).max_abs() == 0.0);
  }
}

TEST_CASE("spectral derivatives of trigonometric modes") {
  TorusGrid g(1, 64);
  TimeGrid tg(1.0, 8);
  auto f = SpaceTimeField::sample(g, tg, [](double, double x, double) { return std::sin(2 * pi * x); });
  auto expect = SpaceTimeField::sample(g, tg, [](double, double x, double) { return 2 * pi * std::cos(2 * pi * x); });
  CHECK(max_diff(gradient(f)[0], expect) < 1e-12);

  auto c = SpaceTimeField::sample(g, tg, [](double, double x, double) { return std::cos(2 * pi * x); });
  CHECK(max_diff(laplacian(c), c * (-4 * pi * pi)) < 1e-10);

  TorusGrid g2(2, 32);
  auto f2 = SpaceTimeField::sample(g2, tg, [](double, double x, double y) {
    return std::sin(2 * pi * x) * std::cos(4 * pi * y);
  });
  CHECK(max_diff(laplacian(f2), f2 * (-20 * pi * pi)) < 1e-9);
}

TEST_CASE("pure modes below Nyquist are differentiated exactly") {
  TorusGrid g(2, 16);
  auto tg = TimeGrid::stationary();
  for (int k0 = -7; k0 <= 7; ++k0) {
    for (int k1 = -7; k1 <= 7; k1 += 2) {
      auto f = SpaceTimeField::sample(g, tg, [&](double, double x, double y) {
        return std::cos(2 * pi * (k0 * x + k1 * y)) + 0.5 * std::sin(2 * pi * (k0 * x + k1 * y));
      });
      auto fx = SpaceTimeField::sample(g, tg, [&](double, double x, double y) {
        const double a = 2 * pi * (k0 * x + k1 * y);
        return 2 * pi * k0 * (-std::sin(a) + 0.5 * std::cos(a));
      });
      const double scale = 1.0 + 4 * pi * pi * (k0 * k0 + k1 * k1);
      CHECK(max_diff(gradient(f)[0], fx) <= 1e-12 * scale);
      CHECK(max_diff(laplacian(f), f * (-4 * pi * pi * (k0 * k0 + k1 * k1))) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("finite-difference gradient converges at second order") {
  auto err = [](int n) {
    TorusGrid g(1, n);
    auto tg = TimeGrid::stationary();
    auto f = SpaceTimeField::sample(g, tg, [](double, double x, double) { return std::exp(std::sin(2 * pi * x)); });
    auto df = SpaceTimeField::sample(g, tg, [](double, double x, double) {
      return 2 * pi * std::cos(2 * pi * x) * std::exp(std::sin(2 * pi * x));
    });
    return max_diff(gradient(f, Backend::FiniteDifference)[0], df);
  };
  const double e1 = err(64), e2 = err(128);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));

  TorusGrid g(1, 64);
  auto tg = TimeGrid::stationary();
  auto f = SpaceTimeField::sample(g, tg, [](double, double x, double) { return std::exp(std::sin(2 * pi * x)); });
  auto df = SpaceTimeField::sample(g, tg, [](double, double x, double) {
    return 2 * pi * std::cos(2 * pi * x) * std::exp(std::sin(2 * pi * x));
  });
  CHECK(max_diff(gradient(f)[0], df) < 1e-11);
}

TEST_CASE("discrete divergence theorem") {
  TorusGrid g(2, 16);
  TimeGrid tg(1.5, 8);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    auto f = random_smooth(g, tg, seed).map([](double v) { return std::exp(0.3 * v); });
    for (auto b : {Backend::Spectral, Backend::FiniteDifference}) {
      CHECK(std::abs(space_time_average(laplacian(f, b))) < 1e-12);
      auto gr = gradient(f, b);
      for (int k = 0; k < tg.steps(); ++k) {
        CHECK(std::abs(slice_average(gr[0], k)) < 1e-12);
        CHECK(std::abs(slice_average(gr[1], k)) < 1e-12);
      }
      CHECK(std::abs(space_time_average(divergence(gr, b))) < 1e-12);
    }
  }
}

TEST_CASE("averages") {
  TorusGrid g(1, 32);
  TimeGrid tg(2.0, 16);
  CHECK(space_time_average(SpaceTimeField::constant(g, tg, 3.0)) == doctest::Approx(3.0));
  auto s = SpaceTimeField::sample(g, tg, [](double, double x, double) { return std::sin(2 * pi * x); });
  CHECK(std::abs(space_time_average(s)) < 1e-15);
  auto q = SpaceTimeField::sample(g, tg, [&](double t, double x, double) {
    const double a = std::sin(2 * pi * x), b = std::cos(2 * pi * t / tg.period());
    return a * a * b * b;
  });
  CHECK(space_time_average(q) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(integrate(q) == doctest::Approx(0.5).epsilon(1e-14));

  auto c = SpaceTimeField::constant(g, tg, -1.25);
  for (int k = 0; k < tg.steps(); ++k) CHECK(slice_average(c, k) == -1.25);

  auto gc = SpaceTimeField::sample(g, tg, [&](double t, double x, double) {
    return std::exp(std::cos(2 * pi * x)) * std::cos(2 * pi * t / tg.period());
  });
  CHECK(time_average(gc).max_abs() < 1e-14);
}

TEST_CASE("traveling bump has a constant time average") {
  // Shift-invariance oracle: averaging g(x - t/T) over nt equally spaced shifts
  // that are multiples of the grid spacing gives the spatial mean of g.
  TorusGrid g(1, 64);
  TimeGrid tg(1.0, 64);
  auto bump = [](double x) { return std::exp(std::cos(2 * pi * x)); };
  auto m = SpaceTimeField::sample(g, tg, [&](double t, double x, double) { return bump(x - t); });
  double mean = 0;
  for (int i = 0; i < 64; ++i) mean += bump(i / 64.0) / 64.0;
  auto avg = time_average(m);
  CHECK(avg.is_stationary());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(avg(0, i) == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("spectral time derivative") {
  TorusGrid g(1, 16);
  TimeGrid tg(3.0, 16);
  auto f = SpaceTimeField::sample(g, tg, [&](double t, double x, double) {
    return std::sin(2 * pi * x) * std::sin(4 * pi * t / 3.0) + std::cos(2 * pi * t / 3.0);
  });
  auto df = SpaceTimeField::sample(g, tg, [&](double t, double x, double) {
    return std::sin(2 * pi * x) * (4 * pi / 3.0) * std::cos(4 * pi * t / 3.0) -
           (2 * pi / 3.0) * std::sin(2 * pi * t / 3.0);
  });
  CHECK(max_diff(time_derivative(f), df) < 1e-12);
  CHECK(time_derivative(f.frozen(2)).max_abs() == 0.0);
}

TEST_CASE("time interpolation reproduces nodes and band-limited signals") {
  TorusGrid g(1, 8);
  TimeGrid tg(2.0, 8);
  auto f = SpaceTimeField::sample(g, tg, [](double t, double x, double) {
    return std::cos(pi * t) * x + std::sin(2 * pi * t);
  });
  TimeInterpolant it(f);
  std::vector<double> out(8);
  it.evaluate(tg.t(3), out);
  for (int i = 0; i < 8; ++i) CHECK(out[i] == doctest::Approx(f(3, i)).epsilon(1e-13));
  it.evaluate(0.3, out);
  for (int i = 0; i < 8; ++i)
    CHECK(out[i] == doctest::Approx(std::cos(pi * 0.3) * i / 8.0 + std::sin(2 * pi * 0.3)).epsilon(1e-13));
}

TEST_CASE("time reversal") {
  TorusGrid g(1, 8);
  TimeGrid tg(1.0, 8);
  auto f = SpaceTimeField::sample(g, tg, [](double t, double x, double) { return t * t + x; });
  auto r = f.time_reversed();
  for (int k = 0; k < 8; ++k)
    for (std::size_t i = 0; i < 8; ++i) CHECK(r(k, i) == f(-k, i));
  CHECK(max_diff(r.time_reversed(), f) == 0.0);
}

TEST_CASE("ERGH files round-trip bit-exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "ergoham_test_io";
  std::filesystem::create_directories(dir);
  for (int dim : {1, 2}) {
    TorusGrid g(dim, 16);
    TimeGrid tg(0.7, 8);
    auto f = random_smooth(g, tg, 42 + dim).map([](double v) { return v / 3.0; });
    write_ergh(dir / "f.ergh", f);
    auto back = read_ergh(dir / "f.ergh");
    CHECK(back.space() == f.space());
    CHECK(back.time() == f.time());
    CHECK(std::memcmp(back.values().data(), f.values().data(), f.values().size() * 8) == 0);

    auto s = f.frozen(3);
    write_ergh(dir / "s.ergh", s);
    auto sb = read_ergh(dir / "s.ergh");
    CHECK(sb.is_stationary());
    CHECK(std::memcmp(sb.values().data(), s.values().data(), s.values().size() * 8) == 0);
  }
  {
    std::ofstream os(dir / "bad.ergh", std::ios::binary);
    os << "NOPE";
  }
  CHECK_THROWS_AS(read_ergh(dir / "bad.ergh"), ValidationError);
  std::filesystem::remove_all(dir);
}
