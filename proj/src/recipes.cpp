#include "ergoham/recipes.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "ergoham/errors.hpp"

namespace ergoham {

using std::numbers::pi;

double bump_profile(double x, double kappa, double amplitude) {
  return amplitude * (std::exp(kappa * std::cos(2 * pi * x)) - std::cyl_bessel_i(0.0, kappa));
}

SpaceTimeField traveling_bump(const TorusGrid& g, const TimeGrid& t, double kappa, double amplitude) {
  if (!(kappa > 0.0)) throw ValidationError("traveling_bump: kappa must be positive");
  const double period = t.period();
  const bool two_d = g.dim() == 2;
  return SpaceTimeField::sample(g, t, [&](double s, double x, double y) {
    const double v = bump_profile(x - s / period, kappa, amplitude);
    return two_d ? v * std::cos(2 * pi * y) : v;
  });
}

SpaceTimeField separable(const TorusGrid& g, const TimeGrid& t, double amplitude) {
  const double period = t.period();
  const bool two_d = g.dim() == 2;
  return SpaceTimeField::sample(g, t, [&](double s, double x, double y) {
    double m0 = std::cos(2 * pi * x) + 0.5 * std::sin(4 * pi * x);
    if (two_d) m0 += std::cos(2 * pi * y);
    return amplitude * (m0 + std::sin(2 * pi * s / period));
  });
}

SpaceTimeField time_symmetric(const TorusGrid& g, const TimeGrid& t, double amplitude) {
  const double period = t.period();
  const bool two_d = g.dim() == 2;
  return SpaceTimeField::sample(g, t, [&](double s, double x, double y) {
    const double w = 2 * pi * s / period;
    double v = std::cos(2 * pi * x) * (1.0 + std::cos(w)) + 0.5 * std::sin(4 * pi * x) * std::cos(2 * w);
    if (two_d) v += std::sin(2 * pi * (x + y)) * std::cos(w);
    return amplitude * v;
  });
}

SpaceTimeField two_mode(const TorusGrid& g, const TimeGrid& t, double amplitude, int j, int l) {
  const double period = t.period();
  return SpaceTimeField::sample(g, t, [&](double s, double x, double) {
    const double w = 2 * pi * s / period;
    return amplitude * (std::cos(w) * std::sin(2 * pi * j * x) + std::sin(w) * std::sin(2 * pi * l * x));
  });
}

SpaceTimeField static_potential(const TorusGrid& g, double amplitude) {
  const bool two_d = g.dim() == 2;
  return SpaceTimeField::sample(g, TimeGrid::stationary(), [&](double, double x, double y) {
    double v = std::cos(2 * pi * x) + 0.5 * std::sin(4 * pi * x);
    if (two_d) v += std::cos(2 * pi * y);
    return amplitude * v;
  });
}

SpaceTimeField random_smooth(const TorusGrid& g, const TimeGrid& t, std::uint64_t seed,
                             double amplitude) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> phase(0.0, 2 * pi);
  struct Term {
    int kx, ky, kt;
    double a, ph;
  };
  std::vector<Term> terms;
  const int ky_max = g.dim() == 2 ? 3 : 0;
  const int kt_max = t.is_stationary() ? 0 : 2;
  for (int kx = 0; kx <= 3; ++kx)
    for (int ky = -ky_max; ky <= ky_max; ++ky)
      for (int kt = -kt_max; kt <= kt_max; ++kt) {
        const double k = std::sqrt(double(kx * kx + ky * ky)) + std::abs(kt);
        terms.push_back({kx, ky, kt, normal(rng) * std::exp(-0.5 * k), phase(rng)});
      }
  const double period = t.period();
  auto f = SpaceTimeField::sample(g, t, [&](double s, double x, double y) {
    double v = 0.0;
    for (const auto& c : terms)
      v += c.a * std::cos(2 * pi * (c.kx * x + c.ky * y + c.kt * s / period) + c.ph);
    return v;
  });
  double total = 0.0;
  for (const auto& c : terms) total += std::abs(c.a);
  return f * (amplitude / total);
}

SpaceTimeField make_potential(const std::string& name, const std::map<std::string, double>& params,
                              const TorusGrid& g, const TimeGrid& t) {
  auto allowed = [&](std::set<std::string> keys) {
    for (const auto& [k, v] : params)
      if (!keys.count(k)) throw ConfigError("potential '" + name + "' has no parameter '" + k + "'");
  };
  auto get = [&](const std::string& k, double def) {
    auto it = params.find(k);
    return it == params.end() ? def : it->second;
  };
  if (name == "traveling_bump") {
    allowed({"kappa", "amplitude"});
    return traveling_bump(g, t, get("kappa", 1.0), get("amplitude", 1.0));
  }
  if (name == "separable") {
    allowed({"amplitude"});
    return separable(g, t, get("amplitude", 1.0));
  }
  if (name == "time_symmetric") {
    allowed({"amplitude"});
    return time_symmetric(g, t, get("amplitude", 1.0));
  }
  if (name == "two_mode") {
    allowed({"amplitude", "j", "l"});
    return two_mode(g, t, get("amplitude", 1.0), static_cast<int>(get("j", 1)),
                    static_cast<int>(get("l", 3)));
  }
  if (name == "static") {
    allowed({"amplitude"});
    return static_potential(g, get("amplitude", 1.0));
  }
  if (name == "random") {
    allowed({"seed", "amplitude"});
    return random_smooth(g, t, static_cast<std::uint64_t>(get("seed", 1)), get("amplitude", 1.0));
  }
  if (name == "constant") {
    allowed({"value"});
    return SpaceTimeField::constant(g, t, get("value", 0.0));
  }
  throw ConfigError("unknown potential recipe '" + name + "'");
}

} // namespace ergoham
