#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ergoham/field.hpp"

namespace ergoham {

/// Zero-mean von Mises profile A (exp(kappa cos 2 pi x) - I0(kappa)).
double bump_profile(double x, double kappa, double amplitude);

/// g(x - t/T) with g the zero-mean von Mises bump (in d = 2 the bump moves
/// along x and is modulated by cos(2 pi y)). Every point sees the same
/// time average, while the crest keeps max_x m > 0 at all times.
SpaceTimeField traveling_bump(const TorusGrid& g, const TimeGrid& t, double kappa = 1.0,
                              double amplitude = 1.0);

/// m0(x) + h(t) with m0 = cos 2 pi x + 0.5 sin 4 pi x (+ cos 2 pi y) and h = sin(2 pi t/T).
SpaceTimeField separable(const TorusGrid& g, const TimeGrid& t, double amplitude = 1.0);

/// Non-separable m with m(T - t, x) = m(t, x).
SpaceTimeField time_symmetric(const TorusGrid& g, const TimeGrid& t, double amplitude = 1.0);

/// a (cos(2 pi t/T) sin(2 pi j x) + sin(2 pi t/T) sin(2 pi l x)).
SpaceTimeField two_mode(const TorusGrid& g, const TimeGrid& t, double amplitude = 1.0, int j = 1,
                        int l = 3);

/// Time-independent cos 2 pi x + 0.5 sin 4 pi x (+ cos 2 pi y) on the stationary grid.
SpaceTimeField static_potential(const TorusGrid& g, double amplitude = 1.0);

/// Seeded random trigonometric polynomial: spatial modes |k_a| <= 3, time
/// modes <= 2 (none on a stationary grid), coefficients decaying like
/// exp(-|k|/2). Coefficients are rescaled to absolute sum `amplitude`, so
/// max |m| <= amplitude and the field does not depend on the grid.
SpaceTimeField random_smooth(const TorusGrid& g, const TimeGrid& t, std::uint64_t seed,
                             double amplitude = 1.0);

/// Named constructor for configuration files. Known names: traveling_bump
/// (kappa, amplitude), separable, time_symmetric, two_mode (amplitude, j, l),
/// static, random (seed, amplitude), constant (value). Unknown names or
/// parameters raise ConfigError.
SpaceTimeField make_potential(const std::string& name, const std::map<std::string, double>& params,
                              const TorusGrid& g, const TimeGrid& t);

} // namespace ergoham
