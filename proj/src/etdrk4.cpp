#include "ergoham/etdrk4.hpp"

#include <cmath>
#include <numbers>

#include "ergoham/errors.hpp"

namespace ergoham {

namespace {
constexpr int kContourPoints = 32;
}

Etdrk4::Etdrk4(std::vector<double> symbol, double dt) : dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("ETDRK4: dt must be positive");
  const std::size_t ns = symbol.size();
  e_.resize(ns);
  e2_.resize(ns);
  q_.resize(ns);
  f1_.resize(ns);
  f2_.resize(ns);
  f3_.resize(ns);

  // Contour means over a circle of radius 1 around z = dt L avoid the
  // cancellation of the phi-function formulas near z = 0. L is real, so
  // the contour is symmetric and only real parts survive.
  std::vector<cplx> roots(kContourPoints);
  for (int j = 0; j < kContourPoints; ++j)
    roots[j] = std::exp(cplx(0.0, std::numbers::pi * (j + 0.5) / kContourPoints));

  for (std::size_t s = 0; s < ns; ++s) {
    const double z0 = dt * symbol[s];
    e_[s] = std::exp(z0);
    e2_[s] = std::exp(0.5 * z0);
    double q = 0, f1 = 0, f2 = 0, f3 = 0;
    for (const auto& r : roots) {
      const cplx z = z0 + r;
      const cplx ez = std::exp(z), ez2 = std::exp(0.5 * z);
      const cplx z3 = z * z * z;
      q += ((ez2 - 1.0) / z).real();
      f1 += ((-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3).real();
      f2 += ((2.0 + z + ez * (z - 2.0)) / z3).real();
      f3 += ((-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3).real();
    }
    q_[s] = dt * q / kContourPoints;
    f1_[s] = dt * f1 / kContourPoints;
    f2_[s] = dt * f2 / kContourPoints;
    f3_[s] = dt * f3 / kContourPoints;
  }
  for (auto* v : {&nv_, &na_, &nb_, &nc_, &a_, &b_, &c_}) v->resize(ns);
}

void Etdrk4::step(double t, std::vector<cplx>& v, const Nonlinear& n) {
  const std::size_t ns = e_.size();
  if (v.size() != ns) throw ValidationError("ETDRK4: state size mismatch");
  const double h = dt_;

  n(t, v, nv_);
  for (std::size_t s = 0; s < ns; ++s) a_[s] = e2_[s] * v[s] + q_[s] * nv_[s];
  n(t + 0.5 * h, a_, na_);
  for (std::size_t s = 0; s < ns; ++s) b_[s] = e2_[s] * v[s] + q_[s] * na_[s];
  n(t + 0.5 * h, b_, nb_);
  for (std::size_t s = 0; s < ns; ++s) c_[s] = e2_[s] * a_[s] + q_[s] * (2.0 * nb_[s] - nv_[s]);
  n(t + h, c_, nc_);
  for (std::size_t s = 0; s < ns; ++s)
    v[s] = e_[s] * v[s] + f1_[s] * nv_[s] + 2.0 * f2_[s] * (na_[s] + nb_[s]) + f3_[s] * nc_[s];
}

} // namespace ergoham
