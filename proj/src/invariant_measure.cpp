#include "ergoham/invariant_measure.hpp"

#include <cmath>
#include <limits>

#include "ergoham/errors.hpp"
#include "ergoham/etdrk4.hpp"
#include "ergoham/field_ops.hpp"
#include "ergoham/time_table.hpp"

namespace ergoham {

namespace {

double drift_rate(const SpaceVectorField& b, double tau) {
  double rate = 0.0;
  for (int a = 0; a < b.dim(); ++a) {
    const auto& c = b[a];
    const double cmax = c.max_abs();
    if (cmax == 0.0 || c.is_stationary()) continue;
    rate = std::max(rate, time_derivative(c).max_abs() / cmax);
  }
  (void)tau;
  return rate;
}

} // namespace

InvariantMeasure invariant_for_drift(const SpaceVectorField& b_in, const OperatorParams& params,
                                     const MeasureOptions& opt) {
  params.validate();
  if (b_in.dim() != b_in.space().dim())
    throw ValidationError("drift needs one component per space dimension");
  for (int a = 0; a < b_in.dim(); ++a)
    for (double v : b_in[a].values())
      if (!std::isfinite(v)) throw ValidationError("drift must be finite");
  if (opt.max_periods < 1 || !(opt.tol_l1 > 0.0)) throw ValidationError("invalid measure options");

  const bool stationary = b_in.is_stationary();
  // Forward direction: s = T - t turns the adjoint into a forward equation
  // with the drift read backwards in time. Backward direction: already forward.
  const bool reverse = params.direction == Direction::Forward && !stationary;
  const SpaceVectorField b = reverse ? b_in.time_reversed() : b_in;

  const TorusGrid& grid = b.space();
  const std::size_t ns = grid.size();
  const double tau = stationary ? 1.0 : params.tau;
  const double period = stationary ? opt.stationary_period : b.time().period();
  const int chunks = stationary ? 8 : b.time().steps();
  const double chunk_dt = period / chunks;
  const int dim = grid.dim();

  DiffOps ops(grid, opt.backend);
  Fft& fft = ops.fft();
  double max_dt = std::numeric_limits<double>::infinity();
  const double speed = b.max_norm();
  if (speed > 0.0) max_dt = opt.cfl * tau * grid.h() / speed;
  const double rate = drift_rate(b, tau);
  if (rate > 0.0) max_dt = std::min(max_dt, opt.max_step / rate);
  const int sub = substeps_for(chunk_dt, max_dt, opt.min_substeps);
  const double dt = chunk_dt / sub;

  std::vector<FineTimeTable> tables;
  tables.reserve(dim);
  for (int a = 0; a < dim; ++a) tables.emplace_back(b[a], stationary ? 1 : 2 * sub * chunks);

  std::vector<double> symbol = ops.laplacian_symbol();
  for (auto& v : symbol) v *= params.mu / tau;
  Etdrk4 stepper(std::move(symbol), dt);

  std::vector<double> sigma(ns, 1.0), flux(ns), prev(ns);
  if (opt.initial) {
    if (!(opt.initial->space() == grid)) throw ValidationError("initial density grid mismatch");
    auto s = opt.initial->slice(0);
    sigma.assign(s.begin(), s.end());
    double mean = 0.0;
    for (double v : sigma) mean += v;
    mean /= static_cast<double>(ns);
    if (!(mean > 0.0)) throw ValidationError("initial density must have positive mass");
    for (auto& v : sigma) v /= mean;
  }
  std::vector<cplx> hat(fft.spectral_size()), acc(fft.spectral_size()), tmp(fft.spectral_size());
  fft.forward(sigma, hat);

  std::vector<std::span<const double>> bj(dim);
  // N(sigma) = div(sigma b) / tau, spectrally: mode 0 is exactly zero.
  auto nonlinear = [&](double t, std::span<const cplx> v, std::span<cplx> out) {
    const int j = stationary ? 0 : static_cast<int>(std::lround(2.0 * t / dt));
    fft.inverse(v, sigma);
    std::fill(out.begin(), out.end(), cplx(0.0));
    for (int a = 0; a < dim; ++a) {
      auto ba = tables[a].at(j);
      for (std::size_t i = 0; i < ns; ++i) flux[i] = sigma[i] * ba[i];
      fft.forward(flux, tmp);
      const auto& d = ops.derivative_symbol(a);
      for (std::size_t s = 0; s < out.size(); ++s) out[s] += d[s] * tmp[s] / tau;
    }
  };

  InvariantMeasure res{SpaceTimeField::constant(grid, b.time(), 0.0), {}, 0, {}, 0.0};
  std::vector<double> record(stationary ? ns : ns * static_cast<std::size_t>(chunks));
  bool converged = false;
  while (res.periods < opt.max_periods && !converged) {
    fft.inverse(hat, prev);
    for (int k = 0; k < chunks; ++k) {
      if (!stationary) {
        fft.inverse(hat, sigma);
        std::copy(sigma.begin(), sigma.end(), record.begin() + static_cast<std::ptrdiff_t>(k * ns));
      }
      for (int s = 0; s < sub; ++s) stepper.step((k * sub + s) * dt, hat, nonlinear);
    }
    fft.inverse(hat, sigma);
    double l1 = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
      if (!std::isfinite(sigma[i])) throw InstabilityError("density evolution produced non-finite values", res.history);
      l1 += std::abs(sigma[i] - prev[i]);
      mass += sigma[i];
    }
    l1 /= static_cast<double>(ns);
    mass /= static_cast<double>(ns);
    res.mass_drift = std::max(res.mass_drift, std::abs(mass - 1.0));
    if (res.mass_drift > 1e-6)
      throw ConservationError("density mass drifted by " + std::to_string(res.mass_drift), res.history);
    res.history.push_back(l1);
    ++res.periods;
    converged = l1 < opt.tol_l1;
  }
  if (!converged)
    throw SolverError("invariant measure did not converge in " + std::to_string(opt.max_periods) +
                          " periods",
                      res.history);

  if (stationary) record = sigma;
  // back to physical time: eta(t_k) = sigma(s = T - t_k)
  std::vector<double> eta(record.size());
  const int nt = stationary ? 1 : chunks;
  for (int k = 0; k < nt; ++k) {
    const int src = reverse ? (nt - k) % nt : k;
    std::copy_n(record.begin() + static_cast<std::ptrdiff_t>(src * ns), ns,
                eta.begin() + static_cast<std::ptrdiff_t>(k * ns));
  }
  const double target = 1.0 / (stationary ? 1.0 : period);
  for (int k = 0; k < nt; ++k) {
    double mass = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
      double& v = eta[k * ns + i];
      if (v < -1e-10) throw SolverError("invariant density is negative beyond round-off", res.history);
      v = std::max(v, 0.0);
      mass += v;
    }
    mass /= static_cast<double>(ns);
    for (std::size_t i = 0; i < ns; ++i) eta[k * ns + i] *= target / mass;
  }
  res.density = SpaceTimeField(grid, b_in.time(), std::move(eta));
  res.per_slice_mass = slice_averages(res.density);
  return res;
}

SpaceVectorField optimal_drift(const SpaceTimeField& phi, const Hamiltonian& h,
                               const OperatorParams& params, Backend backend) {
  const auto g = gradient(phi, backend);
  const int d = g.dim();
  const std::size_t n = phi.values().size();
  std::vector<std::vector<double>> comps(d, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double p0 = g[0].values()[i], p1 = d > 1 ? g[1].values()[i] : 0.0;
    double g0, g1;
    h.gradient(p0, p1, g0, g1);
    comps[0][i] = params.eps * g0;
    if (d > 1) comps[1][i] = params.eps * g1;
  }
  std::vector<SpaceTimeField> out;
  for (int a = 0; a < d; ++a) out.emplace_back(phi.space(), phi.time(), std::move(comps[a]));
  SpaceVectorField drift(std::move(out));
  if (params.advection) drift = drift + params.advection->broadcast(phi.time());
  return drift;
}

InvariantMeasure invariant_for_solution(const EigenResult& eig, const Hamiltonian& h,
                                        const OperatorParams& params, const MeasureOptions& opt) {
  if (!eig.field || eig.form != EigenResult::Form::Phi)
    throw ValidationError("invariant_for_solution needs a phi-form eigen result");
  return invariant_for_drift(optimal_drift(*eig.field, h, params, opt.backend), params, opt);
}

InvariantMeasure control_measure(const SpaceVectorField& alpha, const OperatorParams& params,
                                 const MeasureOptions& opt) {
  if (params.advection) return invariant_for_drift(alpha + params.advection->broadcast(alpha.time()), params, opt);
  return invariant_for_drift(alpha, params, opt);
}

double weak_residual(const InvariantMeasure& eta, const SpaceVectorField& b, const SpaceTimeField& f,
                     const OperatorParams& params, Backend backend) {
  const double sgn = params.direction == Direction::Forward ? 1.0 : -1.0;
  SpaceTimeField lf = time_derivative(f) * (sgn * params.tau) - laplacian(f, backend) * params.mu +
                      dot(b, gradient(f, backend));
  return std::abs(integrate_against(lf, eta.density));
}

} // namespace ergoham
