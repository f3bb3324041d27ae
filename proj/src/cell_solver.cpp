#include "ergoham/cell_solver.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "ergoham/errors.hpp"
#include "ergoham/etdrk4.hpp"
#include "ergoham/field_ops.hpp"
#include "ergoham/time_table.hpp"

namespace ergoham {

namespace {

/// eps H(grad psi) + <A, grad psi> at every node, from the spectrum of psi.
class TransportTerm {
public:
  TransportTerm(DiffOps& ops, const Hamiltonian& h, const OperatorParams& p, bool upwind,
                bool dealias)
      : ops_(ops), h_(h), eps_(p.eps), upwind_(upwind), dealias_(dealias),
        dim_(ops.grid().dim()) {
    const std::size_t ns = ops.grid().size();
    if (p.advection)
      for (int a = 0; a < dim_; ++a) {
        auto s = (*p.advection)[a].slice(0);
        adv_.emplace_back(s.begin(), s.end());
      }
    grad_.assign(dim_, std::vector<double>(ns));
    bwd_.assign(dim_, std::vector<double>(ns));
    fwd_.assign(dim_, std::vector<double>(ns));
    psi_.resize(ns);
  }

  /// Returns the largest characteristic speed eps |grad_p H| + |A| seen.
  double evaluate(std::span<const cplx> psihat, std::span<double> out) {
    const std::size_t ns = out.size();
    double speed = 0.0;
    if (!upwind_) {
      ops_.gradient_from_spectrum(psihat, dealias_, grad_);
      for (std::size_t i = 0; i < ns; ++i) {
        const double p0 = grad_[0][i], p1 = dim_ > 1 ? grad_[1][i] : 0.0;
        double v = eps_ * h_.value(p0, p1);
        double g0, g1;
        h_.gradient(p0, p1, g0, g1);
        double sp = eps_ * std::sqrt(g0 * g0 + g1 * g1);
        if (!adv_.empty()) {
          double a2 = 0.0;
          for (int a = 0; a < dim_; ++a) {
            v += adv_[a][i] * grad_[a][i];
            a2 += adv_[a][i] * adv_[a][i];
          }
          sp += std::sqrt(a2);
        }
        out[i] = v;
        speed = std::max(speed, sp);
      }
      return speed;
    }
    ops_.fft().inverse(psihat, psi_);
    for (int a = 0; a < dim_; ++a) ops_.one_sided(psi_, a, bwd_[a], fwd_[a], 2);
    for (std::size_t i = 0; i < ns; ++i) {
      // Godunov flux (H even and increasing in each |p_a|) on ENO2 differences.
      double q[2] = {0.0, 0.0};
      for (int a = 0; a < dim_; ++a)
        q[a] = std::max(std::max(bwd_[a][i], 0.0), -std::min(fwd_[a][i], 0.0));
      double v = eps_ * h_.value(q[0], q[1]);
      double g0, g1;
      h_.gradient(q[0], q[1], g0, g1);
      double sp = eps_ * std::sqrt(g0 * g0 + g1 * g1);
      if (!adv_.empty()) {
        double a2 = 0.0;
        for (int a = 0; a < dim_; ++a) {
          const double A = adv_[a][i];
          v += A * (A > 0.0 ? bwd_[a][i] : fwd_[a][i]);
          a2 += A * A;
        }
        sp += std::sqrt(a2);
      }
      out[i] = v;
      speed = std::max(speed, sp);
    }
    return speed;
  }

private:
  DiffOps& ops_;
  const Hamiltonian& h_;
  double eps_;
  bool upwind_;
  bool dealias_;
  int dim_;
  std::vector<std::vector<double>> adv_;
  std::vector<std::vector<double>> grad_, bwd_, fwd_;
  std::vector<double> psi_;
};

bool use_upwind(const OperatorParams& p, const CellOptions& opt) {
  return opt.upwind ? *opt.upwind : p.mu < opt.upwind_below_mu;
}

CellSolution solve_centred(const SpaceTimeField& m, const Hamiltonian& h, const OperatorParams& p,
                           const CellOptions& opt) {
  const bool stationary = m.is_stationary();
  const bool upwind = use_upwind(p, opt);
  const Backend backend = upwind ? Backend::FiniteDifference : opt.backend;
  const TorusGrid& grid = m.space();
  const std::size_t ns = grid.size();

  // Stationary problems relax in units of s/tau over a pseudo-period.
  const double tau = stationary ? 1.0 : p.tau;
  const double period = stationary ? opt.stationary_period : m.time().period();
  const int chunks = stationary ? 8 : m.nt();
  const double chunk_dt = period / chunks;
  const double mmax = m.max_abs();
  const double tol = opt.tol_drift > 0.0 ? opt.tol_drift : 1e-8 * (1.0 + mmax);

  DiffOps ops(grid, backend);
  Fft& fft = ops.fft();
  TransportTerm term(ops, h, p, upwind, !upwind);

  const double rate = stationary ? mmax / tau : step_rate(m, tau);
  double max_dt = rate > 0.0 ? opt.max_step / rate : std::numeric_limits<double>::infinity();
  const double adv_speed = p.advection_speed();
  if (adv_speed > 0.0) max_dt = std::min(max_dt, opt.cfl * tau * grid.h() / adv_speed);
  int sub = substeps_for(chunk_dt, max_dt, opt.min_substeps);
  const int base_sub = sub;
  double period_speed = 0.0;

  std::vector<double> symbol = ops.laplacian_symbol();
  for (auto& v : symbol) v *= p.mu / tau;

  std::optional<FineTimeTable> table;
  std::optional<Etdrk4> stepper;
  auto rebuild = [&] {
    // stationary: the table holds the single slice whatever its length
    table.emplace(m, stationary ? 1 : 2 * sub * chunks);
    stepper.emplace(symbol, chunk_dt / sub);
  };
  rebuild();

  std::vector<double> work(ns), psi(ns), start(ns);
  std::vector<cplx> psihat(fft.spectral_size()), saved(fft.spectral_size());
  if (opt.initial) {
    if (!(opt.initial->space() == grid)) throw ValidationError("initial datum grid mismatch");
    auto s = opt.initial->slice(0);
    psi.assign(s.begin(), s.end());
  } else {
    std::fill(psi.begin(), psi.end(), 0.0);
  }
  fft.forward(psi, psihat);
  {
    // the transport bound for the initial datum
    const double s0 = term.evaluate(psihat, work);
    if (s0 > 0.0) {
      const int need = substeps_for(chunk_dt, opt.cfl * tau * grid.h() / s0, sub);
      if (need > sub) {
        sub = need;
        rebuild();
      }
    }
  }

  double speed = 0.0;
  // Stage times are half-step multiples, i.e. nodes of the fine table.
  auto nonlinear = [&](double t, std::span<const cplx> v, std::span<cplx> out) {
    auto mj = table->at(stationary ? 0 : static_cast<int>(std::lround(2.0 * t / stepper->dt())));
    speed = std::max(speed, term.evaluate(v, work));
    for (std::size_t i = 0; i < ns; ++i) work[i] = -(work[i] + mj[i]) / tau;
    fft.forward(work, out);
  };

  RelaxationDiagnostics diag;
  diag.backend = backend;
  diag.upwind = upwind;
  std::vector<double> record(stationary ? ns : ns * static_cast<std::size_t>(chunks));
  double c = 0.0, osc = std::numeric_limits<double>::infinity();
  bool converged = false;
  while (diag.periods_run < opt.max_periods && !converged) {
    saved = psihat;
    fft.inverse(psihat, start);
    bool restart = false;
    for (int k = 0; k < chunks && !restart; ++k) {
      if (!stationary) {
        fft.inverse(psihat, psi);
        std::copy(psi.begin(), psi.end(), record.begin() + static_cast<std::ptrdiff_t>(k * ns));
      }
      speed = 0.0;
      if (k == 0) period_speed = 0.0;
      for (int s = 0; s < sub; ++s) stepper->step((k * sub + s) * (chunk_dt / sub), psihat, nonlinear);
      const double dt = chunk_dt / sub;
      period_speed = std::max(period_speed, speed);
      bool finite = true;
      for (const auto& z : psihat)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) finite = false;
      if (!finite || speed * dt / (tau * grid.h()) > opt.cfl) {
        if (diag.dt_halvings >= opt.max_halvings) {
          throw InstabilityError(finite ? "step bound still violated after maximal dt halving"
                                        : "relaxation produced non-finite values; reduce dt",
                                 diag.drift_history);
        }
        ++diag.dt_halvings;
        sub *= 2;
        rebuild();
        psihat = saved;
        restart = true;
      }
    }
    if (restart) continue;
    fft.inverse(psihat, psi);
    // Transients with steep initial data may have forced a small step; grow it
    // back (never below the base rule) once the transport speed allows.
    if (sub > base_sub) {
      const double safe_dt = 0.5 * opt.cfl * tau * grid.h() / std::max(period_speed, 1e-300);
      const int want = substeps_for(chunk_dt, safe_dt, base_sub);
      if (want < sub) {
        sub = want;
        rebuild();
      }
    }
    c = 0.0;
    for (std::size_t i = 0; i < ns; ++i) c += psi[i] - start[i];
    c /= static_cast<double>(ns);
    osc = 0.0;
    for (std::size_t i = 0; i < ns; ++i) osc = std::max(osc, std::abs(psi[i] - start[i] - c));
    diag.drift_history.push_back(c);
    ++diag.periods_run;
    converged = osc < tol;
  }
  diag.oscillation = osc;
  diag.substeps = sub;
  diag.dt = chunk_dt / sub;
  if (!converged) {
    throw SolverError("relaxation did not converge in " + std::to_string(opt.max_periods) +
                          " periods (oscillation " + std::to_string(osc) + ")",
                      diag.drift_history);
  }

  // psi(s) = phi(s) + (lambda / tau) s, so the per-period increment is lambda T / tau.
  const double lambda = tau * c / period;
  std::vector<double> phi;
  if (stationary) {
    phi = psi;
  } else {
    phi = record;
    for (int k = 0; k < chunks; ++k) {
      const double shift = -c * m.time().t(k) / period;  // -(lambda / tau) t_k
      for (std::size_t i = 0; i < ns; ++i) phi[k * ns + i] += shift;
    }
  }
  SpaceTimeField phif(grid, m.time(), std::move(phi));
  phif = phif + (-space_time_average(phif));

  CellSolution sol;
  sol.eig.lambda = lambda;
  sol.eig.form = EigenResult::Form::Phi;
  sol.eig.iterations = diag.periods_run;
  sol.eig.history = diag.drift_history;
  sol.eig.field = std::move(phif);
  sol.diag = std::move(diag);
  return sol;
}

// Slice means of m only shift lambda and add a function of t to phi:
// with m' = m - h(t), lambda = lambda' - mean h and
// phi = phi' - (1/tau) integral of (h - mean h).
CellSolution solve_forward(const SpaceTimeField& m, const Hamiltonian& h, const OperatorParams& p,
                           const CellOptions& opt) {
  std::vector<double> means;
  const auto centred = remove_slice_means(m, means);
  const double hbar =
      std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(means.size());
  CellSolution sol = solve_centred(centred, h, p, opt);
  sol.eig.lambda -= hbar;
  if (!m.is_stationary()) {
    const auto g = periodic_antiderivative(means, m.time().period());
    const auto& phi = *sol.eig.field;
    std::vector<double> v(phi.values().begin(), phi.values().end());
    const auto ns = phi.nspace();
    for (int k = 0; k < phi.nt(); ++k)
      for (std::size_t i = 0; i < ns; ++i) v[static_cast<std::size_t>(k) * ns + i] -= g[k] / p.tau;
    SpaceTimeField pf(phi.space(), phi.time(), std::move(v));
    sol.eig.field = pf + (-space_time_average(pf));
  }
  return sol;
}

} // namespace

ResidualScheme scheme_for(const OperatorParams& params, const CellOptions& opt) {
  const bool up = use_upwind(params, opt);
  return {up ? Backend::FiniteDifference : opt.backend, up};
}

CellSolution effective_hamiltonian(const SpaceTimeField& m, const Hamiltonian& h,
                                   const OperatorParams& params, const CellOptions& opt) {
  params.validate_for(m);
  h.check_dimension(m.space().dim());
  if (opt.max_periods < 1 || !(opt.max_step > 0.0) || !(opt.cfl > 0.0) ||
      !(opt.stationary_period > 0.0))
    throw ValidationError("invalid cell solver options");
  const bool reverse = params.direction == Direction::Backward && !m.is_stationary();
  CellSolution sol = reverse ? solve_forward(m.time_reversed(), h, params, opt)
                             : solve_forward(m, h, params, opt);
  if (reverse) sol.eig.field = sol.eig.field->time_reversed();
  sol.eig.residual = residual(sol.eig, m, h, params, scheme_for(params, opt));
  return sol;
}

double residual(const EigenResult& eig, const SpaceTimeField& m, const Hamiltonian& h,
                const OperatorParams& params, ResidualScheme scheme) {
  if (!eig.field || eig.form != EigenResult::Form::Phi)
    throw ValidationError("residual needs a phi-form eigen result");
  const auto& phi = *eig.field;
  if (!same_shape(phi, m)) throw ValidationError("residual: shape mismatch");
  DiffOps ops(m.space(), scheme.backend);
  TransportTerm term(ops, h, params, scheme.upwind, false);
  const std::size_t ns = m.nspace();
  const double sgn = params.direction == Direction::Forward ? 1.0 : -1.0;
  const auto dphi = time_derivative(phi);
  std::vector<cplx> hat(ops.spectral_size());
  std::vector<double> tr(ns), lap(ns);
  double worst = 0.0;
  for (int k = 0; k < phi.nt(); ++k) {
    auto s = phi.slice(k);
    ops.fft().forward(s, hat);
    term.evaluate(hat, tr);
    ops.laplacian(s, lap);
    auto mk = m.slice(k);
    auto dk = dphi.slice(k);
    for (std::size_t i = 0; i < ns; ++i) {
      const double r = eig.lambda + sgn * params.tau * dk[i] - params.mu * lap[i] + tr[i] + mk[i];
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

} // namespace ergoham
