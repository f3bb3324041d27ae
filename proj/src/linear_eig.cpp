#include "ergoham/linear_eig.hpp"

#include <cmath>
#include <numeric>

#include "ergoham/cell_solver.hpp"
#include "ergoham/errors.hpp"
#include "ergoham/etdrk4.hpp"
#include "ergoham/field_ops.hpp"
#include "ergoham/time_table.hpp"

namespace ergoham {

namespace {

double sign_of(Direction d) { return d == Direction::Forward ? 1.0 : -1.0; }

void require_linear(const OperatorParams& p) {
  if (std::abs(p.eps - p.mu) > 1e-12 * p.mu)
    throw ValidationError("linear route requires eps == mu (H = |p|^2); use the cell solver");
}

/// Integrates tau u_s = mu Lap u - <A, grad u> + m(s) u over whole periods.
class LinearFlow {
public:
  LinearFlow(const SpaceTimeField& m, const OperatorParams& p, const LinearOptions& opt)
      : m_(m), tau_(p.tau), ops_(m.space(), opt.backend) {
    const double slice_dt = m.time().period() / m.nt();
    double max_dt = opt.max_step / std::max(step_rate(m, tau_), 1e-300);
    if (p.advection) {
      const double speed = p.advection_speed();
      if (speed > 0.0) max_dt = std::min(max_dt, 0.5 * tau_ * m.space().h() / speed);
      for (int a = 0; a < m.space().dim(); ++a) {
        auto s = (*p.advection)[a].slice(0);
        adv_.emplace_back(s.begin(), s.end());
      }
    }
    sub_ = substeps_for(slice_dt, max_dt, opt.min_substeps);
    dt_ = slice_dt / sub_;
    table_.emplace(m, 2 * sub_ * m.nt());
    std::vector<double> symbol = ops_.laplacian_symbol();
    for (auto& v : symbol) v *= p.mu / tau_;
    stepper_.emplace(std::move(symbol), dt_);
    u_.resize(m.nspace());
    work_.resize(m.nspace());
    grad_.resize(m.space().dim());
  }

  int substeps() const noexcept { return sub_; }
  int nt() const noexcept { return m_.nt(); }

  /// Advances the spectral state by one coarse slice starting at slice k.
  void advance_slice(int k, std::vector<cplx>& vhat) {
    for (int s = 0; s < sub_; ++s) {
      stepper_->step((k * sub_ + s) * dt_, vhat,
                     [&](double t, std::span<const cplx> v, std::span<cplx> out) {
                       nonlinear(static_cast<int>(std::lround(2.0 * t / dt_)), v, out);
                     });
    }
  }

  Fft& fft() noexcept { return ops_.fft(); }

private:
  // Stage times are half-step multiples: index j of the fine table.
  void nonlinear(int j, std::span<const cplx> vhat, std::span<cplx> out) {
    auto mj = table_->at(j);
    ops_.fft().inverse(vhat, u_);
    for (std::size_t i = 0; i < u_.size(); ++i) work_[i] = mj[i] * u_[i];
    if (!adv_.empty()) {
      ops_.gradient_from_spectrum(vhat, false, grad_);
      for (std::size_t a = 0; a < adv_.size(); ++a)
        for (std::size_t i = 0; i < u_.size(); ++i) work_[i] -= adv_[a][i] * grad_[a][i];
    }
    for (auto& w : work_) w /= tau_;
    ops_.fft().forward(work_, out);
  }

  const SpaceTimeField& m_;
  double tau_;
  DiffOps ops_;
  std::vector<std::vector<double>> adv_;
  int sub_ = 1;
  double dt_ = 0.0;
  std::optional<FineTimeTable> table_;
  std::optional<Etdrk4> stepper_;
  std::vector<double> u_, work_;
  std::vector<std::vector<double>> grad_;
};

/// Linear-equation residual sup|tau u_t - mu Lap u + <A,grad u> - (m + lambda) u| / sup|u|.
double linear_residual(double lambda, const SpaceTimeField& u, const SpaceTimeField& m,
                       const OperatorParams& p, Backend backend) {
  SpaceTimeField r = time_derivative(u) * p.tau - laplacian(u, backend) * p.mu - (m + lambda) * u;
  if (p.advection) {
    const auto g = gradient(u, backend);
    r = r + dot(p.advection->broadcast(u.time()), g);
  }
  return r.max_abs() / u.max_abs();
}

EigenResult forward_eig_centred(const SpaceTimeField& m, const OperatorParams& p,
                               const LinearOptions& opt) {
  LinearFlow flow(m, p, opt);
  Fft& fft = flow.fft();
  const std::size_t ns = m.nspace();
  const int nt = m.nt();
  const double period = m.time().period();

  std::vector<double> u(ns, 1.0), unew(ns);
  std::vector<cplx> vhat(fft.spectral_size());
  fft.forward(u, vhat);

  std::vector<double> history;
  double rho = 0.0;
  bool converged = false;
  int it = 0;
  for (; it < opt.max_iters && !converged; ++it) {
    for (int k = 0; k < nt; ++k) flow.advance_slice(k, vhat);
    fft.inverse(vhat, unew);
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0, umax = 0.0;
    bool positive = true;
    for (std::size_t i = 0; i < ns; ++i) {
      if (!std::isfinite(unew[i])) throw InstabilityError("linear flow produced non-finite values", history);
      if (!(unew[i] > 0.0)) {
        positive = false;
        continue;
      }
      const double r = unew[i] / u[i];
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      umax = std::max(umax, unew[i]);
    }
    if (umax == 0.0) throw SolverError("linear flow decayed to zero", history);
    const double spread = positive ? rmax / rmin - 1.0 : std::numeric_limits<double>::infinity();
    history.push_back(spread);
    rho = std::sqrt(rmin * rmax);
    converged = spread <= opt.ratio_tol;
    for (std::size_t i = 0; i < ns; ++i) u[i] = unew[i] / umax;
    fft.forward(u, vhat);
  }
  if (!converged) {
    throw SolverError("power iteration did not converge in " + std::to_string(opt.max_iters) +
                          " periods (final Rayleigh spread " + std::to_string(history.back()) + ")",
                      history);
  }

  const double lambda = -(p.tau / period) * std::log(rho);

  // One more period, recording the periodic eigenfunction u(t) = e^{lambda t/tau} v(t).
  std::vector<double> values(ns * static_cast<std::size_t>(nt));
  std::vector<double> slice(ns);
  for (int k = 0; k < nt; ++k) {
    fft.inverse(vhat, slice);
    const double g = std::exp(lambda * m.time().t(k) / p.tau);
    for (std::size_t i = 0; i < ns; ++i) values[static_cast<std::size_t>(k) * ns + i] = g * slice[i];
    flow.advance_slice(k, vhat);
  }
  SpaceTimeField uf(m.space(), m.time(), std::move(values));
  const double qmean = std::sqrt(space_time_average(uf * uf));
  uf = uf * (1.0 / qmean);
  if (uf.min() <= 0.0) throw SolverError("principal eigenfunction is not positive", history);

  EigenResult res;
  res.lambda = lambda;
  res.form = EigenResult::Form::U;
  res.iterations = it;
  res.history = std::move(history);
  res.residual = linear_residual(lambda, uf, m, p, opt.backend);
  res.field = std::move(uf);
  return res;
}

// The slice means h(t) of m factor out exactly: with m' = m - h and
// G' = h - mean h, u = u' exp(G / tau) and lambda = lambda' - mean h.
// Doing so makes shift covariance and constant potentials exact.
EigenResult forward_eig(const SpaceTimeField& m, const OperatorParams& p, const LinearOptions& opt) {
  std::vector<double> h;
  const auto centred = remove_slice_means(m, h);
  const double hbar = std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(h.size());
  EigenResult res = forward_eig_centred(centred, p, opt);
  res.lambda -= hbar;
  if (!m.is_stationary()) {
    const auto g = periodic_antiderivative(h, m.time().period());
    const auto& u = *res.field;
    std::vector<double> v(u.values().begin(), u.values().end());
    const auto ns = u.nspace();
    for (int k = 0; k < u.nt(); ++k) {
      const double f = std::exp(g[k] / p.tau);
      for (std::size_t i = 0; i < ns; ++i) v[static_cast<std::size_t>(k) * ns + i] *= f;
    }
    SpaceTimeField uf(u.space(), u.time(), std::move(v));
    res.field = uf * (1.0 / std::sqrt(space_time_average(uf * uf)));
  }
  res.residual = linear_residual(res.lambda, *res.field, m, p, opt.backend);
  return res;
}

} // namespace

EigenResult parabolic_principal_eig(const SpaceTimeField& m, const OperatorParams& params,
                                    const LinearOptions& opt) {
  params.validate_for(m);
  require_linear(params);
  if (opt.max_iters < 1 || !(opt.ratio_tol > 0.0) || !(opt.max_step > 0.0))
    throw ValidationError("invalid linear solver options");
  if (params.direction == Direction::Forward || m.is_stationary()) return forward_eig(m, params, opt);
  auto res = forward_eig(m.time_reversed(), params, opt);
  res.field = res.field->time_reversed();
  return res;
}

EigenResult parabolic_principal_eig(const SpaceTimeField& m, const Hamiltonian& h,
                                    const OperatorParams& params, const LinearOptions& opt) {
  if (!linear_route_applies(h, params))
    throw ValidationError("linear route requires H = c|p|^2 with eps*c == mu");
  OperatorParams q = params;
  q.eps = q.mu;
  return parabolic_principal_eig(m, q, opt);
}

namespace {

EigenResult dense_elliptic(const SpaceTimeField& m, const OperatorParams& p, Backend backend) {
  const auto& grid = m.space();
  const auto n = static_cast<Eigen::Index>(grid.size());
  DiffOps ops(grid, backend);
  Eigen::MatrixXd k(n, n);
  std::vector<double> e(n, 0.0), col(n);
  std::vector<std::vector<double>> g;
  auto mv = m.slice(0);
  std::vector<std::vector<double>> adv;
  if (p.advection)
    for (int a = 0; a < grid.dim(); ++a) {
      auto s = (*p.advection)[a].slice(0);
      adv.emplace_back(s.begin(), s.end());
    }
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    ops.laplacian(e, col);
    for (Eigen::Index i = 0; i < n; ++i) k(i, j) = -p.mu * col[i];
    if (!adv.empty()) {
      ops.gradient(e, g);
      for (std::size_t a = 0; a < adv.size(); ++a)
        for (Eigen::Index i = 0; i < n; ++i) k(i, j) += adv[a][i] * g[a][i];
    }
    k(j, j) -= mv[j];
    e[j] = 0.0;
  }

  // The spectrum lies in Re z >= -max m (the transport part is skew for
  // constant A); start the shift safely below and walk it up.
  double sigma = -*std::max_element(mv.begin(), mv.end()) - 1.0;
  if (!adv.empty()) {
    const auto div = divergence(*p.advection, backend);
    sigma -= 0.5 * div.max_abs();
  }
  const double knorm = k.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n) / std::sqrt(double(n));
  double lambda = sigma;
  std::vector<double> history;
  int total = 0;
  bool done = false;
  for (int phase = 0; phase < 8 && !done; ++phase) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(k - sigma * Eigen::MatrixXd::Identity(n, n));
    double prev = std::numeric_limits<double>::infinity();
    double r = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 2000; ++it, ++total) {
      Eigen::VectorXd y = lu.solve(x);
      if (!y.allFinite()) throw SolverError("elliptic inverse iteration broke down", history);
      if (y.sum() < 0) y = -y;
      x = y / y.norm();
      const Eigen::VectorXd kx = k * x;
      lambda = x.dot(kx);
      r = (kx - lambda * x).norm();
      history.push_back(r);
      const double tol = std::max(1e-10 * (1.0 + std::abs(lambda)), 1e-14 * knorm);
      if (r <= tol) {
        done = true;
        break;
      }
      if (std::abs(lambda - prev) <= 1e-6 * (1.0 + std::abs(lambda)) && it > 3) break;
      prev = lambda;
    }
    if (!done) sigma = std::max(sigma, lambda - std::max(4.0 * r, 1e-9 * (1.0 + std::abs(lambda))));
  }
  if (!done) throw SolverError("elliptic inverse iteration did not converge", history);

  if (x.minCoeff() < -1e-8 * x.maxCoeff())
    throw SolverError("elliptic eigenvector failed the positivity certificate", history);
  std::vector<double> u(x.data(), x.data() + n);
  SpaceTimeField uf(grid, TimeGrid::stationary(), std::move(u));
  uf = uf * (1.0 / std::sqrt(space_time_average(uf * uf)));

  EigenResult res;
  res.lambda = lambda;
  res.form = EigenResult::Form::U;
  res.iterations = total;
  res.history = std::move(history);
  res.residual = linear_residual(lambda, uf, m, p, backend);
  res.field = std::move(uf);
  return res;
}

} // namespace

EigenResult elliptic_xi(const SpaceTimeField& m_static, const Hamiltonian& h,
                        const OperatorParams& params, Backend backend) {
  if (!m_static.is_stationary()) throw ValidationError("elliptic_xi needs a time-independent potential");
  params.validate_for(m_static);
  h.check_dimension(m_static.space().dim());
  if (linear_route_applies(h, params)) return dense_elliptic(m_static, params, backend);
  OperatorParams q = params;
  q.direction = Direction::Forward;
  CellOptions copt;
  copt.backend = backend;
  return effective_hamiltonian(m_static, h, q, copt).eig;
}

EigenResult elliptic_xi(const SpaceTimeField& m_static, double mu, Backend backend) {
  OperatorParams p;
  p.mu = mu;
  p.eps = mu;
  return elliptic_xi(m_static, Hamiltonian::quadratic(), p, backend);
}

SpaceTimeField hopf_cole(const SpaceTimeField& u) {
  if (!(u.min() > 0.0)) throw DomainError("Hopf-Cole transform needs u > 0 everywhere");
  auto phi = u.map([](double v) { return -std::log(v); });
  return phi + (-space_time_average(phi));
}

SpaceTimeField inverse_hopf_cole(const SpaceTimeField& phi) {
  auto u = phi.map([](double v) { return std::exp(-v); });
  return u * (1.0 / std::sqrt(space_time_average(u * u)));
}

double quadratic_hj_residual(double lambda, const SpaceTimeField& phi, const SpaceTimeField& m,
                             const OperatorParams& p, Backend backend) {
  const auto g = gradient(phi, backend);
  SpaceTimeField r = time_derivative(phi) * (p.tau * sign_of(p.direction)) -
                     laplacian(phi, backend) * p.mu + squared_norm(g) * p.mu + m + lambda;
  if (p.advection) r = r + dot(p.advection->broadcast(phi.time()), g);
  return r.max_abs();
}

} // namespace ergoham
