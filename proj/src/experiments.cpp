#include "ergoham/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "ergoham/errors.hpp"
#include "ergoham/field_ops.hpp"
#include "ergoham/recipes.hpp"
#include "ergoham/util.hpp"

namespace ergoham {

using std::numbers::pi;

int worker_count(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(n, 1);
  if (const char* env = std::getenv("ERGOHAM_WORKERS")) {
    const auto cap = parse_int(env);
    if (cap < 1) throw ConfigError("ERGOHAM_WORKERS must be a positive integer");
    n = static_cast<int>(std::min<long long>(n, cap));
  }
  return n;
}

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  workers = std::clamp(workers, 1, count);
  std::vector<std::exception_ptr> errors(count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

constexpr std::size_t kDenseLimit = 4096;

std::optional<double> linear_scale(const Hamiltonian& h, const OperatorParams& p, const SolveSettings& s) {
  if (!s.linear_route || !(p.eps > 0.0)) return std::nullopt;
  const auto c = quadratic_coefficient(h);
  if (!c) return std::nullopt;
  return p.eps * *c / p.mu;
}

} // namespace

EigenResult principal_eigenvalue(const SpaceTimeField& m, const Hamiltonian& h,
                                 const OperatorParams& params, const SolveSettings& s) {
  params.validate_for(m);
  h.check_dimension(m.space().dim());
  if (const auto theta = linear_scale(h, params, s)) {
    OperatorParams q = params;
    q.eps = q.mu;
    const SpaceTimeField mm = *theta == 1.0 ? m : m * *theta;
    EigenResult r = m.is_stationary() && m.space().size() <= kDenseLimit
                        ? elliptic_xi(mm, Hamiltonian::quadratic(), q, s.linear.backend)
                        : parabolic_principal_eig(mm, q, s.linear);
    r.lambda /= *theta;
    r.residual /= *theta;
    return r;
  }
  return effective_hamiltonian(m, h, params, s.cell).eig;
}

double elliptic_eigenvalue(const SpaceTimeField& m_static, const Hamiltonian& h,
                           const OperatorParams& params, const SolveSettings& s) {
  if (!m_static.is_stationary()) throw ValidationError("elliptic eigenvalue needs a static potential");
  OperatorParams q = params;
  q.direction = Direction::Forward;
  return principal_eigenvalue(m_static, h, q, s).lambda;
}

const std::vector<double>& SweepResult::column(const std::string& name) const {
  for (const auto& [k, v] : columns)
    if (k == name) return v;
  throw ValidationError("sweep has no column '" + name + "'");
}

double SweepResult::get(const std::string& name) const {
  for (const auto& [k, v] : summary)
    if (k == name) return v;
  throw ValidationError("sweep has no summary entry '" + name + "'");
}

void SweepResult::set(const std::string& name, double v) {
  for (auto& [k, old] : summary)
    if (k == name) {
      old = v;
      return;
    }
  summary.emplace_back(name, v);
}

void SweepResult::add_column(const std::string& name, std::vector<double> v) {
  if (v.size() != values.size()) throw ValidationError("column length mismatch");
  columns.emplace_back(name, std::move(v));
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw ValidationError("invalid geometric grid");
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i)
    v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

namespace {

void require_monotone(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw ValidationError(std::string(what) + ": empty grid");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i]))
      throw ValidationError(std::string(what) + ": values must be positive");
    if (i > 0 && !(v[i] > v[i - 1]))
      throw ValidationError(std::string(what) + ": values must be strictly increasing");
  }
}

/// Solves one entry per value in parallel; `make` builds (m, params).
SweepResult run_sweep(const std::string& name, const std::vector<double>& values,
                      const SolveSettings& s,
                      const std::function<EigenResult(double)>& solve) {
  SweepResult r;
  r.parameter = name;
  r.values = values;
  r.lambda.assign(values.size(), 0.0);
  r.residual.assign(values.size(), 0.0);
  parallel_for(static_cast<int>(values.size()), worker_count(s.workers), [&](int i) {
    const auto e = solve(values[i]);
    r.lambda[i] = e.lambda;
    r.residual[i] = e.residual;
  });
  return r;
}

std::vector<double> constant_column(std::size_t n, double v) { return std::vector<double>(n, v); }

} // namespace

SpaceTimeField heat_cell_problem(const SpaceTimeField& m, Direction dir, double tau, double mu,
                                 Backend backend) {
  if (!(tau > 0.0) || !(mu > 0.0)) throw ValidationError("heat cell problem needs tau, mu > 0");
  const auto& grid = m.space();
  const std::size_t ns = grid.size();
  const int nt = m.nt();
  DiffOps ops(grid, backend);
  Fft& fft = ops.fft();
  const std::size_t nspec = fft.spectral_size();
  const auto& lap = ops.laplacian_symbol();
  const double avg = space_time_average(m);

  std::vector<cplx> hat(nspec * nt);
  std::vector<double> src(ns);
  for (int k = 0; k < nt; ++k) {
    auto mk = m.slice(k);
    for (std::size_t i = 0; i < ns; ++i) src[i] = avg - mk[i];
    fft.forward(src, std::span<cplx>(hat).subspan(k * nspec, nspec));
  }

  if (m.is_stationary()) {
    for (std::size_t s = 0; s < nspec; ++s) hat[s] = lap[s] < 0.0 ? hat[s] / (-mu * lap[s]) : cplx(0.0);
  } else {
    ComplexDft dft(nt);
    std::vector<cplx> line(nt), spec(nt);
    const double sgn = dir == Direction::Forward ? 1.0 : -1.0;
    for (std::size_t s = 0; s < nspec; ++s) {
      for (int k = 0; k < nt; ++k) line[k] = hat[k * nspec + s];
      dft.forward(line, spec);
      for (int j = 0; j < nt; ++j) {
        const bool nyq = nt % 2 == 0 && j == nt / 2;
        const double w = nyq ? 0.0 : 2.0 * pi * signed_frequency(j, nt) / m.time().period();
        const cplx d(-mu * lap[s], sgn * tau * w);
        spec[j] = std::abs(d) > 0.0 ? spec[j] / d : cplx(0.0);
      }
      dft.inverse(spec, line);
      for (int k = 0; k < nt; ++k) hat[k * nspec + s] = line[k];
    }
  }

  std::vector<double> out(ns * nt);
  for (int k = 0; k < nt; ++k)
    fft.inverse(std::span<const cplx>(hat).subspan(k * nspec, nspec),
                std::span<double>(out).subspan(k * ns, ns));
  SpaceTimeField psi(grid, m.time(), std::move(out));
  return psi + (-space_time_average(psi));
}

bool is_separable(const SpaceTimeField& m) {
  const auto tav = time_average(m);
  const auto sav = slice_averages(m);
  const double avg = space_time_average(m);
  const std::size_t ns = m.nspace();
  double worst = 0.0;
  for (int k = 0; k < m.nt(); ++k) {
    auto mk = m.slice(k);
    auto m0 = tav.slice(0);
    for (std::size_t i = 0; i < ns; ++i) worst = std::max(worst, std::abs(mk[i] - m0[i] - sav[k] + avg));
  }
  return worst <= 1e-12 * (1.0 + m.max_abs());
}

SweepResult sweep_frequency(const SpaceTimeField& m, const std::vector<double>& taus,
                            const Hamiltonian& h, const OperatorParams& base, const SolveSettings& s) {
  require_monotone(taus, "frequency sweep");
  auto r = run_sweep("tau", taus, s, [&](double tau) {
    OperatorParams p = base;
    p.tau = tau;
    return principal_eigenvalue(m, h, p, s);
  });

  const double high = elliptic_eigenvalue(time_average(m), h, base, s);
  std::vector<double> xi(m.nt());
  parallel_for(m.nt(), worker_count(s.workers),
               [&](int k) { xi[k] = elliptic_eigenvalue(m.frozen(k), h, base, s); });
  double low = 0.0;
  for (double v : xi) low += v;
  low /= m.nt();

  const std::size_t n = taus.size();
  std::vector<double> gl(n), gh(n), mono(n, 1.0), bounds(n);
  bool monotone = true, shrinking = true;
  const double mmax = m.max();
  for (std::size_t i = 0; i < n; ++i) {
    gl[i] = std::abs(r.lambda[i] - low);
    gh[i] = std::abs(r.lambda[i] - high);
    if (i > 0 && r.lambda[i] < r.lambda[i - 1] - 1e-7) {
      mono[i] = 0.0;
      monotone = false;
    }
    if (i > 0 && (gh[i] > gh[i - 1] || gl[i] < gl[i - 1])) shrinking = false;
    bounds[i] = r.lambda[i] >= -mmax - 1e-9 && r.lambda[i] <= high + 1e-9 ? 1.0 : 0.0;
  }
  const auto [lo, hi] = std::minmax_element(r.lambda.begin(), r.lambda.end());
  r.add_column("limit_low", constant_column(n, low));
  r.add_column("limit_high", constant_column(n, high));
  r.add_column("gap_low", gl);
  r.add_column("gap_high", gh);
  r.add_column("monotone_ok", mono);
  r.add_column("bounds_ok", bounds);
  r.set("limit_low", low);
  r.set("limit_high", high);
  r.set("monotone", monotone ? 1.0 : 0.0);
  r.set("gaps_shrinking", shrinking ? 1.0 : 0.0);
  r.set("separable", is_separable(m) ? 1.0 : 0.0);
  r.set("flatness", *hi - *lo);
  r.set("bounds_ok", std::all_of(bounds.begin(), bounds.end(), [](double b) { return b == 1.0; }));
  return r;
}

SweepResult sweep_diffusion(const SpaceTimeField& m, const std::vector<double>& mus,
                            const Hamiltonian& h, const OperatorParams& base, const SolveSettings& s) {
  require_monotone(mus, "diffusion sweep");
  auto r = run_sweep("mu", mus, s, [&](double mu) {
    OperatorParams p = base;
    p.mu = mu;
    p.eps = mu * base.eps;
    return principal_eigenvalue(m, h, p, s);
  });
  const double low = -time_average(m).max();
  const double high = -space_time_average(m);
  const std::size_t n = mus.size();
  std::vector<double> bounds(n);
  for (std::size_t i = 0; i < n; ++i)
    bounds[i] = r.lambda[i] >= -m.max() - 1e-9 && r.lambda[i] <= high + 1e-9 ? 1.0 : 0.0;
  r.add_column("limit_low", constant_column(n, low));
  r.add_column("limit_high", constant_column(n, high));
  r.add_column("bounds_ok", bounds);
  r.set("limit_low", low);
  r.set("limit_high", high);

  // best triple i < j < k with lambda_j below (or above) both ends
  double best = -std::numeric_limits<double>::infinity();
  int bi = -1, bj = -1, bk = -1;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const auto lmax = std::max_element(r.lambda.begin(), r.lambda.begin() + j);
    const auto rmax = std::max_element(r.lambda.begin() + j + 1, r.lambda.end());
    const auto lmin = std::min_element(r.lambda.begin(), r.lambda.begin() + j);
    const auto rmin = std::min_element(r.lambda.begin() + j + 1, r.lambda.end());
    const double dip = std::min(*lmax, *rmax) - r.lambda[j];
    const double peak = r.lambda[j] - std::max(*lmin, *rmin);
    if (dip > best) {
      best = dip;
      bi = static_cast<int>(lmax - r.lambda.begin());
      bj = static_cast<int>(j);
      bk = static_cast<int>(rmax - r.lambda.begin());
    }
    if (peak > best) {
      best = peak;
      bi = static_cast<int>(lmin - r.lambda.begin());
      bj = static_cast<int>(j);
      bk = static_cast<int>(rmin - r.lambda.begin());
    }
  }
  r.set("non_monotone", best > 1e-7 ? 1.0 : 0.0);
  r.set("cert_i", bi);
  r.set("cert_j", bj);
  r.set("cert_k", bk);
  r.set("cert_margin", bj < 0 ? 0.0 : best);
  r.set("bounds_ok", std::all_of(bounds.begin(), bounds.end(), [](double b) { return b == 1.0; }));
  return r;
}

std::pair<SpaceTimeField, double> carrere_nadin_bump(const TorusGrid& g, const TimeGrid& t,
                                                     const Hamiltonian& h, double threshold,
                                                     double kappa, double start, const SolveSettings& s) {
  double amp = start;
  OperatorParams p;
  for (int i = 0; i < 24; ++i, amp *= 2.0) {
    auto m = traveling_bump(g, t, kappa, amp);
    if (principal_eigenvalue(m, h, p, s).lambda <= threshold) return {std::move(m), amp};
  }
  throw SolverError("no bump amplitude reached the threshold", {});
}

double richardson(double eps_big, double f_big, double eps_small, double f_small) {
  const double q = eps_big / eps_small;
  return (q * f_small - f_big) / (q - 1.0);
}

namespace {

double average_h(const SpaceTimeField& psi, const Hamiltonian& h, Backend backend) {
  const auto g = gradient(psi, backend);
  const auto& x = g[0].values();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += h.value(x[i], g.dim() > 1 ? g[1].values()[i] : 0.0);
  return acc / static_cast<double>(x.size());
}

} // namespace

SweepResult large_heat_slope(const SpaceTimeField& m, const std::vector<double>& eps,
                             const Hamiltonian& h, const OperatorParams& base, const SolveSettings& s) {
  if (eps.size() < 2) throw ValidationError("large heat slope needs at least two eps values");
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (!(eps[i] > 0.0) || (i > 0 && !(eps[i] < eps[i - 1])))
      throw ValidationError("large heat slope: eps values must be positive and decreasing");
  auto r = run_sweep("eps", eps, s, [&](double e) {
    OperatorParams p = base;
    p.eps = e;
    return principal_eigenvalue(m, h, p, s);
  });
  const double avg = space_time_average(m);
  const auto psi = heat_cell_problem(m, base.direction, base.tau, base.mu, s.cell.backend);
  const double pred = average_h(psi, h, s.cell.backend);
  const std::size_t n = eps.size();
  std::vector<double> slope(n), err(n);
  for (std::size_t i = 0; i < n; ++i) {
    slope[i] = (-r.lambda[i] - avg) / eps[i];
    err[i] = std::abs(slope[i] - pred);
  }
  double ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < n; ++i) ratio = std::min(ratio, err[i - 1] / err[i]);
  const double rich = richardson(eps[n - 2], slope[n - 2], eps[n - 1], slope[n - 1]);
  r.add_column("slope", slope);
  r.add_column("error", err);
  r.set("prediction", pred);
  r.set("richardson", rich);
  r.set("abs_error", std::abs(rich - pred));
  r.set("rel_error", std::abs(rich - pred) / std::max(std::abs(pred), 1e-300));
  r.set("min_error_ratio", ratio);
  return r;
}

CrestBound crest_bound(double kappa, double amplitude, double period, const Hamiltonian& h,
                       double eps, double eps_ref, int n) {
  h.check_dimension(1);
  constexpr int kq = 4096;
  std::vector<double> x(kq), g(kq), c(kq), sn(kq);
  for (int i = 0; i < kq; ++i) {
    x[i] = static_cast<double>(i) / kq;
    g[i] = bump_profile(x[i], kappa, amplitude);
    c[i] = std::cos(2 * pi * x[i]);
    sn[i] = std::sin(2 * pi * x[i]);
  }
  // rho_k(x) = exp(k (cos 2 pi x - 1)) normalized; drift 1/T + 2 pi k sin 2 pi x
  auto value = [&](double k, double e) {
    double mass = 0.0, gm = 0.0, cost = 0.0;
    for (int i = 0; i < kq; ++i) {
      const double rho = std::exp(k * (c[i] - 1.0));
      const double a = 1.0 / period + 2 * pi * k * sn[i];
      mass += rho;
      gm += rho * g[i];
      cost += rho * h.legendre(std::span<const double>(&a, 1));
    }
    return (gm - e * cost) / mass;
  };
  // standard deviation ~ 1/(2 pi sqrt k) at least four cells
  const double kmax = std::pow(n / (8.0 * pi), 2);
  double best_k = 0.0, best = value(0.0, eps_ref);
  constexpr int scan = 64;
  for (int i = 1; i <= scan; ++i) {
    const double k = kmax * i / scan;
    const double v = value(k, eps_ref);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  double a = std::max(0.0, best_k - kmax / scan), b = std::min(kmax, best_k + kmax / scan);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 60; ++it) {
    const double k1 = b - gr * (b - a), k2 = a + gr * (b - a);
    if (value(k1, eps_ref) < value(k2, eps_ref)) a = k1; else b = k2;
  }
  const double k = 0.5 * (a + b);
  const double kk = value(k, eps_ref) > best ? k : best_k;
  return {kk, value(kk, eps)};
}

SweepResult amplitude_probe(const TorusGrid& g, const TimeGrid& t, double kappa, double amplitude,
                            const std::vector<double>& eps, const Hamiltonian& h, const SolveSettings& s) {
  if (g.dim() != 1) throw ValidationError("amplitude probe runs on d = 1");
  if (eps.empty()) throw ValidationError("amplitude probe needs eps values");
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (!(eps[i] > 0.0) || (i > 0 && !(eps[i] < eps[i - 1])))
      throw ValidationError("amplitude probe: eps values must be positive and decreasing");
  const auto m = traveling_bump(g, t, kappa, amplitude);
  double crest = 0.0;
  for (int k = 0; k < m.nt(); ++k) {
    auto mk = m.slice(k);
    crest += *std::max_element(mk.begin(), mk.end());
  }
  crest *= t.period() / m.nt();
  if (!(crest > 0.0)) throw ValidationError("amplitude probe: integral of max_x m must be positive");

  auto r = run_sweep("eps", eps, s, [&](double e) {
    return principal_eigenvalue(m * (1.0 / e), h, OperatorParams{}, s);
  });
  const std::size_t n = eps.size();
  std::vector<double> el(n), bound(n);
  const double eref = eps.front();
  double conc = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    el[i] = eps[i] * r.lambda[i];
    const auto cb = crest_bound(kappa, amplitude, t.period(), h, eps[i], eref, g.n());
    bound[i] = cb.bound;
    conc = cb.concentration;
  }
  const double c = bound.front();
  for (double v : el) ok = ok && v <= -c;
  r.add_column("eps_lambda", el);
  r.add_column("crest_bound", bound);
  r.set("crest_integral", crest);
  r.set("concentration", conc);
  r.set("c", c);
  r.set("plateau_ok", ok && c > 0.0 ? 1.0 : 0.0);
  return r;
}

ModeIntegrals two_mode_integrals(const Hamiltonian& h, double amplitude, int j, int l, double period,
                                 double tau, double mu) {
  h.check_dimension(1);
  if (j < 1 || l < 1 || j == l) throw ValidationError("two_mode needs distinct positive modes");
  const double w = 2 * pi / period;
  const cplx I(0.0, 1.0);
  auto integral = [&](double sgn) {
    // tau A' + mu (2 pi j)^2 A = -a cos wt,  tau B' + mu (2 pi l)^2 B = -a sin wt
    const cplx pj = -amplitude / (sgn * I * tau * w + mu * std::pow(2 * pi * j, 2));
    const cplx pl = I * amplitude / (sgn * I * tau * w + mu * std::pow(2 * pi * l, 2));
    const int nx = 128 * std::max(j, l), ntq = 256;
    double acc = 0.0;
    for (int k = 0; k < ntq; ++k) {
      const cplx e = std::exp(I * w * (period * k / ntq));
      const double A = (pj * e).real(), B = (pl * e).real();
      for (int i = 0; i < nx; ++i) {
        const double x = static_cast<double>(i) / nx;
        const double d = 2 * pi * j * A * std::cos(2 * pi * j * x) + 2 * pi * l * B * std::cos(2 * pi * l * x);
        acc += h.value(d, 0.0);
      }
    }
    return acc / (static_cast<double>(nx) * ntq);
  };
  return {integral(1.0), integral(-1.0)};
}

ReversibilityReport reversibility_probe(const Hamiltonian& h, const SpaceTimeField& m,
                                        const std::vector<double>& eps, const OperatorParams& base,
                                        const SolveSettings& s, std::optional<std::pair<int, int>> jl,
                                        double amplitude) {
  if (eps.size() < 2) throw ValidationError("reversibility probe needs at least two eps values");
  for (std::size_t i = 1; i < eps.size(); ++i)
    if (!(eps[i] < eps[i - 1]) || !(eps[i] > 0.0))
      throw ValidationError("reversibility probe: eps values must be positive and decreasing");
  const int n = static_cast<int>(eps.size());
  ReversibilityReport rep;
  rep.eps = eps;
  rep.lambda_plus.assign(n, 0.0);
  rep.lambda_minus.assign(n, 0.0);
  parallel_for(2 * n, worker_count(s.workers), [&](int idx) {
    OperatorParams p = base;
    p.eps = eps[idx / 2];
    p.direction = idx % 2 == 0 ? Direction::Forward : Direction::Backward;
    const double lam = principal_eigenvalue(m, h, p, s).lambda;
    (idx % 2 == 0 ? rep.lambda_plus : rep.lambda_minus)[idx / 2] = lam;
  });
  const double avg = space_time_average(m);
  std::vector<double> sp(n), sm(n);
  for (int i = 0; i < n; ++i) {
    rep.max_lambda_gap = std::max(rep.max_lambda_gap, std::abs(rep.lambda_plus[i] - rep.lambda_minus[i]));
    sp[i] = (-rep.lambda_plus[i] - avg) / eps[i];
    sm[i] = (-rep.lambda_minus[i] - avg) / eps[i];
  }
  rep.slope_plus = richardson(eps[n - 2], sp[n - 2], eps[n - 1], sp[n - 1]);
  rep.slope_minus = richardson(eps[n - 2], sm[n - 2], eps[n - 1], sm[n - 1]);
  const auto psi = heat_cell_problem(m, Direction::Forward, base.tau, base.mu, s.cell.backend);
  const auto theta = heat_cell_problem(m, Direction::Backward, base.tau, base.mu, s.cell.backend);
  rep.prediction_plus = average_h(psi, h, s.cell.backend);
  rep.prediction_minus = average_h(theta, h, s.cell.backend);
  rep.slope_tolerance = std::max(std::abs(rep.slope_plus - rep.prediction_plus),
                                 std::abs(rep.slope_minus - rep.prediction_minus));
  if (jl) {
    if (m.space().dim() != 1) throw ValidationError("mode integrals need d = 1");
    rep.modes = two_mode_integrals(h, amplitude, jl->first, jl->second, m.time().period(), base.tau, base.mu);
  }
  return rep;
}

const char* to_string(Flow f) {
  switch (f) {
    case Flow::Zero: return "zero";
    case Flow::Rational: return "rational";
    case Flow::NearIrrational: return "near_irrational";
    case Flow::Shear: return "shear";
  }
  return "?";
}

Flow flow_from_string(const std::string& s) {
  for (Flow f : {Flow::Zero, Flow::Rational, Flow::NearIrrational, Flow::Shear})
    if (s == to_string(f)) return f;
  throw ConfigError("unknown flow '" + s + "' (zero, rational, near_irrational, shear)");
}

std::pair<int, int> near_irrational_slope(int n) {
  // convergents of sqrt(2): p/q -> (p + 2q)/(p + q)
  int p = 1, q = 1;
  while (2 * q < n) {
    const int np = p + 2 * q, nq = p + q;
    p = np;
    q = nq;
  }
  return {p, q};
}

SpaceVectorField make_flow(Flow f, const TorusGrid& g, bool exploratory) {
  if (g.dim() != 2) throw ValidationError("advection flows live on d = 2");
  const auto st = TimeGrid::stationary();
  switch (f) {
    case Flow::Zero: {
      const double a[2] = {0.0, 0.0};
      return SpaceVectorField::constant(g, st, a);
    }
    case Flow::Rational: {
      const double a[2] = {1.0, 0.0};
      return SpaceVectorField::constant(g, st, a);
    }
    case Flow::NearIrrational: {
      const auto [p, q] = near_irrational_slope(g.n());
      const double a[2] = {1.0, static_cast<double>(p) / q};
      return SpaceVectorField::constant(g, st, a);
    }
    case Flow::Shear: {
      if (!exploratory) throw ValidationError("the shear flow is exploratory only");
      auto u = SpaceTimeField::sample(g, st, [](double, double, double y) { return std::sin(2 * pi * y); });
      return SpaceVectorField({u, SpaceTimeField::constant(g, st, 0.0)});
    }
  }
  throw ValidationError("unknown flow");
}

SweepResult advection_limit(const SpaceTimeField& m_static, Flow flow, const std::vector<double>& eps,
                            const Hamiltonian& h, const SolveSettings& s, bool exploratory) {
  if (!m_static.is_stationary()) throw ValidationError("advection limit needs a static potential");
  const auto& g = m_static.space();
  const auto a = make_flow(flow, g, exploratory);
  for (double e : eps)
    if (!(e > 0.0)) throw ValidationError("advection limit: eps values must be positive");
  auto r = run_sweep("eps", eps, s, [&](double e) {
    OperatorParams p;
    p.mu = e;
    p.eps = e;
    p.advection = a;
    return principal_eigenvalue(m_static, h, p, s);
  });
  double limit = std::numeric_limits<double>::quiet_NaN();
  switch (flow) {
    case Flow::Zero: limit = -m_static.max(); break;
    case Flow::NearIrrational: limit = -space_time_average(m_static); break;
    case Flow::Rational: {
      // invariant measures of (1, 0) average along x
      const int n = g.n();
      double best = -std::numeric_limits<double>::infinity();
      for (int jy = 0; jy < n; ++jy) {
        double acc = 0.0;
        for (int ix = 0; ix < n; ++ix) acc += m_static.values()[g.index(ix, jy)];
        best = std::max(best, acc / n);
      }
      limit = -best;
      break;
    }
    case Flow::Shear: break;
  }
  const std::size_t n = eps.size();
  std::vector<double> err(n);
  const double scale = std::max(std::abs(limit), m_static.max_abs());
  for (std::size_t i = 0; i < n; ++i) err[i] = std::abs(r.lambda[i] - limit) / scale;
  r.add_column("limit", constant_column(n, limit));
  r.add_column("rel_error", err);
  r.set("limit", limit);
  r.set("a_x", 1.0);
  if (flow == Flow::NearIrrational) {
    const auto [p, q] = near_irrational_slope(g.n());
    r.set("a_y", static_cast<double>(p) / q);
  } else {
    r.set("a_y", 0.0);
  }
  if (flow == Flow::Zero) r.set("a_x", 0.0);
  return r;
}

} // namespace ergoham
