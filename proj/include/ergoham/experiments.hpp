#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ergoham/cell_solver.hpp"
#include "ergoham/linear_eig.hpp"
#include "ergoham/variational.hpp"

namespace ergoham {

/// Worker count for sweeps: `requested` (0 = hardware concurrency), capped
/// by the ERGOHAM_WORKERS environment variable when set.
int worker_count(int requested = 0);

/// Runs fn(0..count-1) on up to `workers` threads. The first exception
/// (lowest index) is rethrown after all tasks finish.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

struct SolveSettings {
  LinearOptions linear;
  CellOptions cell;
  /// Use Hopf-Cole for isotropic quadratic H (rescaled when eps c != mu).
  bool linear_route = true;
  int workers = 1;
};

/// Principal eigenpair. Isotropic H = c|p|^2 with eps > 0 goes through the
/// linear problem with potential (eps c/mu) m (u-form result, residual of
/// the linear equation rescaled to lambda units; static m uses the dense
/// elliptic solve); everything else through relaxation (phi-form).
EigenResult principal_eigenvalue(const SpaceTimeField& m, const Hamiltonian& h,
                                 const OperatorParams& params, const SolveSettings& s = {});

/// Elliptic eigenvalue xi of a time-independent potential, same dispatch.
double elliptic_eigenvalue(const SpaceTimeField& m_static, const Hamiltonian& h,
                           const OperatorParams& params, const SolveSettings& s = {});

struct SweepResult {
  std::string parameter;
  std::vector<double> values;
  std::vector<double> lambda;
  std::vector<double> residual;
  /// Extra per-entry columns in output order.
  std::vector<std::pair<std::string, std::vector<double>>> columns;
  /// Scalar outcomes: predicted limits, extrapolations, verdicts (0/1).
  std::vector<std::pair<std::string, double>> summary;

  const std::vector<double>& column(const std::string& name) const;
  double get(const std::string& name) const;
  void set(const std::string& name, double v);
  void add_column(const std::string& name, std::vector<double> v);
};

/// Periodic solution with zero space-time mean of
///   forward:   tau d_t psi - mu Lap psi = avg(m) - m
///   backward: -tau d_t psi - mu Lap psi = avg(m) - m
/// Diagonal in space-time Fourier modes (the Nyquist time bin carries no
/// derivative, as in time_derivative).
SpaceTimeField heat_cell_problem(const SpaceTimeField& m, Direction dir = Direction::Forward,
                                 double tau = 1.0, double mu = 1.0,
                                 Backend backend = Backend::Spectral);

/// True when m(t,x) = m0(x) + h(t) up to 1e-12 (1 + max|m|).
bool is_separable(const SpaceTimeField& m);

/// lambda(tau) over `taus` with mu, eps, H from `base`. Limits: limit_high =
/// xi(time average of m), limit_low = time average of xi(m(t,.)).
/// Columns: limit_low, limit_high, gap_low, gap_high, monotone_ok.
/// lambda is non-decreasing in tau (checked with 1e-7 slack).
SweepResult sweep_frequency(const SpaceTimeField& m, const std::vector<double>& taus,
                            const Hamiltonian& h, const OperatorParams& base,
                            const SolveSettings& s = {});

/// lambda(mu) for  tau d_t + mu (-Lap + H(grad)) + m  (eps = mu). Limits:
/// limit_low = -max_x avg_t m (mu -> 0), limit_high = -avg m (mu -> inf).
/// Summary carries a non-monotonicity certificate (cert_i, cert_j, cert_k,
/// cert_margin) when one exists.
SweepResult sweep_diffusion(const SpaceTimeField& m, const std::vector<double>& mus,
                            const Hamiltonian& h, const OperatorParams& base,
                            const SolveSettings& s = {});

/// Traveling bump whose amplitude is doubled from `start` until
/// lambda(m, mu = eps = 1) <= threshold. Returns the potential and amplitude.
std::pair<SpaceTimeField, double> carrere_nadin_bump(const TorusGrid& g, const TimeGrid& t,
                                                     const Hamiltonian& h, double threshold = -1.0,
                                                     double kappa = 1.0, double start = 1.0,
                                                     const SolveSettings& s = {});

/// Richardson extrapolation of f(eps) = a + b eps from two samples.
double richardson(double eps_big, double f_big, double eps_small, double f_small);

/// slope(eps) = (-lambda(eps) - avg m)/eps against avg H(grad psi0).
/// Summary: prediction, richardson, rel_error, min_error_ratio.
SweepResult large_heat_slope(const SpaceTimeField& m, const std::vector<double>& eps,
                             const Hamiltonian& h, const OperatorParams& base,
                             const SolveSettings& s = {});

/// Lower bound c(eps) <= -eps lambda(eps) for  d_t - Lap + H(grad) + m/eps, m the
/// traveling bump (kappa, amplitude, period T): the control value of the
/// crest measure rho_k(x - t/T)/T with drift 1/T - (log rho_k)'. The
/// concentration k is chosen to maximize the bound at `eps_ref`, subject to
/// a width of at least four grid cells.
struct CrestBound {
  double concentration = 0.0;
  double bound = 0.0;
};
CrestBound crest_bound(double kappa, double amplitude, double period, const Hamiltonian& h,
                       double eps, double eps_ref, int n);

/// lambda(eps) for  d_t - Lap + H(grad) + m/eps  with m the d = 1 traveling bump.
/// Columns: eps_lambda, crest_bound. Summary: c (bound at the largest eps),
/// plateau_ok (eps lambda <= -c for every eps).
SweepResult amplitude_probe(const TorusGrid& g, const TimeGrid& t, double kappa, double amplitude,
                            const std::vector<double>& eps, const Hamiltonian& h,
                            const SolveSettings& s = {});

/// Mode-level witness for two_mode potentials (d = 1): grid-free quadrature
/// of avg H(d_x psi) and avg H(d_x theta), psi and theta the closed-form
/// periodic solutions of the forward and backward heat cell problems.
struct ModeIntegrals {
  double forward = 0.0;
  double backward = 0.0;
};
ModeIntegrals two_mode_integrals(const Hamiltonian& h, double amplitude, int j, int l, double period,
                                 double tau, double mu);

struct ReversibilityReport {
  std::vector<double> eps;
  std::vector<double> lambda_plus;
  std::vector<double> lambda_minus;
  double max_lambda_gap = 0.0;
  /// Richardson slopes of the forward and backward problems.
  double slope_plus = 0.0;
  double slope_minus = 0.0;
  /// avg H(grad psi) and avg H(grad theta) from heat_cell_problem.
  double prediction_plus = 0.0;
  double prediction_minus = 0.0;
  /// Uncertainty of the slopes: max |slope - prediction| over both directions.
  double slope_tolerance = 0.0;
  std::optional<ModeIntegrals> modes;
};
ReversibilityReport reversibility_probe(const Hamiltonian& h, const SpaceTimeField& m,
                                        const std::vector<double>& eps,
                                        const OperatorParams& base, const SolveSettings& s = {},
                                        std::optional<std::pair<int, int>> two_mode_jl = {},
                                        double two_mode_amplitude = 1.0);

enum class Flow { Zero, Rational, NearIrrational, Shear };
const char* to_string(Flow f);
Flow flow_from_string(const std::string& s);

/// Direction (1, p/q) with p/q the first continued-fraction convergent of
/// sqrt(2) whose denominator is at least n/2.
std::pair<int, int> near_irrational_slope(int n);

/// Stationary advection field of a shipped flow on a d = 2 grid. Shear
/// (sin 2 pi y, 0) is exploratory and needs the flag.
SpaceVectorField make_flow(Flow f, const TorusGrid& g, bool exploratory = false);

/// lambda(eps, A) of  -eps Lap + eps H(grad) + <A, grad> + m  for a static m on
/// d = 2. Summary: limit (NaN for the shear flow).
SweepResult advection_limit(const SpaceTimeField& m_static, Flow flow, const std::vector<double>& eps,
                            const Hamiltonian& h, const SolveSettings& s = {},
                            bool exploratory = false);

/// Geometric grid lo..hi with `count` points.
std::vector<double> geometric_grid(double lo, double hi, int count);

} // namespace ergoham
