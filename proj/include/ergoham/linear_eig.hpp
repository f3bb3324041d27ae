#pragma once

#include "ergoham/operator.hpp"
#include "ergoham/spectral.hpp"

namespace ergoham {

struct LinearOptions {
  int max_iters = 5000;
  /// Stop when max/min of the pointwise ratio of successive period-map
  /// iterates is within 1 + ratio_tol.
  double ratio_tol = 1e-10;
  /// Step bound dt * step_rate(m, tau) <= max_step (see time_table.hpp).
  double max_step = 0.02;
  /// Lower bound on steps per time slice (accuracy knob).
  int min_substeps = 1;
  Backend backend = Backend::Spectral;
};

/// Principal eigenpair of  tau d_t u - mu Lap u + <A, grad u> - m u = lambda u
/// (time-periodic, forward direction; the backward direction runs the
/// time-reversed potential). This is the Hopf-Cole image of the cell
/// problem with H = |p|^2 and eps = mu, which is enforced.
/// Returns Form::U with u > 0 and unit space-time quadratic mean.
EigenResult parabolic_principal_eig(const SpaceTimeField& m, const OperatorParams& params,
                                    const LinearOptions& opt = {});

/// As above with an explicit Hamiltonian; requires linear_route_applies.
EigenResult parabolic_principal_eig(const SpaceTimeField& m, const Hamiltonian& h,
                                    const OperatorParams& params, const LinearOptions& opt = {});

/// Elliptic principal eigenvalue xi of  -mu Lap + eps H(grad) + <A, grad> - m
/// for a time-independent m. On the linear route this is the smallest
/// eigenvalue of -mu Lap + <A, grad> - m (dense shifted inverse iteration,
/// Form::U result); otherwise the cell solver runs on a stationary grid
/// (Form::Phi result). `params.tau` and `params.direction` are ignored.
EigenResult elliptic_xi(const SpaceTimeField& m_static, const Hamiltonian& h,
                        const OperatorParams& params, Backend backend = Backend::Spectral);

/// Shorthand for H = |p|^2, eps = mu.
EigenResult elliptic_xi(const SpaceTimeField& m_static, double mu,
                        Backend backend = Backend::Spectral);

/// phi = -ln u recentred to zero space-time mean. DomainError if u <= 0 anywhere.
SpaceTimeField hopf_cole(const SpaceTimeField& u);
/// u = exp(-phi) normalized to unit space-time quadratic mean.
SpaceTimeField inverse_hopf_cole(const SpaceTimeField& phi);

/// sup-norm of  lambda + tau d_t phi - mu Lap phi + mu |grad phi|^2 + <A, grad phi> + m
/// (the quadratic cell-problem residual for a Hopf-Cole field).
double quadratic_hj_residual(double lambda, const SpaceTimeField& phi, const SpaceTimeField& m,
                             const OperatorParams& params, Backend backend = Backend::Spectral);

} // namespace ergoham
