#pragma once

#include <optional>

#include "ergoham/operator.hpp"
#include "ergoham/spectral.hpp"

namespace ergoham {

struct CellOptions {
  Backend backend = Backend::Spectral;
  /// Below this diffusivity the solver switches to the finite-difference
  /// backend with Godunov upwinding of H and A (unless `upwind` is set).
  double upwind_below_mu = 0.02;
  /// Force (true) or forbid (false) upwinding regardless of mu.
  std::optional<bool> upwind;
  /// Oscillation tolerance; <= 0 selects 1e-8 (1 + max|m|).
  double tol_drift = 0.0;
  int max_periods = 2000;
  /// Step bounds: dt step_rate(m, tau) <= max_step and
  /// dt (eps max|grad_p H| + max|A|) / (tau h) <= cfl.
  double max_step = 0.02;
  double cfl = 0.5;
  int min_substeps = 1;
  int max_halvings = 12;
  /// Pseudo-period (in units of s/tau) for time-independent problems.
  double stationary_period = 1.0;
  /// psi(0); zero when absent. Only its first slice is used.
  std::optional<SpaceTimeField> initial;
};

struct RelaxationDiagnostics {
  int periods_run = 0;
  /// Per-period mean increments c_k.
  std::vector<double> drift_history;
  /// sup |psi((k+1)T) - psi(kT) - c_k| of the accepted period.
  double oscillation = 0.0;
  int substeps = 0;  ///< steps per time slice at acceptance
  double dt = 0.0;
  int dt_halvings = 0;
  Backend backend = Backend::Spectral;
  bool upwind = false;
};

struct CellSolution {
  EigenResult eig;
  RelaxationDiagnostics diag;
};

/// Effective Hamiltonian lambda and corrector phi of
///   lambda + tau d_t phi - mu Lap phi + eps H(grad phi) + <A, grad phi> = -m
/// by long-time relaxation of  tau psi_s = mu Lap psi - eps H(grad psi) - <A, grad psi> - m.
/// Backward direction solves the time-reversed problem. Time-independent m
/// (stationary grid) gives the elliptic eigenvalue.
CellSolution effective_hamiltonian(const SpaceTimeField& m, const Hamiltonian& h,
                                   const OperatorParams& params, const CellOptions& opt = {});

/// Discretization used when evaluating the cell-problem residual.
struct ResidualScheme {
  Backend backend = Backend::Spectral;
  bool upwind = false;
};

/// sup-norm of lambda +/- tau d_t phi - mu Lap phi + eps H(grad phi) + <A, grad phi> + m.
/// `eig` must hold a phi-form field.
double residual(const EigenResult& eig, const SpaceTimeField& m, const Hamiltonian& h,
                const OperatorParams& params, ResidualScheme scheme = {});

/// Scheme matching what effective_hamiltonian used for these inputs.
ResidualScheme scheme_for(const OperatorParams& params, const CellOptions& opt);

} // namespace ergoham
