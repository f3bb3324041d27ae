#pragma once

#include "ergoham/operator.hpp"
#include "ergoham/spectral.hpp"

namespace ergoham {

/// Nonnegative space-time density with per-slice mass 1/T (mass 1 for a
/// stationary grid). Integrals against it: integrate_against(f, density).
struct InvariantMeasure {
  SpaceTimeField density;
  std::vector<double> per_slice_mass;
  int periods = 0;
  /// L1 change between successive periods.
  std::vector<double> history;
  /// Largest |mass - 1| of the normalized iterate before renormalization.
  double mass_drift = 0.0;
};

struct MeasureOptions {
  Backend backend = Backend::Spectral;
  double tol_l1 = 1e-9;
  int max_periods = 5000;
  double max_step = 0.02;
  double cfl = 0.5;
  int min_substeps = 1;
  /// Pseudo-period (units of s/tau) for stationary drifts.
  double stationary_period = 1.0;
  /// Initial density (normalized internally); uniform when absent.
  std::optional<SpaceTimeField> initial;
};

/// Solves  -tau d_t eta - mu Lap eta - div(eta b) = 0  (forward direction;
/// +tau d_t for the backward one), the adjoint of
/// tau d_t f - mu Lap f + <b, grad f>. The time-reversed equation is relaxed
/// in divergence form until successive periods agree in L1.
InvariantMeasure invariant_for_drift(const SpaceVectorField& b, const OperatorParams& params,
                                     const MeasureOptions& opt = {});

/// Drift of the linearized cell operator at phi: eps grad_p H(grad phi) + A.
SpaceVectorField optimal_drift(const SpaceTimeField& phi, const Hamiltonian& h,
                               const OperatorParams& params, Backend backend = Backend::Spectral);

/// Invariant measure eta_H of a cell-problem solution (phi-form).
InvariantMeasure invariant_for_solution(const EigenResult& eig, const Hamiltonian& h,
                                        const OperatorParams& params,
                                        const MeasureOptions& opt = {});

/// Measure of the controlled dynamics with control alpha: drift alpha + A.
InvariantMeasure control_measure(const SpaceVectorField& alpha, const OperatorParams& params,
                                 const MeasureOptions& opt = {});

/// |integral of (+/- tau d_t f - mu Lap f + <b, grad f>) d eta| for a test
/// function f (weak-form stationarity residual).
double weak_residual(const InvariantMeasure& eta, const SpaceVectorField& b, const SpaceTimeField& f,
                     const OperatorParams& params, Backend backend = Backend::Spectral);

} // namespace ergoham
