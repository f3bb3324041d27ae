#pragma once

#include "ergoham/invariant_measure.hpp"

namespace ergoham {

struct DVReport {
  double value = 0.0;
  /// value + lambda; nonnegative up to discretization error.
  double gap = 0.0;
  /// (eps/2) integral of Hess H [grad w, grad w] d eta_H with w = phi - phi_H,
  /// exact when the Hessian is constant; NaN otherwise.
  double quadratic_form = 0.0;
};

/// integral of (+/- tau d_t phi - mu Lap phi + eps H(grad phi) + <A, grad phi> + m) d eta.
double dv_value(const SpaceTimeField& phi, const InvariantMeasure& eta, const SpaceTimeField& m,
                const Hamiltonian& h, const OperatorParams& params,
                Backend backend = Backend::Spectral);

DVReport dv_gap(const SpaceTimeField& phi, const EigenResult& eig, const InvariantMeasure& eta_h,
                const SpaceTimeField& m, const Hamiltonian& h, const OperatorParams& params,
                Backend backend = Backend::Spectral);

/// J(alpha) = integral of (m - eps L(alpha / eps)) d eta_alpha, where alpha is the
/// controlled part of the drift (eta_alpha is taken for alpha + A) and
/// eps L(./eps) is the conjugate of eps H. J(alpha) <= -lambda with equality
/// at alpha = eps grad_p H(grad phi_H). Requires eps > 0.
double control_value(const SpaceVectorField& alpha, const SpaceTimeField& m, const Hamiltonian& h,
                     const OperatorParams& params, const MeasureOptions& opt = {});

} // namespace ergoham
