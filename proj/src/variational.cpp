#include "ergoham/variational.hpp"

#include <cmath>
#include <limits>

#include "ergoham/errors.hpp"
#include "ergoham/field_ops.hpp"

namespace ergoham {

namespace {

bool constant_hessian(const Hamiltonian& h) {
  return h.kind() != HamiltonianKind::PowerLaw || h.exponent() == 2.0;
}

SpaceTimeField pointwise(const SpaceVectorField& g, const std::function<double(double, double)>& f) {
  const auto& x = g[0].values();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i], g.dim() > 1 ? g[1].values()[i] : 0.0);
  return SpaceTimeField(g[0].space(), g[0].time(), std::move(out));
}

} // namespace

double dv_value(const SpaceTimeField& phi, const InvariantMeasure& eta, const SpaceTimeField& m,
                const Hamiltonian& h, const OperatorParams& params, Backend backend) {
  params.validate_for(m);
  if (!same_shape(phi, m) || !same_shape(eta.density, m))
    throw ValidationError("dv_value: phi, eta and m must share a grid");
  h.check_dimension(m.space().dim());
  const double sgn = params.direction == Direction::Forward ? 1.0 : -1.0;
  const auto g = gradient(phi, backend);
  SpaceTimeField integrand =
      m - laplacian(phi, backend) * params.mu +
      pointwise(g, [&](double p0, double p1) { return params.eps * h.value(p0, p1); });
  if (!phi.is_stationary()) integrand = integrand + time_derivative(phi) * (sgn * params.tau);
  if (params.advection) integrand = integrand + dot(params.advection->broadcast(m.time()), g);
  return integrate_against(integrand, eta.density);
}

DVReport dv_gap(const SpaceTimeField& phi, const EigenResult& eig, const InvariantMeasure& eta_h,
                const SpaceTimeField& m, const Hamiltonian& h, const OperatorParams& params,
                Backend backend) {
  if (!eig.field || eig.form != EigenResult::Form::Phi)
    throw ValidationError("dv_gap needs a phi-form eigen result");
  DVReport r;
  r.value = dv_value(phi, eta_h, m, h, params, backend);
  r.gap = r.value + eig.lambda;
  r.quadratic_form = std::numeric_limits<double>::quiet_NaN();
  if (constant_hessian(h)) {
    const double unit[2] = {1.0, 1.0};
    const Eigen::MatrixXd hs = h.hess(std::span<const double>(unit, m.space().dim()));
    const auto gw = gradient(phi - *eig.field, backend);
    auto q = pointwise(gw, [&](double a, double b) {
      double s = hs(0, 0) * a * a;
      if (hs.rows() > 1) s += 2.0 * hs(0, 1) * a * b + hs(1, 1) * b * b;
      return 0.5 * params.eps * s;
    });
    r.quadratic_form = integrate_against(q, eta_h.density);
  }
  return r;
}

double control_value(const SpaceVectorField& alpha, const SpaceTimeField& m, const Hamiltonian& h,
                     const OperatorParams& params, const MeasureOptions& opt) {
  params.validate_for(m);
  if (!(params.eps > 0.0)) throw ValidationError("control_value requires eps > 0");
  if (!same_shape(alpha[0], m)) throw ValidationError("control_value: alpha and m must share a grid");
  h.check_dimension(m.space().dim());
  const auto eta = control_measure(alpha, params, opt);
  const int d = alpha.dim();
  const double eps = params.eps;
  auto cost = pointwise(alpha, [&](double a0, double a1) {
    const double q[2] = {a0 / eps, a1 / eps};
    return eps * h.legendre(std::span<const double>(q, d));
  });
  return integrate_against(m - cost, eta.density);
}

} // namespace ergoham
