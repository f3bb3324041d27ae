#pragma once

// Test-side reference computations, independent of the library's solvers.

#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using std::numbers::pi;

/// Fourier spectral second-derivative matrix on the unit circle (n even),
/// from the closed form on [0, 2 pi] scaled by (2 pi)^2.
inline Eigen::MatrixXd spectral_d2(int n) {
  const double h = 2 * pi / n;
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        d(i, j) = -pi * pi / (3 * h * h) - 1.0 / 6.0;
      } else {
        const int k = i - j;
        const double s = std::sin(k * h / 2);
        d(i, j) = -((k % 2 == 0) ? 1.0 : -1.0) / (2 * s * s);
      }
    }
  return d * (4 * pi * pi);
}

/// Principal (largest-modulus) eigenvalue of the period map of
/// tau u' = mu D2 u + diag(m(t)) u on [0, T], built with a fourth-order
/// commutator-free Magnus integrator in `steps` steps.
inline double monodromy_lambda(int n, double period, double tau, double mu,
                               const std::function<double(double t, double x)>& m, int steps) {
  const Eigen::MatrixXd d2 = spectral_d2(n);
  auto a = [&](double t) {
    Eigen::MatrixXd out = mu * d2;
    for (int i = 0; i < n; ++i) out(i, i) += m(t, double(i) / n);
    return Eigen::MatrixXd(out / tau);
  };
  const double h = period / steps;
  const double c1 = 0.5 - std::sqrt(3.0) / 6, c2 = 0.5 + std::sqrt(3.0) / 6;
  const double a1 = 0.25 + std::sqrt(3.0) / 6, a2 = 0.25 - std::sqrt(3.0) / 6;
  Eigen::MatrixXd mono = Eigen::MatrixXd::Identity(n, n);
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    const Eigen::MatrixXd A1 = a(t + c1 * h), A2 = a(t + c2 * h);
    const Eigen::MatrixXd e1 = (h * (a2 * A1 + a1 * A2)).exp();
    const Eigen::MatrixXd e2 = (h * (a1 * A1 + a2 * A2)).exp();
    mono = e1 * e2 * mono;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(mono);
  double rho = 0.0;
  for (int i = 0; i < n; ++i) rho = std::max(rho, std::abs(es.eigenvalues()[i]));
  return -(tau / period) * std::log(rho);
}

/// Smallest eigenvalue of -mu D2 - diag(m) (dense symmetric solve).
inline double elliptic_lambda(int n, double mu, const std::function<double(double x)>& m) {
  Eigen::MatrixXd k = -mu * spectral_d2(n);
  for (int i = 0; i < n; ++i) k(i, i) -= m(double(i) / n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  return es.eigenvalues().minCoeff();
}

} // namespace oracle
