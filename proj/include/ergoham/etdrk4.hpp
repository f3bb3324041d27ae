#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ergoham/spectral.hpp"

namespace ergoham {

/// Fourth-order exponential time differencing (Cox-Matthews stages,
/// Kassam-Trefethen contour evaluation of the phi-functions) for
///   v' = L v + N(t, v)
/// with L diagonal in Fourier space. The state lives in spectral space.
class Etdrk4 {
public:
  /// N(t, vhat) -> nhat. Must write every entry of nhat.
  using Nonlinear = std::function<void(double t, std::span<const cplx> vhat, std::span<cplx> nhat)>;

  /// `symbol` is the real diagonal of L per spectral index.
  Etdrk4(std::vector<double> symbol, double dt);

  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return e_.size(); }

  /// Advances vhat from t to t + dt in place.
  void step(double t, std::vector<cplx>& vhat, const Nonlinear& n);

private:
  double dt_;
  std::vector<double> e_, e2_, q_, f1_, f2_, f3_;
  std::vector<cplx> nv_, na_, nb_, nc_, a_, b_, c_;
};

} // namespace ergoham
