#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ergoham/field.hpp"

namespace ergoham {

using cplx = std::complex<double>;

/// Spatial discretization used for derivatives.
enum class Backend {
  Spectral,         ///< Fourier pseudo-spectral, exact on resolved modes.
  FiniteDifference  ///< Second-order central differences.
};

const char* to_string(Backend b);
Backend backend_from_string(const std::string& s);

/// Real-to-complex FFT for one torus grid. Owns its plans and scratch
/// buffers, so an instance must not be shared between threads.
class Fft {
public:
  explicit Fft(const TorusGrid& grid);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t spectral_size() const noexcept { return nspec_; }

  void forward(std::span<const double> in, std::span<cplx> out);
  /// Normalized inverse: inverse(forward(f)) == f.
  void inverse(std::span<const cplx> in, std::span<double> out);

  /// Signed integer wavenumber of spectral index `idx` along `axis`.
  int wavenumber(std::size_t idx, int axis) const noexcept;

private:
  struct Plans;
  TorusGrid grid_;
  std::size_t nspec_;
  std::unique_ptr<Plans> plans_;
};

/// Per-slice differential operators on one grid with one backend.
/// Holds scratch buffers: one instance per thread.
class DiffOps {
public:
  DiffOps(const TorusGrid& grid, Backend backend);

  const TorusGrid& grid() const noexcept { return fft_.grid(); }
  Backend backend() const noexcept { return backend_; }
  Fft& fft() noexcept { return fft_; }
  std::size_t spectral_size() const noexcept { return fft_.spectral_size(); }

  /// out[axis] receives d f / d x_axis.
  void gradient(std::span<const double> f, std::vector<std::vector<double>>& out);
  void laplacian(std::span<const double> f, std::span<double> out);
  void divergence(const std::vector<std::vector<double>>& v, std::span<double> out);

  /// Backward and forward one-sided differences along `axis`: plain
  /// (order 1) or ENO second-order reconstructions (order 2).
  void one_sided(std::span<const double> f, int axis, std::span<double> backward,
                 std::span<double> forward, int order = 1) const;

  /// Fourier symbol of the discrete Laplacian (real, <= 0).
  const std::vector<double>& laplacian_symbol() const noexcept { return lap_symbol_; }
  /// Fourier symbol of d/dx_axis (purely imaginary; zero at Nyquist).
  const std::vector<cplx>& derivative_symbol(int axis) const { return deriv_symbol_.at(axis); }
  /// True for modes kept by the 2/3 rule.
  const std::vector<char>& dealias_mask() const noexcept { return dealias_; }

  /// Gradient from a spectrum; `dealias` truncates to the 2/3 band first.
  void gradient_from_spectrum(std::span<const cplx> fhat, bool dealias,
                              std::vector<std::vector<double>>& out);

private:
  Fft fft_;
  Backend backend_;
  std::vector<double> lap_symbol_;
  std::vector<std::vector<cplx>> deriv_symbol_;
  std::vector<char> dealias_;
  std::vector<cplx> work_;
  std::vector<cplx> work2_;
};

/// Complex DFT of fixed length, used along the time axis.
class ComplexDft {
public:
  explicit ComplexDft(int n);
  ~ComplexDft();
  ComplexDft(const ComplexDft&) = delete;
  ComplexDft& operator=(const ComplexDft&) = delete;

  int size() const noexcept { return n_; }
  void forward(std::span<const cplx> in, std::span<cplx> out);
  /// Normalized inverse.
  void inverse(std::span<const cplx> in, std::span<cplx> out);

private:
  struct Plans;
  int n_;
  std::unique_ptr<Plans> plans_;
};

/// Signed frequency index of DFT bin j for length n.
inline int signed_frequency(int j, int n) noexcept { return j <= n / 2 ? j : j - n; }

/// Trigonometric interpolation of a periodic field in time. Stationary
/// fields evaluate to their single slice.
class TimeInterpolant {
public:
  explicit TimeInterpolant(const SpaceTimeField& f);

  void evaluate(double t, std::span<double> out) const;
  std::size_t nspace() const noexcept { return nspace_; }

private:
  std::size_t nspace_;
  int nt_;
  double period_;
  bool stationary_;
  std::vector<double> slice0_;
  /// coefficients, mode-major: coef_[j * nspace + i], j = 0..nt/2
  std::vector<cplx> coef_;
};

} // namespace ergoham
