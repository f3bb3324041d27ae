#include "ergoham/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "ergoham/errors.hpp"

namespace ergoham {

namespace {

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

const char* to_string(Backend b) {
  return b == Backend::Spectral ? "spectral" : "fd";
}

Backend backend_from_string(const std::string& s) {
  if (s == "spectral") return Backend::Spectral;
  if (s == "fd" || s == "finite_difference") return Backend::FiniteDifference;
  throw ValidationError("unknown backend '" + s + "' (expected spectral or fd)");
}

struct Fft::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(spec);
  }
};

Fft::Fft(const TorusGrid& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
  const int n = grid.n();
  nspec_ = grid.dim() == 1 ? static_cast<std::size_t>(n / 2 + 1)
                           : static_cast<std::size_t>(n) * (n / 2 + 1);
  std::lock_guard lock(planner_mutex());
  plans_->real = fftw_alloc_real(grid.size());
  plans_->spec = fftw_alloc_complex(nspec_);
  if (grid.dim() == 1) {
    plans_->fwd = fftw_plan_dft_r2c_1d(n, plans_->real, plans_->spec, FFTW_ESTIMATE);
    plans_->inv = fftw_plan_dft_c2r_1d(n, plans_->spec, plans_->real, FFTW_ESTIMATE);
  } else {
    plans_->fwd = fftw_plan_dft_r2c_2d(n, n, plans_->real, plans_->spec, FFTW_ESTIMATE);
    plans_->inv = fftw_plan_dft_c2r_2d(n, n, plans_->spec, plans_->real, FFTW_ESTIMATE);
  }
  if (!plans_->fwd || !plans_->inv) throw Error("FFTW planning failed");
}

Fft::~Fft() = default;

void Fft::forward(std::span<const double> in, std::span<cplx> out) {
  std::copy(in.begin(), in.end(), plans_->real);
  fftw_execute(plans_->fwd);
  auto* s = reinterpret_cast<const cplx*>(plans_->spec);
  std::copy(s, s + nspec_, out.begin());
}

void Fft::inverse(std::span<const cplx> in, std::span<double> out) {
  std::copy(in.begin(), in.end(), reinterpret_cast<cplx*>(plans_->spec));
  fftw_execute(plans_->inv);
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = plans_->real[i] * scale;
}

int Fft::wavenumber(std::size_t idx, int axis) const noexcept {
  const int n = grid_.n();
  if (grid_.dim() == 1) return static_cast<int>(idx);
  const int half = n / 2 + 1;
  const int i = static_cast<int>(idx) / half;
  const int j = static_cast<int>(idx) % half;
  return axis == 0 ? signed_frequency(i, n) : j;
}

DiffOps::DiffOps(const TorusGrid& grid, Backend backend)
    : fft_(grid), backend_(backend) {
  const std::size_t ns = fft_.spectral_size();
  const int n = grid.n();
  const double h = grid.h();
  lap_symbol_.assign(ns, 0.0);
  deriv_symbol_.assign(grid.dim(), std::vector<cplx>(ns));
  dealias_.assign(ns, 1);
  for (std::size_t s = 0; s < ns; ++s) {
    for (int a = 0; a < grid.dim(); ++a) {
      const int k = fft_.wavenumber(s, a);
      const bool nyquist = std::abs(k) == n / 2;
      if (backend == Backend::Spectral) {
        lap_symbol_[s] -= kTwoPi * kTwoPi * k * k;
        deriv_symbol_[a][s] = nyquist ? cplx(0.0) : cplx(0.0, kTwoPi * k);
      } else {
        const double sn = std::sin(std::numbers::pi * k * h);
        lap_symbol_[s] -= 4.0 * sn * sn / (h * h);
        deriv_symbol_[a][s] = cplx(0.0, std::sin(kTwoPi * k * h) / h);
      }
      if (3 * std::abs(k) > n) dealias_[s] = 0;
    }
  }
  work_.resize(ns);
  work2_.resize(ns);
}

void DiffOps::gradient(std::span<const double> f, std::vector<std::vector<double>>& out) {
  const auto& g = grid();
  out.resize(g.dim());
  for (auto& o : out) o.resize(g.size());
  if (backend_ == Backend::Spectral) {
    fft_.forward(f, work_);
    gradient_from_spectrum(work_, false, out);
    return;
  }
  const int n = g.n();
  const double inv2h = 0.5 / g.h();
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) out[0][i] = (f[g.index(i + 1)] - f[g.index(i - 1)]) * inv2h;
    return;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto c = g.index(i, j);
      out[0][c] = (f[g.index(i + 1, j)] - f[g.index(i - 1, j)]) * inv2h;
      out[1][c] = (f[g.index(i, j + 1)] - f[g.index(i, j - 1)]) * inv2h;
    }
  }
}

void DiffOps::gradient_from_spectrum(std::span<const cplx> fhat, bool dealias,
                                     std::vector<std::vector<double>>& out) {
  const auto& g = grid();
  out.resize(g.dim());
  for (int a = 0; a < g.dim(); ++a) {
    out[a].resize(g.size());
    const auto& sym = deriv_symbol_[a];
    for (std::size_t s = 0; s < fhat.size(); ++s) {
      work2_[s] = (dealias && !dealias_[s]) ? cplx(0.0) : sym[s] * fhat[s];
    }
    fft_.inverse(work2_, out[a]);
  }
}

void DiffOps::laplacian(std::span<const double> f, std::span<double> out) {
  const auto& g = grid();
  if (backend_ == Backend::Spectral) {
    fft_.forward(f, work_);
    for (std::size_t s = 0; s < work_.size(); ++s) work_[s] *= lap_symbol_[s];
    fft_.inverse(work_, out);
    return;
  }
  const int n = g.n();
  const double ih2 = 1.0 / (g.h() * g.h());
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i)
      out[i] = (f[g.index(i + 1)] - 2.0 * f[i] + f[g.index(i - 1)]) * ih2;
    return;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto c = g.index(i, j);
      out[c] = (f[g.index(i + 1, j)] + f[g.index(i - 1, j)] + f[g.index(i, j + 1)] +
                f[g.index(i, j - 1)] - 4.0 * f[c]) * ih2;
    }
  }
}

void DiffOps::divergence(const std::vector<std::vector<double>>& v, std::span<double> out) {
  const auto& g = grid();
  if (static_cast<int>(v.size()) != g.dim()) throw ValidationError("divergence: wrong component count");
  if (backend_ == Backend::Spectral) {
    std::fill(work2_.begin(), work2_.end(), cplx(0.0));
    for (int a = 0; a < g.dim(); ++a) {
      fft_.forward(v[a], work_);
      const auto& sym = deriv_symbol_[a];
      for (std::size_t s = 0; s < work_.size(); ++s) work2_[s] += sym[s] * work_[s];
    }
    work2_[0] = 0.0;
    fft_.inverse(work2_, out);
    return;
  }
  const int n = g.n();
  const double inv2h = 0.5 / g.h();
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) out[i] = (v[0][g.index(i + 1)] - v[0][g.index(i - 1)]) * inv2h;
    return;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out[g.index(i, j)] = (v[0][g.index(i + 1, j)] - v[0][g.index(i - 1, j)] +
                            v[1][g.index(i, j + 1)] - v[1][g.index(i, j - 1)]) * inv2h;
    }
  }
}

namespace {

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

} // namespace

void DiffOps::one_sided(std::span<const double> f, int axis, std::span<double> backward,
                        std::span<double> forward, int order) const {
  const auto& g = grid();
  const int n = g.n();
  const double ih = 1.0 / g.h();
  const int rows = g.dim() == 1 ? 1 : n;
  const int cols = g.dim() == 1 ? n : n;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      // values at offsets -2..2 along the axis
      auto at = [&](int o) {
        if (g.dim() == 1) return f[g.index(j + o)];
        return axis == 0 ? f[g.index(i + o, j)] : f[g.index(i, j + o)];
      };
      const auto c = g.dim() == 1 ? g.index(j) : g.index(i, j);
      const double fm2 = at(-2), fm1 = at(-1), f0 = at(0), fp1 = at(1), fp2 = at(2);
      double b = (f0 - fm1) * ih, fw = (fp1 - f0) * ih;
      if (order == 2) {
        // ENO2: correct with the smaller of the adjacent second differences
        const double dm = fm2 - 2 * fm1 + f0, d0 = fm1 - 2 * f0 + fp1, dp = f0 - 2 * fp1 + fp2;
        b += 0.5 * minmod(dm, d0) * ih;
        fw -= 0.5 * minmod(d0, dp) * ih;
      }
      backward[c] = b;
      forward[c] = fw;
    }
  }
}

struct ComplexDft::Plans {
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(in);
    fftw_free(out);
  }
};

ComplexDft::ComplexDft(int n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n < 1) throw ValidationError("ComplexDft: length must be positive");
  std::lock_guard lock(planner_mutex());
  plans_->in = fftw_alloc_complex(n);
  plans_->out = fftw_alloc_complex(n);
  plans_->fwd = fftw_plan_dft_1d(n, plans_->in, plans_->out, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->inv = fftw_plan_dft_1d(n, plans_->in, plans_->out, FFTW_BACKWARD, FFTW_ESTIMATE);
}

ComplexDft::~ComplexDft() = default;

void ComplexDft::forward(std::span<const cplx> in, std::span<cplx> out) {
  std::copy(in.begin(), in.end(), reinterpret_cast<cplx*>(plans_->in));
  fftw_execute(plans_->fwd);
  auto* o = reinterpret_cast<const cplx*>(plans_->out);
  std::copy(o, o + n_, out.begin());
}

void ComplexDft::inverse(std::span<const cplx> in, std::span<cplx> out) {
  std::copy(in.begin(), in.end(), reinterpret_cast<cplx*>(plans_->in));
  fftw_execute(plans_->inv);
  auto* o = reinterpret_cast<const cplx*>(plans_->out);
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] = o[i] * scale;
}

TimeInterpolant::TimeInterpolant(const SpaceTimeField& f)
    : nspace_(f.nspace()), nt_(f.nt()), period_(f.time().period()),
      stationary_(f.is_stationary()) {
  if (stationary_) {
    auto s = f.slice(0);
    slice0_.assign(s.begin(), s.end());
    return;
  }
  const int half = nt_ / 2;
  coef_.assign(static_cast<std::size_t>(half + 1) * nspace_, cplx(0.0));
  ComplexDft dft(nt_);
  std::vector<cplx> series(nt_), spec(nt_);
  for (std::size_t i = 0; i < nspace_; ++i) {
    for (int k = 0; k < nt_; ++k) series[k] = f(k, i);
    dft.forward(series, spec);
    for (int j = 0; j <= half; ++j) {
      // Real interpolant: c_0 + 2 Re sum c_j e^{i w t}; the Nyquist bin of an
      // even-length series keeps weight 1 and only its cosine part.
      double w = (j == 0 || (nt_ % 2 == 0 && j == half)) ? 1.0 : 2.0;
      coef_[static_cast<std::size_t>(j) * nspace_ + i] = spec[j] * (w / nt_);
    }
  }
}

void TimeInterpolant::evaluate(double t, std::span<double> out) const {
  if (stationary_) {
    std::copy(slice0_.begin(), slice0_.end(), out.begin());
    return;
  }
  const int half = nt_ / 2;
  std::fill(out.begin(), out.end(), 0.0);
  for (int j = 0; j <= half; ++j) {
    const double arg = 2.0 * std::numbers::pi * j * t / period_;
    const bool nyq = nt_ % 2 == 0 && j == half;
    const double c = std::cos(arg);
    const double s = nyq ? 0.0 : std::sin(arg);
    const cplx* row = coef_.data() + static_cast<std::size_t>(j) * nspace_;
    for (std::size_t i = 0; i < nspace_; ++i) {
      out[i] += row[i].real() * c - row[i].imag() * s;
    }
  }
}

} // namespace ergoham
