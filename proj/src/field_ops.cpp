#include "ergoham/field_ops.hpp"

#include <numbers>
#include <numeric>

#include "ergoham/errors.hpp"

namespace ergoham {

SpaceVectorField gradient(const SpaceTimeField& f, Backend backend) {
  DiffOps ops(f.space(), backend);
  const int d = f.space().dim();
  std::vector<std::vector<double>> comps(d);
  std::vector<std::vector<double>> g;
  for (int k = 0; k < f.nt(); ++k) {
    ops.gradient(f.slice(k), g);
    for (int a = 0; a < d; ++a) comps[a].insert(comps[a].end(), g[a].begin(), g[a].end());
  }
  std::vector<SpaceTimeField> out;
  for (int a = 0; a < d; ++a) out.emplace_back(f.space(), f.time(), std::move(comps[a]));
  return SpaceVectorField(std::move(out));
}

SpaceTimeField laplacian(const SpaceTimeField& f, Backend backend) {
  DiffOps ops(f.space(), backend);
  std::vector<double> v(f.values().size());
  for (int k = 0; k < f.nt(); ++k) {
    ops.laplacian(f.slice(k),
                  std::span<double>(v).subspan(static_cast<std::size_t>(k) * f.nspace(), f.nspace()));
  }
  return SpaceTimeField(f.space(), f.time(), std::move(v));
}

SpaceTimeField divergence(const SpaceVectorField& vf, Backend backend) {
  DiffOps ops(vf.space(), backend);
  const auto ns = vf.space().size();
  const int nt = vf.time().steps();
  std::vector<double> v(ns * static_cast<std::size_t>(nt));
  std::vector<std::vector<double>> comps(vf.dim());
  for (int k = 0; k < nt; ++k) {
    for (int a = 0; a < vf.dim(); ++a) {
      auto s = vf[a].slice(k);
      comps[a].assign(s.begin(), s.end());
    }
    ops.divergence(comps, std::span<double>(v).subspan(static_cast<std::size_t>(k) * ns, ns));
  }
  return SpaceTimeField(vf.space(), vf.time(), std::move(v));
}

SpaceTimeField time_derivative(const SpaceTimeField& f) {
  if (f.is_stationary()) return SpaceTimeField::constant(f.space(), f.time(), 0.0);
  const int nt = f.nt();
  const auto ns = f.nspace();
  ComplexDft dft(nt);
  std::vector<cplx> series(nt), spec(nt);
  std::vector<double> v(f.values().size());
  const double w0 = 2.0 * std::numbers::pi / f.time().period();
  for (std::size_t i = 0; i < ns; ++i) {
    for (int k = 0; k < nt; ++k) series[k] = f(k, i);
    dft.forward(series, spec);
    for (int j = 0; j < nt; ++j) {
      const int q = signed_frequency(j, nt);
      const bool nyq = nt % 2 == 0 && j == nt / 2;
      spec[j] *= nyq ? cplx(0.0) : cplx(0.0, w0 * q);
    }
    dft.inverse(spec, series);
    for (int k = 0; k < nt; ++k) v[static_cast<std::size_t>(k) * ns + i] = series[k].real();
  }
  return SpaceTimeField(f.space(), f.time(), std::move(v));
}

double space_time_average(const SpaceTimeField& f) {
  auto v = f.values();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double slice_average(const SpaceTimeField& f, int k) {
  auto s = f.slice(k);
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

std::vector<double> slice_averages(const SpaceTimeField& f) {
  std::vector<double> out(f.nt());
  for (int k = 0; k < f.nt(); ++k) out[k] = slice_average(f, k);
  return out;
}

SpaceTimeField time_average(const SpaceTimeField& f) {
  const auto ns = f.nspace();
  std::vector<double> v(ns, 0.0);
  for (int k = 0; k < f.nt(); ++k) {
    auto s = f.slice(k);
    for (std::size_t i = 0; i < ns; ++i) v[i] += s[i];
  }
  for (auto& x : v) x /= f.nt();
  return SpaceTimeField(f.space(), TimeGrid::stationary(), std::move(v));
}

std::vector<double> periodic_antiderivative(std::span<const double> h, double period) {
  const int n = static_cast<int>(h.size());
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  ComplexDft dft(n);
  std::vector<cplx> series(h.begin(), h.end()), spec(n);
  dft.forward(series, spec);
  const double w0 = 2.0 * std::numbers::pi / period;
  spec[0] = 0.0;
  for (int j = 1; j < n; ++j) {
    const bool nyq = n % 2 == 0 && j == n / 2;
    spec[j] = nyq ? cplx(0.0) : spec[j] / cplx(0.0, w0 * signed_frequency(j, n));
  }
  dft.inverse(spec, series);
  for (int k = 0; k < n; ++k) out[k] = series[k].real() - series[0].real();
  return out;
}

SpaceTimeField remove_slice_means(const SpaceTimeField& m, std::vector<double>& means) {
  means = slice_averages(m);
  std::vector<double> v(m.values().begin(), m.values().end());
  const auto ns = m.nspace();
  for (int k = 0; k < m.nt(); ++k)
    for (std::size_t i = 0; i < ns; ++i) v[static_cast<std::size_t>(k) * ns + i] -= means[k];
  return SpaceTimeField(m.space(), m.time(), std::move(v));
}

double integrate(const SpaceTimeField& f) {
  const double measure = f.is_stationary() ? 1.0 : f.time().period();
  return measure * space_time_average(f);
}

double integrate_against(const SpaceTimeField& f, const SpaceTimeField& eta) {
  if (!same_shape(f, eta)) throw ValidationError("integrate_against: shape mismatch");
  return integrate(f * eta);
}

SpaceTimeField squared_norm(const SpaceVectorField& v) {
  SpaceTimeField acc = v[0] * v[0];
  for (int a = 1; a < v.dim(); ++a) acc = acc + v[a] * v[a];
  return acc;
}

SpaceTimeField dot(const SpaceVectorField& a, const SpaceVectorField& b) {
  if (a.dim() != b.dim()) throw ValidationError("dot: dimension mismatch");
  SpaceTimeField acc = a[0] * b[0];
  for (int i = 1; i < a.dim(); ++i) acc = acc + a[i] * b[i];
  return acc;
}

} // namespace ergoham
