#include "ergoham/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ergoham/errors.hpp"

namespace ergoham {

namespace {

bool smooth_size(int n) {
  for (int p : {2, 3, 5}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

} // namespace

TorusGrid::TorusGrid(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) {
    throw ValidationError("TorusGrid: dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (n < 8 || n % 2 != 0 || !smooth_size(n)) {
    throw ValidationError("TorusGrid: points per axis must be even, >= 8 and 5-smooth, got " +
                          std::to_string(n));
  }
  size_ = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

std::size_t TorusGrid::index(int i0, int i1) const noexcept {
  const int a = ((i0 % n_) + n_) % n_;
  if (dim_ == 1) return static_cast<std::size_t>(a);
  const int b = ((i1 % n_) + n_) % n_;
  return static_cast<std::size_t>(a) * n_ + b;
}

TimeGrid::TimeGrid(double period, int n_steps)
    : period_(period), steps_(n_steps), stationary_(false) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw ValidationError("TimeGrid: period must be positive and finite");
  }
  if (n_steps < 8) {
    throw ValidationError("TimeGrid: at least 8 steps per period required, got " +
                          std::to_string(n_steps));
  }
}

TimeGrid TimeGrid::stationary() { return TimeGrid(1.0, 1, true); }

SpaceTimeField::SpaceTimeField(TorusGrid space, TimeGrid time, std::vector<double> values)
    : space_(space), time_(time), values_(std::move(values)) {
  const std::size_t expected = space_.size() * static_cast<std::size_t>(time_.steps());
  if (values_.size() != expected) {
    throw ValidationError("SpaceTimeField: expected " + std::to_string(expected) +
                          " values, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("SpaceTimeField: non-finite entry");
  }
}

SpaceTimeField SpaceTimeField::constant(const TorusGrid& space, const TimeGrid& time, double c) {
  return SpaceTimeField(space, time,
                        std::vector<double>(space.size() * static_cast<std::size_t>(time.steps()), c));
}

SpaceTimeField SpaceTimeField::sample(const TorusGrid& space, const TimeGrid& time,
                                      const Generator& f) {
  std::vector<double> v;
  v.reserve(space.size() * static_cast<std::size_t>(time.steps()));
  const int n = space.n();
  for (int k = 0; k < time.steps(); ++k) {
    const double t = time.is_stationary() ? 0.0 : time.t(k);
    if (space.dim() == 1) {
      for (int i = 0; i < n; ++i) v.push_back(f(t, space.coord(i), 0.0));
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v.push_back(f(t, space.coord(i), space.coord(j)));
    }
  }
  return SpaceTimeField(space, time, std::move(v));
}

std::span<const double> SpaceTimeField::slice(int k) const {
  const int nt = time_.steps();
  const int kk = ((k % nt) + nt) % nt;
  return std::span<const double>(values_).subspan(static_cast<std::size_t>(kk) * space_.size(),
                                                  space_.size());
}

double SpaceTimeField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SpaceTimeField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double SpaceTimeField::max() const { return *std::max_element(values_.begin(), values_.end()); }

SpaceTimeField SpaceTimeField::map(const std::function<double(double)>& f) const {
  std::vector<double> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), f);
  return SpaceTimeField(space_, time_, std::move(v));
}

SpaceTimeField SpaceTimeField::time_reversed() const {
  const int nt = time_.steps();
  std::vector<double> v;
  v.reserve(values_.size());
  for (int k = 0; k < nt; ++k) {
    auto s = slice(nt - k);
    v.insert(v.end(), s.begin(), s.end());
  }
  return SpaceTimeField(space_, time_, std::move(v));
}

SpaceTimeField SpaceTimeField::frozen(int k) const {
  auto s = slice(k);
  return SpaceTimeField(space_, TimeGrid::stationary(), std::vector<double>(s.begin(), s.end()));
}

SpaceTimeField SpaceTimeField::broadcast(const TimeGrid& time) const {
  if (!is_stationary()) throw ValidationError("broadcast: field is not stationary");
  std::vector<double> v;
  v.reserve(values_.size() * static_cast<std::size_t>(time.steps()));
  for (int k = 0; k < time.steps(); ++k) v.insert(v.end(), values_.begin(), values_.end());
  return SpaceTimeField(space_, time, std::move(v));
}

bool same_shape(const SpaceTimeField& a, const SpaceTimeField& b) {
  return a.space() == b.space() && a.time() == b.time();
}

namespace {

template <class Op>
SpaceTimeField combine(const SpaceTimeField& a, const SpaceTimeField& b, Op op) {
  if (!same_shape(a, b)) throw ValidationError("field arithmetic: shape mismatch");
  auto x = a.values();
  auto y = b.values();
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(x[i], y[i]);
  return SpaceTimeField(a.space(), a.time(), std::move(v));
}

} // namespace

SpaceTimeField SpaceTimeField::operator+(const SpaceTimeField& o) const {
  return combine(*this, o, [](double p, double q) { return p + q; });
}
SpaceTimeField SpaceTimeField::operator-(const SpaceTimeField& o) const {
  return combine(*this, o, [](double p, double q) { return p - q; });
}
SpaceTimeField SpaceTimeField::operator*(const SpaceTimeField& o) const {
  return combine(*this, o, [](double p, double q) { return p * q; });
}
SpaceTimeField SpaceTimeField::operator+(double c) const {
  return map([c](double v) { return v + c; });
}
SpaceTimeField SpaceTimeField::operator*(double c) const {
  return map([c](double v) { return v * c; });
}

SpaceVectorField::SpaceVectorField(std::vector<SpaceTimeField> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ValidationError("SpaceVectorField: no components");
  const auto& first = components_.front();
  if (static_cast<int>(components_.size()) != first.space().dim()) {
    throw ValidationError("SpaceVectorField: component count must equal the space dimension");
  }
  for (const auto& c : components_) {
    if (!same_shape(c, first)) throw ValidationError("SpaceVectorField: component shape mismatch");
  }
}

SpaceVectorField SpaceVectorField::constant(const TorusGrid& space, const TimeGrid& time,
                                            std::span<const double> c) {
  if (static_cast<int>(c.size()) != space.dim()) {
    throw ValidationError("SpaceVectorField::constant: wrong number of components");
  }
  std::vector<SpaceTimeField> comps;
  for (double v : c) comps.push_back(SpaceTimeField::constant(space, time, v));
  return SpaceVectorField(std::move(comps));
}

double SpaceVectorField::max_norm() const {
  const auto n = components_.front().values().size();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& c : components_) s += c.values()[i] * c.values()[i];
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

SpaceVectorField SpaceVectorField::time_reversed() const {
  std::vector<SpaceTimeField> comps;
  for (const auto& c : components_) comps.push_back(c.time_reversed());
  return SpaceVectorField(std::move(comps));
}

SpaceVectorField SpaceVectorField::broadcast(const TimeGrid& time) const {
  std::vector<SpaceTimeField> comps;
  for (const auto& c : components_) comps.push_back(c.broadcast(time));
  return SpaceVectorField(std::move(comps));
}

SpaceVectorField SpaceVectorField::operator*(double c) const {
  std::vector<SpaceTimeField> comps;
  for (const auto& f : components_) comps.push_back(f * c);
  return SpaceVectorField(std::move(comps));
}

SpaceVectorField SpaceVectorField::operator+(const SpaceVectorField& o) const {
  if (o.dim() != dim()) throw ValidationError("SpaceVectorField: dimension mismatch");
  std::vector<SpaceTimeField> comps;
  for (int a = 0; a < dim(); ++a) comps.push_back(components_[a] + o[a]);
  return SpaceVectorField(std::move(comps));
}

} // namespace ergoham
