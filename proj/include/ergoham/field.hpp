#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ergoham {

/// Uniform grid on the unit torus T^d, d in {1, 2}.
///
/// Points per axis must be even, at least 8, and have no prime factor
/// other than 2, 3 and 5 (48 is allowed; transforms stay fast). The
/// spacing is h = 1/n.
class TorusGrid {
public:
  TorusGrid(int dim, int n);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }
  double h() const noexcept { return 1.0 / n_; }
  double coord(int i) const noexcept { return static_cast<double>(i) / n_; }

  /// Flat index of (i0, i1); axis 1 varies fastest. Indices wrap.
  std::size_t index(int i0, int i1 = 0) const noexcept;

  bool operator==(const TorusGrid&) const = default;

private:
  int dim_;
  int n_;
  std::size_t size_;
};

/// Time grid t_k = k*T/n_steps on one period, indices taken mod n_steps.
/// The stationary grid (one node) represents time-independent data.
class TimeGrid {
public:
  TimeGrid(double period, int n_steps);
  static TimeGrid stationary();

  double period() const noexcept { return period_; }
  int steps() const noexcept { return steps_; }
  double dt() const noexcept { return period_ / steps_; }
  double t(int k) const noexcept { return k * dt(); }
  bool is_stationary() const noexcept { return stationary_; }

  bool operator==(const TimeGrid&) const = default;

private:
  TimeGrid(double period, int n_steps, bool stationary)
      : period_(period), steps_(n_steps), stationary_(stationary) {}

  double period_;
  int steps_;
  bool stationary_;
};

/// Real field on the discrete space-time torus. Values are stored with
/// time as the outermost index. Immutable after construction.
class SpaceTimeField {
public:
  using Generator = std::function<double(double t, double x, double y)>;

  SpaceTimeField(TorusGrid space, TimeGrid time, std::vector<double> values);

  static SpaceTimeField constant(const TorusGrid& space, const TimeGrid& time,
                                 double c);
  static SpaceTimeField sample(const TorusGrid& space, const TimeGrid& time,
                               const Generator& f);

  const TorusGrid& space() const noexcept { return space_; }
  const TimeGrid& time() const noexcept { return time_; }
  int nt() const noexcept { return time_.steps(); }
  std::size_t nspace() const noexcept { return space_.size(); }
  bool is_stationary() const noexcept { return time_.is_stationary(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> slice(int k) const;
  double operator()(int k, std::size_t i) const { return slice(k)[i]; }

  double max_abs() const;
  double min() const;
  double max() const;

  /// Pointwise transform.
  SpaceTimeField map(const std::function<double(double)>& f) const;

  /// Time-reversed field g(t_k) = f(t_{-k mod nt}) = f(T - t_k).
  SpaceTimeField time_reversed() const;

  /// Stationary field holding slice k.
  SpaceTimeField frozen(int k) const;

  /// Repeat a stationary field on every node of `time`.
  SpaceTimeField broadcast(const TimeGrid& time) const;

  SpaceTimeField operator+(const SpaceTimeField& o) const;
  SpaceTimeField operator-(const SpaceTimeField& o) const;
  SpaceTimeField operator*(const SpaceTimeField& o) const;
  SpaceTimeField operator+(double c) const;
  SpaceTimeField operator*(double c) const;

private:
  TorusGrid space_;
  TimeGrid time_;
  std::vector<double> values_;
};

/// d components sharing one grid pair.
class SpaceVectorField {
public:
  explicit SpaceVectorField(std::vector<SpaceTimeField> components);
  static SpaceVectorField constant(const TorusGrid& space, const TimeGrid& time,
                                   std::span<const double> c);

  int dim() const noexcept { return static_cast<int>(components_.size()); }
  const SpaceTimeField& operator[](int axis) const { return components_.at(axis); }
  const TorusGrid& space() const noexcept { return components_.front().space(); }
  const TimeGrid& time() const noexcept { return components_.front().time(); }
  bool is_stationary() const noexcept { return time().is_stationary(); }
  double max_norm() const;

  SpaceVectorField time_reversed() const;
  /// Repeat a stationary vector field on every node of `time`.
  SpaceVectorField broadcast(const TimeGrid& time) const;
  SpaceVectorField operator*(double c) const;
  SpaceVectorField operator+(const SpaceVectorField& o) const;

private:
  std::vector<SpaceTimeField> components_;
};

bool same_shape(const SpaceTimeField& a, const SpaceTimeField& b);

} // namespace ergoham
