#include "ergoham/time_table.hpp"

#include <cmath>

#include "ergoham/errors.hpp"
#include "ergoham/field_ops.hpp"

namespace ergoham {

namespace {
constexpr std::size_t kMaxCachedValues = std::size_t(1) << 23;
}

FineTimeTable::FineTimeTable(const SpaceTimeField& f, int fine_steps)
    : field_(&f), steps_(fine_steps), period_(f.time().period()), ns_(f.nspace()) {
  if (fine_steps < 1) throw ValidationError("FineTimeTable: need at least one step");
  if (f.is_stationary()) {
    ratio_ = fine_steps;
    cached_ = true;
    auto s = f.slice(0);
    table_.assign(s.begin(), s.end());
    return;
  }
  if (fine_steps % f.nt() != 0)
    throw ValidationError("FineTimeTable: fine steps must be a multiple of the field's nt");
  ratio_ = fine_steps / f.nt();
  interp_.emplace(f);
  cached_ = static_cast<std::size_t>(fine_steps) * ns_ <= kMaxCachedValues;
  if (cached_) {
    table_.resize(static_cast<std::size_t>(fine_steps) * ns_);
    for (int j = 0; j < fine_steps; ++j) {
      std::span<double> out(table_.data() + static_cast<std::size_t>(j) * ns_, ns_);
      if (j % ratio_ == 0) {
        auto s = f.slice(j / ratio_);
        std::copy(s.begin(), s.end(), out.begin());
      } else {
        interp_->evaluate(j * period_ / fine_steps, out);
      }
    }
  } else {
    scratch_.resize(ns_);
  }
}

std::span<const double> FineTimeTable::at(int j) {
  if (field_->is_stationary()) return table_;
  j %= steps_;
  if (j < 0) j += steps_;
  if (cached_) return {table_.data() + static_cast<std::size_t>(j) * ns_, ns_};
  if (j % ratio_ == 0) return field_->slice(j / ratio_);
  interp_->evaluate(j * period_ / steps_, scratch_);
  return scratch_;
}

double step_rate(const SpaceTimeField& m, double tau) {
  const double mmax = m.max_abs();
  if (mmax == 0.0) return 0.0;
  double rate = mmax / tau;
  if (!m.is_stationary()) rate = std::max(rate, time_derivative(m).max_abs() / mmax);
  return rate;
}

int substeps_for(double slice_dt, double max_dt, int min_substeps) {
  if (!(max_dt > 0.0)) return std::max(1, min_substeps);
  const double s = std::ceil(slice_dt / max_dt - 1e-12);
  return std::max({1, min_substeps, static_cast<int>(std::min(s, 1e8))});
}

} // namespace ergoham
