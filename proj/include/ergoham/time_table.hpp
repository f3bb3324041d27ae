#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ergoham/spectral.hpp"

namespace ergoham {

/// Values of a periodic field on a refined uniform time grid
/// t_j = j T / fine_steps (fine_steps a multiple of the field's nt),
/// by trigonometric interpolation. Nodes of the coarse grid are copied
/// exactly. Small tables are precomputed; large ones are evaluated on
/// demand into a scratch buffer, so an instance is single-threaded.
class FineTimeTable {
public:
  FineTimeTable(const SpaceTimeField& f, int fine_steps);

  int steps() const noexcept { return steps_; }
  double period() const noexcept { return period_; }
  /// Slice j (taken mod steps()).
  std::span<const double> at(int j);

private:
  const SpaceTimeField* field_;
  int steps_;
  double period_;
  int ratio_;
  std::size_t ns_;
  bool cached_;
  std::vector<double> table_;
  std::vector<double> scratch_;
  std::optional<TimeInterpolant> interp_;
};

/// Rate used by the step rule: max(max|m| / tau, max|d_t m| / max|m|),
/// i.e. the faster of the potential's reaction rate and its own rate of
/// change in time.
double step_rate(const SpaceTimeField& m, double tau);

/// Substeps per coarse time slice so that every step dt satisfies
/// dt <= max_dt. At least `min_substeps`.
int substeps_for(double slice_dt, double max_dt, int min_substeps = 1);

} // namespace ergoham
