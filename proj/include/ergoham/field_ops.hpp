#pragma once

#include "ergoham/field.hpp"
#include "ergoham/spectral.hpp"

namespace ergoham {

/// Per-slice spatial gradient. Annihilates constants exactly.
SpaceVectorField gradient(const SpaceTimeField& f, Backend backend = Backend::Spectral);

/// Per-slice spatial Laplacian.
SpaceTimeField laplacian(const SpaceTimeField& f, Backend backend = Backend::Spectral);

/// Per-slice spatial divergence (conservative: zero spatial mean).
SpaceTimeField divergence(const SpaceVectorField& v, Backend backend = Backend::Spectral);

/// d/dt by trigonometric differentiation along the periodic time axis.
/// Zero for stationary fields.
SpaceTimeField time_derivative(const SpaceTimeField& f);

/// Uniform mean over every node (the space-time average).
double space_time_average(const SpaceTimeField& f);

/// Spatial mean of slice `k`.
double slice_average(const SpaceTimeField& f, int k);

/// Mean over the time axis; returns a stationary field.
SpaceTimeField time_average(const SpaceTimeField& f);

/// Spatial mean of every slice; returns the per-slice means.
std::vector<double> slice_averages(const SpaceTimeField& f);

/// G(t_k) = integral from 0 to t_k of (h - mean h) for a periodic series
/// sampled at the nodes of a time grid (trigonometric integration).
std::vector<double> periodic_antiderivative(std::span<const double> h, double period);

/// m minus its per-slice spatial mean; `means` receives the removed values.
SpaceTimeField remove_slice_means(const SpaceTimeField& m, std::vector<double>& means);

/// Integral over (0,T) x T^d (T * mean); over T^d for stationary fields.
double integrate(const SpaceTimeField& f);

/// Integral of f against the density eta (same grid).
double integrate_against(const SpaceTimeField& f, const SpaceTimeField& eta);

/// Sum of squares of the components.
SpaceTimeField squared_norm(const SpaceVectorField& v);

/// Inner product <a, b> nodewise.
SpaceTimeField dot(const SpaceVectorField& a, const SpaceVectorField& b);

} // namespace ergoham
