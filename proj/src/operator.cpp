#include "ergoham/operator.hpp"

#include <cmath>

#include "ergoham/errors.hpp"

namespace ergoham {

const char* to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

Direction direction_from_string(const std::string& s) {
  if (s == "forward") return Direction::Forward;
  if (s == "backward") return Direction::Backward;
  throw ConfigError("unknown direction '" + s + "' (forward|backward)");
}

void OperatorParams::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be positive");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("mu must be positive");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ValidationError("eps must be >= 0");
  if (advection && !advection->is_stationary())
    throw ValidationError("advection field must be time-independent");
}

void OperatorParams::validate_for(const SpaceTimeField& m) const {
  validate();
  if (advection) {
    if (!(advection->space() == m.space()))
      throw ValidationError("advection field grid differs from the potential grid");
    if (advection->dim() != m.space().dim())
      throw ValidationError("advection field needs one component per space dimension");
  }
}

double OperatorParams::advection_speed() const { return advection ? advection->max_norm() : 0.0; }

std::optional<double> quadratic_coefficient(const Hamiltonian& h) {
  if (!h.is_isotropic_quadratic()) return std::nullopt;
  switch (h.kind()) {
    case HamiltonianKind::Quadratic:
    case HamiltonianKind::PowerLaw: return h.scale();
    case HamiltonianKind::Anisotropic: return h.scale() * h.weights()[0];
  }
  return std::nullopt;
}

bool linear_route_applies(const Hamiltonian& h, const OperatorParams& p) {
  const auto c = quadratic_coefficient(h);
  if (!c) return false;
  return std::abs(p.eps * *c - p.mu) <= 1e-12 * p.mu;
}

} // namespace ergoham
