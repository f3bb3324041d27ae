#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ergoham/field.hpp"
#include "ergoham/hamiltonian.hpp"

namespace ergoham {

enum class Direction { Forward, Backward };

const char* to_string(Direction d);
Direction direction_from_string(const std::string& s);

/// Coefficients of  tau d_t - mu Lap + eps H(grad) + <A, grad>.
/// The backward direction replaces d_t by -d_t.
struct OperatorParams {
  double tau = 1.0;
  double mu = 1.0;
  double eps = 1.0;
  Direction direction = Direction::Forward;
  /// Time-independent advection field A (stationary SpaceVectorField).
  std::optional<SpaceVectorField> advection;

  /// Throws ValidationError on nonpositive tau/mu, negative eps, or a
  /// non-stationary advection field.
  void validate() const;
  /// validate() plus shape agreement with the potential.
  void validate_for(const SpaceTimeField& m) const;

  double advection_speed() const;  ///< max |A|, 0 without advection
};

/// Coefficient c when H = c |p|^2 (isotropic quadratic); nullopt otherwise.
std::optional<double> quadratic_coefficient(const Hamiltonian& h);

/// True when Hopf-Cole turns the operator into a linear one: H = c|p|^2
/// with eps * c == mu (relative 1e-12).
bool linear_route_applies(const Hamiltonian& h, const OperatorParams& p);

/// Principal eigenpair of one operator instance.
struct EigenResult {
  enum class Form { U, Phi };
  double lambda = 0.0;
  /// u > 0 with unit space-time quadratic mean (Form::U), or phi with zero
  /// space-time mean (Form::Phi).
  std::optional<SpaceTimeField> field;
  Form form = Form::Phi;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

} // namespace ergoham
