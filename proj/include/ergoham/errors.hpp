#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ergoham {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad shapes, non-finite values, invalid parameters.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// An argument outside the mathematical domain of an operation
/// (nonpositive Hopf-Cole input, Hessian at a singular point).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Iterative solver failed to meet its tolerance. `history` carries the
/// per-iteration convergence record (drift increments, Rayleigh spreads).
class SolverError : public Error {
public:
  SolverError(const std::string& what, std::vector<double> history = {})
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

private:
  std::vector<double> history_;
};

/// NaN or overflow during time integration.
class InstabilityError : public SolverError {
public:
  using SolverError::SolverError;
};

/// Mass drift of a conservative scheme beyond its tolerance.
class ConservationError : public SolverError {
public:
  using SolverError::SolverError;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace ergoham
