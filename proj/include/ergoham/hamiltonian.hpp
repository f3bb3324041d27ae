#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ergoham {

enum class HamiltonianKind { Quadratic, PowerLaw, Anisotropic };

/// Convex Hamiltonian H(p) on R^d (d <= 2), homogeneous kinds only:
///   Quadratic    scale * |p|^2
///   PowerLaw     scale * |p|^r, r > 1
///   Anisotropic  scale * sum_i w_i p_i^2
/// `beta` is the exponent of the scaling hypothesis a H(p) >= H(a^beta p).
class Hamiltonian {
public:
  static Hamiltonian quadratic(double scale = 1.0);
  static Hamiltonian power_law(double r, double scale = 1.0);
  static Hamiltonian anisotropic(std::vector<double> weights, double scale = 1.0);

  /// Parses "quadratic", "power:r=4", "aniso:w=1,2", each optionally
  /// followed by ",scale=s" and ",beta=b".
  static Hamiltonian parse(const std::string& text);
  /// Canonical text form; parse(to_string()) reproduces *this.
  std::string to_string() const;

  HamiltonianKind kind() const noexcept { return kind_; }
  double exponent() const noexcept { return r_; }
  double scale() const noexcept { return scale_; }
  double beta() const noexcept { return beta_; }
  const std::vector<double>& weights() const noexcept { return w_; }

  /// Same H with a different declared beta (used to probe the hypothesis check).
  Hamiltonian with_beta(double beta) const;
  Hamiltonian with_scale(double scale) const;

  /// True when H = c|p|^2 (the Hopf-Cole linearizable case).
  bool is_isotropic_quadratic() const noexcept;

  /// Throws ValidationError if H cannot act on R^dim.
  void check_dimension(int dim) const;

  // Fast two-component forms; for d = 1 pass p1 = 0.
  double value(double p0, double p1) const noexcept;
  void gradient(double p0, double p1, double& g0, double& g1) const noexcept;

  double eval(std::span<const double> p) const;
  std::vector<double> grad(std::span<const double> p) const;
  /// Throws DomainError at p = 0 for PowerLaw with r < 2.
  Eigen::MatrixXd hess(std::span<const double> p) const;

  /// L(alpha) = sup_p <p, alpha> - H(p): closed form.
  double legendre(std::span<const double> alpha) const;
  /// Same quantity by damped Newton ascent (tolerance 1e-10); SolverError
  /// when the inner maximization fails.
  double legendre_numeric(std::span<const double> alpha) const;

  /// Maximizer p* of <p, alpha> - H(p), i.e. grad H(p*) = alpha.
  std::vector<double> legendre_argmax(std::span<const double> alpha) const;

private:
  Hamiltonian(HamiltonianKind k, double r, std::vector<double> w, double scale, double beta);

  HamiltonianKind kind_;
  double r_;
  std::vector<double> w_;
  double scale_;
  double beta_;
};

struct HypothesisClause {
  std::string name;
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst = 0.0;  ///< most negative margin seen (0 when none failed)
  bool passed() const noexcept { return failures == 0; }
};

struct HypothesisReport {
  std::vector<HypothesisClause> clauses;
  bool all_passed() const noexcept;
  const HypothesisClause& clause(const std::string& name) const;
};

/// Randomized check of H(0) = 0, H(p) > 0 for p != 0, positive definite
/// Hessian away from the origin and a H(p) >= H(a^beta p) for a in (0, 1).
/// Requires samples >= 100.
HypothesisReport check_hypotheses(const Hamiltonian& h, std::size_t samples, int dim = 2,
                                  std::uint64_t seed = 20240601);

} // namespace ergoham
