#include "ergoham/hamiltonian.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "ergoham/errors.hpp"
#include "ergoham/util.hpp"

namespace ergoham {

Hamiltonian::Hamiltonian(HamiltonianKind k, double r, std::vector<double> w, double scale,
                         double beta)
    : kind_(k), r_(r), w_(std::move(w)), scale_(scale), beta_(beta) {
  if (!(scale_ >= 0.0) || !std::isfinite(scale_))
    throw ValidationError("Hamiltonian scale must be finite and >= 0");
  if (!(beta_ > 0.0 && beta_ < 1.0)) throw ValidationError("Hamiltonian beta must lie in (0, 1)");
}

Hamiltonian Hamiltonian::quadratic(double scale) {
  return Hamiltonian(HamiltonianKind::Quadratic, 2.0, {}, scale, 0.5);
}

Hamiltonian Hamiltonian::power_law(double r, double scale) {
  if (!(r > 1.0) || !std::isfinite(r)) throw ValidationError("power law exponent must be > 1");
  return Hamiltonian(HamiltonianKind::PowerLaw, r, {}, scale, 1.0 / r);
}

Hamiltonian Hamiltonian::anisotropic(std::vector<double> weights, double scale) {
  if (weights.empty() || weights.size() > 2)
    throw ValidationError("anisotropic Hamiltonian needs 1 or 2 weights");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("anisotropic weights must be > 0");
  return Hamiltonian(HamiltonianKind::Anisotropic, 2.0, std::move(weights), scale, 0.5);
}

Hamiltonian Hamiltonian::with_beta(double beta) const {
  return Hamiltonian(kind_, r_, w_, scale_, beta);
}

Hamiltonian Hamiltonian::with_scale(double scale) const {
  return Hamiltonian(kind_, r_, w_, scale, beta_);
}

Hamiltonian Hamiltonian::parse(const std::string& text) {
  const auto s = trim(text);
  const auto colon = s.find(':');
  std::string name = s.substr(0, std::min(colon, s.find(',')));
  std::string rest;
  if (colon != std::string::npos) rest = s.substr(colon + 1);
  else if (s.find(',') != std::string::npos) rest = s.substr(s.find(',') + 1);

  // key=v1,v2,... ; bare tokens continue the previous key's list
  std::vector<std::pair<std::string, std::vector<double>>> kv;
  for (const auto& raw : split(rest, ',')) {
    const auto tok = trim(raw);
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      if (kv.empty()) throw ConfigError("Hamiltonian '" + text + "': dangling value '" + tok + "'");
      kv.back().second.push_back(parse_double(tok));
    } else {
      kv.push_back({trim(tok.substr(0, eq)), {parse_double(trim(tok.substr(eq + 1)))}});
    }
  }

  double scale = 1.0;
  std::optional<double> beta, r;
  std::vector<double> w;
  for (const auto& [key, vals] : kv) {
    auto single = [&, &key = key, &vals = vals] {
      if (vals.size() != 1) throw ConfigError("Hamiltonian key '" + key + "' takes one value");
      return vals[0];
    };
    if (key == "scale") scale = single();
    else if (key == "beta") beta = single();
    else if (key == "r" && name == "power") r = single();
    else if (key == "w" && name == "aniso") w = vals;
    else throw ConfigError("Hamiltonian '" + text + "': unknown key '" + key + "'");
  }

  std::optional<Hamiltonian> h;
  if (name == "quadratic") h = quadratic(scale);
  else if (name == "power") {
    if (!r) throw ConfigError("power Hamiltonian needs r=<exponent>");
    h = power_law(*r, scale);
  } else if (name == "aniso") {
    if (w.empty()) throw ConfigError("aniso Hamiltonian needs w=<w1>[,<w2>]");
    h = anisotropic(w, scale);
  } else {
    throw ConfigError("unknown Hamiltonian '" + name + "'");
  }
  return beta ? h->with_beta(*beta) : *h;
}

std::string Hamiltonian::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case HamiltonianKind::Quadratic: os << "quadratic"; break;
    case HamiltonianKind::PowerLaw: os << "power:r=" << r_; break;
    case HamiltonianKind::Anisotropic:
      os << "aniso:w=";
      for (std::size_t i = 0; i < w_.size(); ++i) os << (i ? "," : "") << w_[i];
      break;
  }
  const char sep = kind_ == HamiltonianKind::Quadratic ? ':' : ',';
  bool first = true;
  auto emit = [&](const char* key, double v) {
    os << (first ? sep : ',') << key << '=' << v;
    first = false;
  };
  if (scale_ != 1.0) emit("scale", scale_);
  const double natural = kind_ == HamiltonianKind::PowerLaw ? 1.0 / r_ : 0.5;
  if (beta_ != natural) emit("beta", beta_);
  return os.str();
}

bool Hamiltonian::is_isotropic_quadratic() const noexcept {
  if (kind_ == HamiltonianKind::Quadratic) return true;
  if (kind_ == HamiltonianKind::PowerLaw) return r_ == 2.0;
  return w_.size() == 1 || w_[0] == w_[1];
}

void Hamiltonian::check_dimension(int dim) const {
  if (kind_ == HamiltonianKind::Anisotropic && static_cast<int>(w_.size()) != dim)
    throw ValidationError("anisotropic Hamiltonian has " + std::to_string(w_.size()) +
                          " weights for dimension " + std::to_string(dim));
}

double Hamiltonian::value(double p0, double p1) const noexcept {
  switch (kind_) {
    case HamiltonianKind::Quadratic: return scale_ * (p0 * p0 + p1 * p1);
    case HamiltonianKind::PowerLaw: {
      const double q = p0 * p0 + p1 * p1;
      if (r_ == 2.0) return scale_ * q;
      if (r_ == 4.0) return scale_ * q * q;
      return scale_ * std::pow(q, 0.5 * r_);
    }
    case HamiltonianKind::Anisotropic:
      return scale_ * (w_[0] * p0 * p0 + (w_.size() > 1 ? w_[1] * p1 * p1 : 0.0));
  }
  return 0.0;
}

void Hamiltonian::gradient(double p0, double p1, double& g0, double& g1) const noexcept {
  switch (kind_) {
    case HamiltonianKind::Quadratic:
      g0 = 2.0 * scale_ * p0;
      g1 = 2.0 * scale_ * p1;
      return;
    case HamiltonianKind::PowerLaw: {
      const double q = p0 * p0 + p1 * p1;
      double c;
      if (r_ == 2.0) c = 2.0;
      else if (r_ == 4.0) c = 4.0 * q;
      else c = q > 0.0 ? r_ * std::pow(q, 0.5 * r_ - 1.0) : 0.0;
      g0 = scale_ * c * p0;
      g1 = scale_ * c * p1;
      return;
    }
    case HamiltonianKind::Anisotropic:
      g0 = 2.0 * scale_ * w_[0] * p0;
      g1 = w_.size() > 1 ? 2.0 * scale_ * w_[1] * p1 : 0.0;
      return;
  }
}

namespace {

void check_vec(std::span<const double> p) {
  if (p.empty() || p.size() > 2) throw ValidationError("Hamiltonian argument must have 1 or 2 components");
  for (double v : p)
    if (!std::isfinite(v)) throw ValidationError("Hamiltonian argument must be finite");
}

double comp(std::span<const double> p, std::size_t i) { return i < p.size() ? p[i] : 0.0; }

} // namespace

double Hamiltonian::eval(std::span<const double> p) const {
  check_vec(p);
  check_dimension(static_cast<int>(p.size()));
  return value(comp(p, 0), comp(p, 1));
}

std::vector<double> Hamiltonian::grad(std::span<const double> p) const {
  check_vec(p);
  check_dimension(static_cast<int>(p.size()));
  double g0 = 0.0, g1 = 0.0;
  gradient(comp(p, 0), comp(p, 1), g0, g1);
  std::vector<double> g{g0, g1};
  g.resize(p.size());
  return g;
}

Eigen::MatrixXd Hamiltonian::hess(std::span<const double> p) const {
  check_vec(p);
  check_dimension(static_cast<int>(p.size()));
  const auto d = static_cast<Eigen::Index>(p.size());
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = p[i];
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  switch (kind_) {
    case HamiltonianKind::Quadratic: h.diagonal().setConstant(2.0 * scale_); break;
    case HamiltonianKind::Anisotropic:
      for (Eigen::Index i = 0; i < d; ++i) h(i, i) = 2.0 * scale_ * w_[i];
      break;
    case HamiltonianKind::PowerLaw: {
      const double n = v.norm();
      if (n == 0.0) {
        if (r_ < 2.0) throw DomainError("power law Hessian is singular at p = 0 for r < 2");
        if (r_ == 2.0) h.diagonal().setConstant(2.0 * scale_);
        break;
      }
      const Eigen::VectorXd u = v / n;
      const double c = scale_ * r_ * std::pow(n, r_ - 2.0);
      h = c * (Eigen::MatrixXd::Identity(d, d) + (r_ - 2.0) * u * u.transpose());
      break;
    }
  }
  return h;
}

double Hamiltonian::legendre(std::span<const double> alpha) const {
  check_vec(alpha);
  check_dimension(static_cast<int>(alpha.size()));
  const double a0 = comp(alpha, 0), a1 = comp(alpha, 1);
  const double na2 = a0 * a0 + a1 * a1;
  if (scale_ == 0.0) return na2 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  switch (kind_) {
    case HamiltonianKind::Quadratic: return na2 / (4.0 * scale_);
    case HamiltonianKind::Anisotropic: {
      double s = a0 * a0 / (4.0 * scale_ * w_[0]);
      if (w_.size() > 1) s += a1 * a1 / (4.0 * scale_ * w_[1]);
      return s;
    }
    case HamiltonianKind::PowerLaw: {
      // L(alpha) = s L1(alpha/s), L1(a) = (r-1) r^{-r'} |a|^{r'}, r' = r/(r-1)
      const double rs = r_ / (r_ - 1.0);
      const double n = std::sqrt(na2) / scale_;
      return scale_ * (r_ - 1.0) * std::pow(r_, -rs) * std::pow(n, rs);
    }
  }
  return 0.0;
}

std::vector<double> Hamiltonian::legendre_argmax(std::span<const double> alpha) const {
  check_vec(alpha);
  check_dimension(static_cast<int>(alpha.size()));
  const auto d = static_cast<Eigen::Index>(alpha.size());
  Eigen::VectorXd a(d);
  for (Eigen::Index i = 0; i < d; ++i) a[i] = alpha[i];
  if (a.norm() == 0.0) return std::vector<double>(alpha.size(), 0.0);
  if (scale_ == 0.0) throw SolverError("Legendre transform unbounded: H vanishes identically");

  auto grad_at = [&](const Eigen::VectorXd& p) {
    const auto g = grad(std::span<const double>(p.data(), p.size()));
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(g.data(), d));
  };
  auto objective = [&](const Eigen::VectorXd& p) {
    return a.dot(p) - eval(std::span<const double>(p.data(), p.size()));
  };

  Eigen::VectorXd p = a / (2.0 * scale_);  // exact for quadratic kinds
  const double tol = 1e-10 * (1.0 + a.norm());
  std::vector<double> history;
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd res = a - grad_at(p);
    history.push_back(res.norm());
    if (res.norm() <= tol) return std::vector<double>(p.data(), p.data() + d);
    Eigen::VectorXd step;
    bool newton = false;
    if (p.norm() > 0.0) {
      const Eigen::MatrixXd hm = hess(std::span<const double>(p.data(), p.size()));
      Eigen::LLT<Eigen::MatrixXd> llt(hm);
      if (llt.info() == Eigen::Success) {
        step = llt.solve(res);
        newton = step.allFinite();
      }
    }
    if (!newton) step = res;
    // backtracking on the concave objective
    const double f0 = objective(p);
    double t = 1.0;
    for (; t > 1e-12; t *= 0.5) {
      if (objective(p + t * step) >= f0 - 1e-15 * std::abs(f0)) break;
    }
    p += t * step;
  }
  throw SolverError("Legendre maximization did not converge", std::move(history));
}

double Hamiltonian::legendre_numeric(std::span<const double> alpha) const {
  const auto p = legendre_argmax(alpha);
  double dotp = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) dotp += p[i] * alpha[i];
  return dotp - eval(p);
}

bool HypothesisReport::all_passed() const noexcept {
  for (const auto& c : clauses)
    if (!c.passed()) return false;
  return true;
}

const HypothesisClause& HypothesisReport::clause(const std::string& name) const {
  for (const auto& c : clauses)
    if (c.name == name) return c;
  throw ValidationError("no hypothesis clause named '" + name + "'");
}

HypothesisReport check_hypotheses(const Hamiltonian& h, std::size_t samples, int dim,
                                  std::uint64_t seed) {
  if (samples < 100) throw ValidationError("check_hypotheses needs at least 100 samples");
  if (h.kind() == HamiltonianKind::Anisotropic) dim = static_cast<int>(h.weights().size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;

  HypothesisClause zero{"zero_at_origin"}, pos{"positivity"}, hpd{"hessian_pd"}, scal{"scaling"};
  auto fail = [](HypothesisClause& c, double margin) {
    ++c.failures;
    c.worst = std::min(c.worst, margin);
  };

  const std::vector<double> origin(dim, 0.0);
  zero.checked = 1;
  if (const double h0 = h.eval(origin); h0 != 0.0) fail(zero, -std::abs(h0));

  auto random_p = [&] {
    // direction uniform on the sphere, radius log-uniform in [1e-3, 1e2]
    std::vector<double> p(dim);
    double n = 0.0;
    do {
      n = 0.0;
      for (auto& v : p) {
        v = normal(rng);
        n += v * v;
      }
    } while (n == 0.0);
    const double radius = std::pow(10.0, -3.0 + 5.0 * unit(rng));
    for (auto& v : p) v *= radius / std::sqrt(n);
    return p;
  };

  for (std::size_t s = 0; s < samples; ++s) {
    const auto p = random_p();
    const double hp = h.eval(p);

    ++pos.checked;
    if (!(hp > 0.0)) fail(pos, hp);

    ++hpd.checked;
    const Eigen::MatrixXd hm = h.hess(p);
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hm).eigenvalues().minCoeff();
    if (!(lmin > 0.0)) fail(hpd, lmin);

    ++scal.checked;
    double a = unit(rng);
    if (a == 0.0) a = 0.5;
    std::vector<double> q(p);
    const double ab = std::pow(a, h.beta());
    for (auto& v : q) v *= ab;
    const double margin = a * hp - h.eval(q);
    if (margin < -1e-12 * (1.0 + std::abs(a * hp))) fail(scal, margin);
  }
  return HypothesisReport{{zero, pos, hpd, scal}};
}

} // namespace ergoham
