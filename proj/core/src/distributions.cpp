#include "gapcap/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gapcap/errors.hpp"
#include "gapcap/numerics.hpp"
#include "gapcap/units.hpp"

namespace gapcap {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

// 1 - (1 + x) e^{-x}
double failed_gap_kernel(double x) {
  if (x < 0.05) {
    // sum_{n>=2} (-1)^n (n-1) x^n / n!
    double power = x * x / 2.0;
    double acc = power;
    for (int n = 3; n <= 10; ++n) {
      power *= -x / n;
      acc += (n - 1) * power;
    }
    return acc;
  }
  return -std::expm1(-x) - x * std::exp(-x);
}

// E[X^m e^{uX}] / (r/(r-u))^k for X ~ Gamma(k, r): the rising factorial part.
double gamma_power_factor(int m, double k, double r_minus_u) {
  double acc = 1.0;
  for (int i = 0; i < m; ++i) acc *= (k + i) / r_minus_u;
  return acc;
}

}  // namespace

std::string to_string(HeadwayDistribution::Kind kind) {
  switch (kind) {
    case HeadwayDistribution::Kind::Deterministic: return "deterministic";
    case HeadwayDistribution::Kind::Discrete: return "discrete";
    case HeadwayDistribution::Kind::Exponential: return "exponential";
    case HeadwayDistribution::Kind::Gamma: return "gamma";
  }
  return "unknown";
}

HeadwayDistribution HeadwayDistribution::deterministic(double seconds) {
  require(std::isfinite(seconds) && seconds > 0.0, "deterministic headway must be positive and finite");
  HeadwayDistribution d;
  d.kind_ = Kind::Deterministic;
  d.atoms_ = {{seconds, 1.0}};
  return d;
}

HeadwayDistribution HeadwayDistribution::discrete(std::vector<Atom> atoms) {
  double total = 0.0;
  for (const auto& a : atoms) {
    require(std::isfinite(a.value) && a.value > 0.0, "discrete headway atoms must be positive and finite");
    require(std::isfinite(a.probability) && a.probability >= 0.0,
            "discrete headway probabilities must be non-negative");
    total += a.probability;
  }
  require(std::abs(total - 1.0) <= 1e-12, "discrete headway probabilities must sum to 1");
  std::erase_if(atoms, [](const Atom& a) { return a.probability == 0.0; });
  require(!atoms.empty(), "discrete headway law needs at least one atom");
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.value < y.value; });
  std::vector<Atom> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && merged.back().value == a.value) {
      merged.back().probability += a.probability;
    } else {
      merged.push_back(a);
    }
  }
  HeadwayDistribution d;
  d.kind_ = Kind::Discrete;
  d.atoms_ = std::move(merged);
  return d;
}

HeadwayDistribution HeadwayDistribution::exponential(double alpha_per_s) {
  require(std::isfinite(alpha_per_s) && alpha_per_s > 0.0, "exponential rate must be positive");
  HeadwayDistribution d;
  d.kind_ = Kind::Exponential;
  d.shape_ = 1.0;
  d.rate_ = alpha_per_s;
  return d;
}

HeadwayDistribution HeadwayDistribution::gamma(double shape, double rate_per_s) {
  require(std::isfinite(shape) && shape > 0.0, "gamma shape must be positive");
  require(std::isfinite(rate_per_s) && rate_per_s > 0.0, "gamma rate must be positive");
  HeadwayDistribution d;
  d.kind_ = Kind::Gamma;
  d.shape_ = shape;
  d.rate_ = rate_per_s;
  return d;
}

double HeadwayDistribution::support_min() const noexcept {
  return is_atomic() ? atoms_.front().value : shift_;
}

double HeadwayDistribution::support_max() const noexcept {
  return is_atomic() ? atoms_.back().value : kInfinity;
}

double HeadwayDistribution::mean() const { return exp_moment(1, 0.0); }

double HeadwayDistribution::second_moment() const { return exp_moment(2, 0.0); }

double HeadwayDistribution::exp_moment(int order, double t) const {
  require(order >= 0 && order <= 2, "exp_moment supports orders 0..2");
  if (is_atomic()) {
    numerics::CompensatedSum acc;
    for (const auto& a : atoms_) {
      const double e = std::exp(t * a.value);
      acc.add(a.probability * std::pow(a.value, order) * e);
    }
    return acc.value();
  }
  const double u = t * scale_;
  if (u >= rate_) return kInfinity;
  const double r_minus_u = rate_ - u;
  const double base = std::exp(t * shift_ - shape_ * std::log1p(-u / rate_));
  // binomial expansion of (scale*X + shift)^order
  double acc = 0.0;
  for (int m = 0; m <= order; ++m) {
    const double binom = (order == 2 && m == 1) ? 2.0 : 1.0;
    acc += binom * std::pow(scale_, m) * std::pow(shift_, order - m) *
           gamma_power_factor(m, shape_, r_minus_u);
  }
  return base * acc;
}

double HeadwayDistribution::laplace(double s) const {
  require(s >= 0.0, "laplace transform needs s >= 0");
  if (s == 0.0) return 1.0;
  return exp_moment(0, -s);
}

double HeadwayDistribution::one_minus_laplace(double s) const {
  require(s >= 0.0, "laplace transform needs s >= 0");
  if (s == 0.0) return 0.0;
  if (is_atomic()) {
    numerics::CompensatedSum acc;
    for (const auto& a : atoms_) acc.add(-a.probability * std::expm1(-s * a.value));
    return acc.value();
  }
  return -std::expm1(-s * shift_ - shape_ * std::log1p(scale_ * s / rate_));
}

double HeadwayDistribution::mgf(double q) const {
  require(q >= 0.0, "moment generating function needs q >= 0");
  if (q == 0.0) return 1.0;
  return exp_moment(0, q);
}

double HeadwayDistribution::mgf_minus_one(double q) const {
  require(q >= 0.0, "moment generating function needs q >= 0");
  if (q == 0.0) return 0.0;
  if (is_atomic()) {
    numerics::CompensatedSum acc;
    for (const auto& a : atoms_) acc.add(a.probability * std::expm1(q * a.value));
    return acc.value();
  }
  const double u = q * scale_;
  if (u >= rate_) return kInfinity;
  return std::expm1(q * shift_ - shape_ * std::log1p(-u / rate_));
}

double HeadwayDistribution::tilted_mean(double q) const {
  require(q >= 0.0, "tilted mean needs q >= 0");
  return exp_moment(1, -q);
}

double HeadwayDistribution::failed_gap_mass(double q) const {
  require(q >= 0.0, "failed gap mass needs q >= 0");
  if (q == 0.0) return 0.0;
  if (is_atomic()) {
    numerics::CompensatedSum acc;
    for (const auto& a : atoms_) acc.add(a.probability * failed_gap_kernel(q * a.value));
    return acc.value() / q;
  }
  return std::max(0.0, one_minus_laplace(q) / q - tilted_mean(q));
}

HeadwayDistribution HeadwayDistribution::affine_push(double a, double b) const {
  require(std::isfinite(a) && a > 0.0, "affine pushforward needs a positive scale");
  require(std::isfinite(b), "affine pushforward needs a finite shift");
  if (a == 1.0 && b == 0.0) return *this;
  HeadwayDistribution d = *this;
  if (is_atomic()) {
    for (auto& atom : d.atoms_) {
      atom.value = a * atom.value + b;
      if (!(atom.value > 0.0)) {
        throw InvalidArgument("affine pushforward moves an atom to a non-positive headway");
      }
    }
    // distinct atoms may round onto each other
    std::vector<Atom> merged;
    for (const auto& atom : d.atoms_) {
      if (!merged.empty() && merged.back().value == atom.value) {
        merged.back().probability += atom.probability;
      } else {
        merged.push_back(atom);
      }
    }
    d.atoms_ = std::move(merged);
    return d;
  }
  d.scale_ = a * scale_;
  d.shift_ = a * shift_ + b;
  if (d.shift_ < 0.0) {
    throw InvalidArgument("affine pushforward moves the support below zero");
  }
  return d;
}

double HeadwayDistribution::expect(const std::function<double(double)>& f, double rel_tol) const {
  if (is_atomic()) {
    numerics::CompensatedSum acc;
    for (const auto& a : atoms_) acc.add(a.probability * f(a.value));
    return acc.value();
  }
  // X = w^{1/k} removes the x^{k-1} singularity of the gamma density; w = W t / (1 - t)
  // maps the half line onto (0, 1).
  const double k = shape_;
  const double r = rate_;
  const double norm = std::exp(k * std::log(r) - std::lgamma(k + 1.0));
  const double w_scale = std::pow(k / r, k);
  auto integrand = [&](double t) {
    const double one_minus_t = 1.0 - t;
    const double w = w_scale * t / one_minus_t;
    const double x = std::pow(w, 1.0 / k);
    const double weight = norm * std::exp(-r * x) * w_scale / (one_minus_t * one_minus_t);
    if (weight == 0.0 || !std::isfinite(x)) return 0.0;
    return weight * f(scale_ * x + shift_);
  };
  numerics::QuadratureReport report;
  const double value = numerics::integrate(integrand, 0.0, 1.0, rel_tol, &report);
  return value;
}

std::string HeadwayDistribution::describe() const {
  std::ostringstream os;
  os.precision(12);
  os << to_string(kind_);
  if (is_atomic()) {
    os << '{';
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (i) os << ',';
      os << '(' << atoms_[i].value << ',' << atoms_[i].probability << ')';
    }
    os << '}';
  } else {
    os << "(shape=" << shape_ << ",rate=" << rate_;
    if (scale_ != 1.0 || shift_ != 0.0) os << ",scale=" << scale_ << ",shift=" << shift_;
    os << ')';
  }
  return os.str();
}

}  // namespace gapcap
