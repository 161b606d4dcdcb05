#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gapcap {

/// One point mass of a critical-headway law: value in seconds, probability.
struct Atom {
  double value;
  double probability;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Law of the critical headway T.
///
/// Atomic laws (deterministic, discrete) are stored as sorted, merged atoms.
/// Continuous laws are T = scale * X + shift with X ~ Gamma(shape, rate); the
/// exponential law is shape 1. A (scale, shift) other than (1, 0) only arises
/// from affine_push.
class HeadwayDistribution {
 public:
  enum class Kind { Deterministic, Discrete, Exponential, Gamma };

  static HeadwayDistribution deterministic(double seconds);
  /// Zero-probability atoms are dropped and duplicates merged; probabilities must
  /// sum to one within 1e-12.
  static HeadwayDistribution discrete(std::vector<Atom> atoms);
  static HeadwayDistribution exponential(double alpha_per_s);
  static HeadwayDistribution gamma(double shape, double rate_per_s);

  Kind kind() const noexcept { return kind_; }
  bool is_atomic() const noexcept { return kind_ == Kind::Deterministic || kind_ == Kind::Discrete; }
  bool is_degenerate() const noexcept { return is_atomic() && atoms_.size() == 1; }

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  double shape() const noexcept { return shape_; }
  double rate() const noexcept { return rate_; }
  double scale() const noexcept { return scale_; }
  double shift() const noexcept { return shift_; }
  /// Infimum of the support (smallest atom, or the shift of a continuous law).
  double support_min() const noexcept;
  double support_max() const noexcept;

  double mean() const;
  double second_moment() const;

  /// E[e^{-sT}] for s >= 0.
  double laplace(double s) const;
  /// 1 - E[e^{-sT}], evaluated without cancellation for small s.
  double one_minus_laplace(double s) const;
  /// E[e^{qT}] for q >= 0; +infinity when it diverges.
  double mgf(double q) const;
  /// E[e^{qT}] - 1, evaluated without cancellation for small q; +infinity when divergent.
  double mgf_minus_one(double q) const;
  /// E[T e^{-qT}] for q >= 0.
  double tilted_mean(double q) const;
  /// E[T^order e^{tT}] for order in {0,1,2} and any real t; +infinity when divergent.
  double exp_moment(int order, double t) const;
  /// E[tau 1{tau < T}] with tau ~ Exp(q): mean time lost to a rejected gap.
  double failed_gap_mass(double q) const;

  /// Law of a*T + b. Needs a > 0 and a support that stays positive.
  HeadwayDistribution affine_push(double a, double b) const;

  /// E[f(T)]: exact sum for atomic laws, adaptive Gauss–Legendre otherwise.
  double expect(const std::function<double(double)>& f, double rel_tol = 1e-8) const;

  std::string describe() const;

  friend bool operator==(const HeadwayDistribution&, const HeadwayDistribution&) = default;

 private:
  HeadwayDistribution() = default;

  Kind kind_ = Kind::Deterministic;
  std::vector<Atom> atoms_;
  double shape_ = 1.0;
  double rate_ = 1.0;
  double scale_ = 1.0;
  double shift_ = 0.0;
};

std::string to_string(HeadwayDistribution::Kind kind);

}  // namespace gapcap
