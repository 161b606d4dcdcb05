#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "gapcap/distributions.hpp"
#include "gapcap/poisson_core.hpp"

namespace gapcap {

/// x -> scale * x + shift.
struct AffineMap {
  double scale = 1.0;
  double shift = 0.0;

  double operator()(double x) const noexcept { return scale * x + shift; }
  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// Rule producing the attempt-indexed critical headways T_1, T_2, ...
/// Every policy is a family of affine maps h_j with h_1 the identity and T_j = h_j(T_1).
class ImpatiencePolicy {
 public:
  enum class Kind { None, Geometric, Explicit };

  static ImpatiencePolicy none();
  /// T_{j+1} = alpha (T_j - delta) + delta; alpha in (0, 1], delta >= 0.
  static ImpatiencePolicy geometric(double alpha, double delta_s);
  /// maps[0] gives h_2, maps[1] gives h_3, ...; the last map is reused for every later attempt.
  static ImpatiencePolicy explicit_maps(std::vector<AffineMap> maps);

  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  double delta() const noexcept { return delta_; }
  const std::vector<AffineMap>& maps() const noexcept { return maps_; }

  /// h_j for attempt j >= 1.
  AffineMap map(std::size_t j) const;
  double apply(std::size_t j, double t1) const { return map(j)(t1); }
  /// sup_{j > k} h_j(x).
  double sup_after(std::size_t k, double x) const;
  /// Smallest j from which every h_j is the same map; SIZE_MAX when there is none.
  std::size_t constant_from() const noexcept;

  std::string describe() const;

  friend bool operator==(const ImpatiencePolicy&, const ImpatiencePolicy&) = default;

 private:
  Kind kind_ = Kind::None;
  double alpha_ = 1.0;
  double delta_ = 0.0;
  std::vector<AffineMap> maps_;
};

std::string to_string(ImpatiencePolicy::Kind kind);

/// Law of T_j when T_1 ~ base: the pushforward of base under h_j.
/// A zero scale collapses the law onto the point h_j(0).
HeadwayDistribution attempt_law(const ImpatiencePolicy& policy, const HeadwayDistribution& base,
                                std::size_t j);

struct SeriesOptions {
  double tol = 1e-10;
  std::size_t max_terms = 100000;
  /// Quadrature tolerance for the outer expectation over a continuous T_1 (B3).
  double quad_tol = 1e-8;
  /// Sum a tail made of identical attempts in closed form instead of term by term.
  bool analytic_constant_tail = true;
};

struct ImpatientService {
  ServiceCharacterization service;
  std::size_t terms = 0;     ///< series terms used (largest over atoms for B3)
  double tail_bound = 0.0;   ///< bound on the neglected part of E[Y]
  bool converged = true;     ///< false when the term cap was hit; mean is then +inf
};

/// Service-time characterization of the head driver when the critical headway changes
/// from attempt to attempt. q = 0 gives the analytic limit E[T_1].
ImpatientService service_impatient(Behavior behavior, const HeadwayDistribution& base,
                                   const ImpatiencePolicy& policy, double q,
                                   const SeriesOptions& options = {});

/// 1 / E[Y] in vehicles per second; 0 on divergence.
double capacity_impatient(Behavior behavior, const HeadwayDistribution& base,
                          const ImpatiencePolicy& policy, double q,
                          const SeriesOptions& options = {});

}  // namespace gapcap
