#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gapcap/distributions.hpp"
#include "gapcap/impatience.hpp"
#include "gapcap/numerics.hpp"
#include "gapcap/poisson_core.hpp"

namespace gapcap {

/// Markov-modulated Poisson major-road traffic: arrivals at rate q_i while the
/// background chain (generator M) sits in state i. Rates are per second.
class MmppSpec {
 public:
  /// `generator` may leave its diagonal at zero; it is then filled in from the rows.
  MmppSpec(numerics::Matrix generator, std::vector<double> rates_per_s);

  static MmppSpec poisson(double q_per_s);
  /// Two states with leave rates mu1, mu2 and arrival rates q1, q2.
  static MmppSpec two_state(double q1, double q2, double mu1, double mu2);

  std::size_t states() const noexcept { return rates_.size(); }
  const numerics::Matrix& generator() const noexcept { return generator_; }
  std::span<const double> rates() const noexcept { return rates_; }
  double rate(std::size_t i) const { return rates_.at(i); }
  /// mu_i = -M_ii
  double leave_rate(std::size_t i) const { return -generator_(i, i); }

  /// Same process with states listed in `order` (order[new] = old).
  MmppSpec permuted(std::span<const std::size_t> order) const;

 private:
  numerics::Matrix generator_;
  std::vector<double> rates_;
};

/// pi with pi M = 0 and sum pi = 1. Throws ReducibleChainError.
std::vector<double> stationary(const MmppSpec& mmpp);

/// Long-run arrival rate sum_i pi_i q_i.
double average_rate(const MmppSpec& mmpp);

/// Erlang-phase plan: the n-th headway value T_n is replaced by k_n exponential phases
/// of rate kappa_n = k_n / T_n.
struct PhasePlan {
  std::vector<double> headways;
  std::vector<double> weights;
  std::vector<std::size_t> phases;
  std::vector<double> kappa;

  /// One block per atom of `law` (B2, B3) or a single block at mean(law) (B1),
  /// every block with k phases.
  static PhasePlan uniform(Behavior behavior, const HeadwayDistribution& law, std::size_t k);

  std::size_t blocks() const noexcept { return headways.size(); }
  /// Position of unknown (block n, state i, phase j) for d background states.
  std::size_t index(std::size_t n, std::size_t i, std::size_t j, std::size_t d) const;
  std::size_t unknowns(std::size_t d) const;
};

/// Dense cycle system from the balance equations, unknowns ordered (block, state, phase).
/// rhs[0] is b (served cars), rhs[1] is c (cycle time). State 0 is the reference state.
numerics::DenseSystem assemble_cycle_system(Behavior behavior, const MmppSpec& mmpp,
                                            const PhasePlan& plan);

/// The constant-headway system: d*k unknowns, row (i-1)k + j + 1 for state i and phase j.
numerics::DenseSystem assemble_b1(const MmppSpec& mmpp, double t_seconds, std::size_t k);

struct CycleQuantities {
  std::vector<double> h;    ///< cars served till the cycle ends, per unknown
  std::vector<double> tau;  ///< seconds till the cycle ends, per unknown
  double h10 = 0.0;         ///< mixed over blocks with the plan weights
  double tau10 = 0.0;
  double residual_h = 0.0;
  double residual_tau = 0.0;

  double capacity() const { return h10 / tau10; }
};

/// Solves the cycle system without forming it: backward recursion over the phases of
/// each block, then a small system in the phase-0 unknowns.
CycleQuantities solve_cycle(Behavior behavior, const MmppSpec& mmpp, const PhasePlan& plan);

/// Same quantities through dense LU of assemble_cycle_system. Meant for small plans.
CycleQuantities solve_cycle_dense(Behavior behavior, const MmppSpec& mmpp, const PhasePlan& plan);

struct MmppOptions {
  std::size_t initial_phases = 64;
  std::size_t max_phases = 4096;
  double tol = 1e-4;
  /// Combine C(k) and C(k/2) as 2C(k) - C(k/2) to cancel the 1/k Erlang error.
  bool extrapolate = true;
};

struct PhaseStep {
  std::size_t phases;
  double raw;           ///< h10 / tau10 at this k
  double extrapolated;  ///< 2 raw(k) - raw(k/2); equals raw on the first step
  double raw_gap;       ///< |raw(k) - raw(k/2)| / raw(k); 0 on the first step
  double residual;
};

struct CapacityResult {
  double value = 0.0;       ///< vehicles per second
  bool converged = false;
  std::string warning;
  std::size_t phases = 0;   ///< final phase count per block
  double gap = 0.0;         ///< last relative change used for the convergence test
  double residual = 0.0;    ///< worst solver residual seen
  double h10 = 0.0;
  double tau10 = 0.0;
  std::vector<PhaseStep> history;
};

/// h10 / tau10 with phase doubling. Throws UnsupportedLawError for continuous laws.
CapacityResult capacity_mmpp(Behavior behavior, const MmppSpec& mmpp, const HeadwayDistribution& law,
                             const MmppOptions& options = {});

/// Throws UnsupportedCombinationError unless the policy is ImpatiencePolicy::none().
CapacityResult capacity_mmpp(Behavior behavior, const MmppSpec& mmpp, const HeadwayDistribution& law,
                             const ImpatiencePolicy& policy, const MmppOptions& options = {});

struct NaiveResult {
  double value = 0.0;  ///< vehicles per second
  bool degenerate = false;
  std::string warning;
};

/// variant 1: sum_i pi_i / E[S_i]; variant 2: 1 / sum_i pi_i E[S_i].
NaiveResult naive_capacity(const MmppSpec& mmpp, std::span<const double> mean_service, int variant);

/// E[S_i] taken from the Poisson closed forms at rate q_i.
NaiveResult naive_capacity(Behavior behavior, const MmppSpec& mmpp, const HeadwayDistribution& law,
                           int variant);

}  // namespace gapcap
