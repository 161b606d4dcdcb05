#pragma once

#include <vector>

#include <gapcap/distributions.hpp>
#include <gapcap/poisson_core.hpp>

namespace gapcap::cli {

/// Laws used by the presets. The 56/9 atom keeps E[T] at exactly 7 s.
HeadwayDistribution law_high_low(double low, double high, double p_low = 0.9);
HeadwayDistribution law_example5();

/// Minor rates (per second) where the mean queue lengths of two services coincide,
/// scanned below the smaller capacity.
std::vector<double> queue_crossings(const ServiceCharacterization& a, const ServiceCharacterization& b);

/// max over lambda of (L_b - L_a) / lambda, below the smaller capacity.
double worst_queue_excess(const ServiceCharacterization& a, const ServiceCharacterization& b);

struct ParadoxReport {
  std::vector<double> crossings;  ///< per second, at q
  double threshold = 0.0;         ///< per second; the paradox needs q below this
};

/// Mean queue of B2 with `law` against B1 at T = E[T]: where B2 queues longer, and
/// the major rate above which it never does. Threshold searched in [q_lo, q_hi].
ParadoxReport queue_paradox(const HeadwayDistribution& law, double q, double q_lo, double q_hi);

}  // namespace gapcap::cli
