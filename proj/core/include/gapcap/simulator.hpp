#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gapcap/distributions.hpp"
#include "gapcap/impatience.hpp"
#include "gapcap/mmpp.hpp"
#include "gapcap/poisson_core.hpp"

namespace gapcap {

/// Major-road traffic for the simulator: independent Poisson lanes, or one MMPP.
class MajorTraffic {
 public:
  static MajorTraffic poisson(double q_per_s);
  static MajorTraffic lanes(std::vector<double> rates_per_s);
  static MajorTraffic markov(MmppSpec spec);

  bool is_markov() const noexcept { return mmpp_.has_value(); }
  const std::vector<double>& lane_rates() const noexcept { return lanes_; }
  const MmppSpec& mmpp() const { return mmpp_.value(); }
  /// Long-run arrival rate.
  double average_rate() const;

 private:
  std::vector<double> lanes_;
  std::optional<MmppSpec> mmpp_;
};

struct SimConfig {
  MajorTraffic major = MajorTraffic::poisson(0.0);
  Behavior behavior = Behavior::B1;
  HeadwayDistribution law = HeadwayDistribution::deterministic(1.0);
  ImpatiencePolicy policy = ImpatiencePolicy::none();
  /// Minor-road arrival rate; absent means a saturated minor road.
  std::optional<double> lambda;
  /// Crossings simulated per replication, warm-up included.
  std::size_t crossings = 1'000'000;
  std::size_t replications = 10;
  std::uint64_t seed = 1;
  /// Fraction of the crossings discarded as warm-up.
  double warmup_fraction = 0.01;
  /// Worker threads; 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

struct SimEstimate {
  double point = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;   ///< 99% Student-t interval over replications
  double ci_high = 0.0;
  std::size_t events = 0;  ///< crossings processed, all replications
  std::vector<double> per_replication;

  bool contains(double x) const { return x >= ci_low && x <= ci_high; }
};

/// Saturated minor road: departures per second after warm-up.
SimEstimate simulate_capacity(const SimConfig& config);

struct QueueEstimate {
  SimEstimate queue_length;  ///< time-average number of minor-road cars in the system
  SimEstimate delay;         ///< mean seconds from arrival to crossing
  SimEstimate throughput;    ///< departures per second
  bool unstable = false;     ///< backlog grew roughly linearly in some replication
  std::size_t final_backlog = 0;  ///< largest end-of-run backlog over replications
};

SimEstimate pooled_estimate(std::vector<double> per_replication, std::size_t events);

QueueEstimate simulate_queue(const SimConfig& config);

/// Occupation fractions and arrival rate of a simulated MMPP path.
struct MmppTrace {
  std::vector<double> time_fraction;
  double arrival_rate = 0.0;
  std::size_t arrivals = 0;
};

MmppTrace trace_mmpp(const MmppSpec& mmpp, double horizon_s, std::uint64_t seed);

}  // namespace gapcap
