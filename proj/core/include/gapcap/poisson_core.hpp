#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "gapcap/distributions.hpp"

namespace gapcap {

/// Gap-acceptance behaviour of minor-road drivers.
///  - B1: everyone uses the same fixed critical headway.
///  - B2: a fresh headway is drawn at every attempt.
///  - B3: each driver draws one headway and keeps it for all attempts.
enum class Behavior { B1, B2, B3 };

inline constexpr Behavior kAllBehaviors[] = {Behavior::B1, Behavior::B2, Behavior::B3};

std::string_view to_string(Behavior b);
std::optional<Behavior> parse_behavior(std::string_view text);

/// Service time Y of the head-of-queue driver (time until it has crossed).
struct ServiceCharacterization {
  double mean = 0.0;           ///< E[Y] in seconds, +inf when divergent
  double second_moment = 0.0;  ///< E[Y^2] in s^2, +inf when divergent
  std::function<double(double)> lst;  ///< s -> E[e^{-sY}], s >= 0
};

/// Closed-form service characterization under Poisson(q) major traffic.
/// B1 uses T := mean(law) when handed a non-degenerate law.
ServiceCharacterization service(Behavior behavior, const HeadwayDistribution& law, double q);

/// Minor-road capacity 1 / E[Y] in vehicles per second; 0 when E[Y] is infinite.
double capacity(Behavior behavior, const HeadwayDistribution& law, double q);

enum class QueueRegime {
  Stable,        ///< rho < 1 and E[Y^2] finite
  InfiniteMean,  ///< rho < 1 but E[Y^2] infinite: queue is stable yet its mean is not
  Unstable,      ///< rho >= 1
};

std::string_view to_string(QueueRegime regime);

/// M/G/1 metrics for Poisson(lambda) minor arrivals, via Pollaczek–Khinchine and Little.
struct QueueMetrics {
  double rho = 0.0;
  double mean_queue_length = 0.0;  ///< vehicles in the minor-road system, time average
  double mean_delay = 0.0;         ///< seconds from arrival to crossing
  QueueRegime regime = QueueRegime::Stable;
};

QueueMetrics queue_metrics(Behavior behavior, const HeadwayDistribution& law, double q, double lambda);
QueueMetrics queue_metrics(const ServiceCharacterization& service, double lambda);

enum class StationaryKind { Maximum, Minimum };

struct StationaryPoint {
  double q;
  double value;
  StationaryKind kind;
};

struct StationaryScanOptions {
  std::size_t grid_points = 512;
  double rel_tol = 1e-3;
};

/// Interior extrema of `curve` on [lo, hi]: log-spaced grid scan, then golden-section
/// refinement of each bracketed extremum. Sorted by q.
std::vector<StationaryPoint> find_stationary_points(const std::function<double(double)>& curve,
                                                    double lo, double hi,
                                                    StationaryScanOptions options = {});

namespace detail {
/// E[Y^2] for a fixed critical headway T under Poisson(q), accurate for small qT.
double fixed_headway_second_moment(double t, double q);
/// E[Y] for a fixed critical headway T.
double fixed_headway_mean(double t, double q);
/// LST of Y for a fixed critical headway T.
double fixed_headway_lst(double t, double q, double s);
}  // namespace detail

}  // namespace gapcap
