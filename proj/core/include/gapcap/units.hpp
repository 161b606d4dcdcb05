#pragma once

#include <cmath>
#include <limits>

namespace gapcap {

// Everything inside the library is in seconds and events per second.
// veh/h only appears at the scenario/CSV boundary.
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

constexpr double veh_h_to_per_s(double veh_h) { return veh_h / kSecondsPerHour; }
constexpr double per_s_to_veh_h(double per_s) { return per_s * kSecondsPerHour; }

inline bool is_infinite(double x) { return std::isinf(x) && x > 0.0; }

}  // namespace gapcap
