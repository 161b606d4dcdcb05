#include "gapcap/poisson_core.hpp"

#include <algorithm>
#include <cmath>

#include "gapcap/errors.hpp"
#include "gapcap/numerics.hpp"
#include "gapcap/units.hpp"

namespace gapcap {

std::string_view to_string(Behavior b) {
  switch (b) {
    case Behavior::B1: return "B1";
    case Behavior::B2: return "B2";
    case Behavior::B3: return "B3";
  }
  return "?";
}

std::optional<Behavior> parse_behavior(std::string_view text) {
  if (text == "B1" || text == "b1") return Behavior::B1;
  if (text == "B2" || text == "b2") return Behavior::B2;
  if (text == "B3" || text == "b3") return Behavior::B3;
  return std::nullopt;
}

std::string_view to_string(QueueRegime regime) {
  switch (regime) {
    case QueueRegime::Stable: return "stable";
    case QueueRegime::InfiniteMean: return "infinite_mean";
    case QueueRegime::Unstable: return "unstable";
  }
  return "?";
}

namespace detail {

double fixed_headway_mean(double t, double q) {
  if (q == 0.0) return t;
  return std::expm1(q * t) / q;
}

double fixed_headway_second_moment(double t, double q) {
  if (q == 0.0) return t * t;
  const double x = q * t;
  if (x < 0.1) {
    // 2 T^2 sum_{n>=2} (2^n - n - 1) x^{n-2} / n!
    double acc = 0.0;
    double factorial = 2.0;
    double power = 1.0;
    double two_n = 4.0;
    for (int n = 2; n <= 22; ++n) {
      if (n > 2) {
        factorial *= n;
        power *= x;
        two_n *= 2.0;
      }
      acc += (two_n - n - 1.0) * power / factorial;
    }
    return 2.0 * t * t * acc;
  }
  const double ex = std::exp(x);
  const double value = 2.0 * (ex * ex - x * ex - ex) / (q * q);
  return std::isfinite(value) ? value : kInfinity;
}

double fixed_headway_lst(double t, double q, double s) {
  if (q == 0.0) return std::exp(-s * t);
  if (s == 0.0) return 1.0;
  const double u = s + q;
  const double e = std::exp(-u * t);
  return u * e / (s + q * e);
}

}  // namespace detail

namespace {

void check_rate(double q) {
  if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidArgument("major-road rate must be finite and >= 0");
}

ServiceCharacterization service_b1(double t, double q) {
  ServiceCharacterization out;
  out.mean = detail::fixed_headway_mean(t, q);
  if (!std::isfinite(out.mean)) out.mean = kInfinity;
  out.second_moment = detail::fixed_headway_second_moment(t, q);
  out.lst = [t, q](double s) { return detail::fixed_headway_lst(t, q, s); };
  return out;
}

ServiceCharacterization service_b2(const HeadwayDistribution& law, double q) {
  ServiceCharacterization out;
  if (q == 0.0) {
    out.mean = law.mean();
    out.second_moment = law.second_moment();
    out.lst = [law](double s) { return law.laplace(s); };
    return out;
  }
  const double success = law.laplace(q);        // L = E[e^{-qT}]
  const double deficit = law.one_minus_laplace(q);  // 1 - L
  const double tilted = law.tilted_mean(q);     // E[T e^{-qT}]
  if (success == 0.0) {
    out.mean = kInfinity;
    out.second_moment = kInfinity;
  } else {
    const double g = deficit / q;
    out.mean = g / success;
    out.second_moment = 2.0 * (g - q * tilted * g - tilted * success) / (q * success * success);
  }
  out.lst = [law, q](double s) {
    if (s == 0.0) return 1.0;
    const double u = s + q;
    const double lu = law.laplace(u);
    return u * lu / (s + q * lu);
  };
  return out;
}

ServiceCharacterization service_b3(const HeadwayDistribution& law, double q) {
  ServiceCharacterization out;
  if (q == 0.0) {
    out.mean = law.mean();
    out.second_moment = law.second_moment();
    out.lst = [law](double s) { return law.laplace(s); };
    return out;
  }
  out.mean = law.mgf_minus_one(q) / q;
  if (law.is_atomic()) {
    numerics::CompensatedSum acc;
    for (const auto& a : law.atoms()) {
      acc.add(a.probability * detail::fixed_headway_second_moment(a.value, q));
    }
    out.second_moment = acc.value();
    out.lst = [law, q](double s) {
      numerics::CompensatedSum lst;
      for (const auto& a : law.atoms()) lst.add(a.probability * detail::fixed_headway_lst(a.value, q, s));
      return lst.value();
    };
  } else {
    // E[Y^2 | T] = 2 (e^{2qT} - qT e^{qT} - e^{qT}) / q^2
    const double m2 = law.mgf_minus_one(2.0 * q);
    const double m1 = law.mgf_minus_one(q);
    const double weighted = law.exp_moment(1, q);
    if (is_infinite(m2) || is_infinite(m1) || is_infinite(weighted)) {
      out.second_moment = kInfinity;
    } else {
      out.second_moment = 2.0 * (m2 - m1 - q * weighted) / (q * q);
    }
    out.lst = [law, q](double s) {
      if (s == 0.0) return 1.0;
      return law.expect([q, s](double t) { return detail::fixed_headway_lst(t, q, s); }, 1e-12);
    };
  }
  if (!std::isfinite(out.mean)) out.mean = kInfinity;
  if (!std::isfinite(out.second_moment)) out.second_moment = kInfinity;
  return out;
}

}  // namespace

ServiceCharacterization service(Behavior behavior, const HeadwayDistribution& law, double q) {
  check_rate(q);
  switch (behavior) {
    case Behavior::B1: return service_b1(law.mean(), q);
    case Behavior::B2: return service_b2(law, q);
    case Behavior::B3: return service_b3(law, q);
  }
  throw InvalidArgument("unknown behaviour");
}

double capacity(Behavior behavior, const HeadwayDistribution& law, double q) {
  check_rate(q);
  double mean = 0.0;
  switch (behavior) {
    case Behavior::B1: mean = detail::fixed_headway_mean(law.mean(), q); break;
    case Behavior::B2:
      mean = q == 0.0 ? law.mean() : law.one_minus_laplace(q) / (q * law.laplace(q));
      break;
    case Behavior::B3: mean = q == 0.0 ? law.mean() : law.mgf_minus_one(q) / q; break;
  }
  if (!std::isfinite(mean)) return 0.0;
  return 1.0 / mean;
}

QueueMetrics queue_metrics(const ServiceCharacterization& svc, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("minor-road rate must be >= 0");
  QueueMetrics m;
  if (lambda == 0.0) return m;
  m.rho = is_infinite(svc.mean) ? kInfinity : lambda * svc.mean;
  if (!(m.rho < 1.0)) {
    m.regime = QueueRegime::Unstable;
    m.mean_queue_length = kInfinity;
    m.mean_delay = kInfinity;
    return m;
  }
  if (is_infinite(svc.second_moment)) {
    m.regime = QueueRegime::InfiniteMean;
    m.mean_queue_length = kInfinity;
    m.mean_delay = kInfinity;
    return m;
  }
  m.mean_queue_length = m.rho + lambda * lambda * svc.second_moment / (2.0 * (1.0 - m.rho));
  m.mean_delay = m.mean_queue_length / lambda;
  return m;
}

QueueMetrics queue_metrics(Behavior behavior, const HeadwayDistribution& law, double q, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("minor-road rate must be >= 0");
  if (lambda == 0.0) return {};
  return queue_metrics(service(behavior, law, q), lambda);
}

std::vector<StationaryPoint> find_stationary_points(const std::function<double(double)>& curve,
                                                    double lo, double hi,
                                                    StationaryScanOptions options) {
  if (!(lo > 0.0) || !(hi > lo)) throw InvalidArgument("stationary-point scan needs 0 < lo < hi");
  const std::size_t n = std::max<std::size_t>(options.grid_points, 3);
  std::vector<double> q(n);
  std::vector<double> v(n);
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = i + 1 == n ? hi : std::exp(log_lo + step * static_cast<double>(i));
    v[i] = curve(q[i]);
  }
  // Differences below this relative size are treated as flat (rounding noise).
  constexpr double kFlat = 1e-10;
  std::vector<int> slope(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = v[i + 1] - v[i];
    const double scale = std::max(std::abs(v[i]), std::abs(v[i + 1]));
    slope[i] = std::abs(d) <= kFlat * scale ? 0 : (d > 0.0 ? 1 : -1);
  }

  std::vector<StationaryPoint> out;
  int last_sign = 0;
  std::size_t last_index = 0;  // index of the last non-flat segment
  for (std::size_t i = 0; i < slope.size(); ++i) {
    if (slope[i] == 0) continue;
    if (last_sign != 0 && slope[i] != last_sign) {
      const double a = q[last_index];
      const double b = q[i + 1];
      const bool is_max = last_sign > 0;
      std::function<double(double)> objective = curve;
      if (!is_max) objective = [&curve](double x) { return -curve(x); };
      const double at = numerics::golden_section_maximize(objective, a, b, options.rel_tol * 0.1);
      out.push_back({at, curve(at), is_max ? StationaryKind::Maximum : StationaryKind::Minimum});
    }
    last_sign = slope[i];
    last_index = i;
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.q < y.q; });
  return out;
}

}  // namespace gapcap
