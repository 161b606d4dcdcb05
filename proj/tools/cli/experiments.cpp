#include "experiments.hpp"

#include <algorithm>
#include <cmath>

#include <gapcap/errors.hpp>
#include <gapcap/numerics.hpp>
#include <gapcap/units.hpp>

namespace gapcap::cli {

HeadwayDistribution law_high_low(double low, double high, double p_low) {
  return HeadwayDistribution::discrete({{low, p_low}, {high, 1.0 - p_low}});
}

HeadwayDistribution law_example5() { return law_high_low(56.0 / 9.0, 14.0); }

namespace {

constexpr std::size_t kGrid = 800;

double limit_rate(const ServiceCharacterization& a, const ServiceCharacterization& b) {
  return std::min(1.0 / a.mean, 1.0 / b.mean);
}

double excess(const ServiceCharacterization& a, const ServiceCharacterization& b, double lambda) {
  return queue_metrics(b, lambda).mean_queue_length - queue_metrics(a, lambda).mean_queue_length;
}

// log grid over (0, cap) that leans towards both ends
std::vector<double> lambda_grid(double cap) {
  std::vector<double> g;
  const double lo = std::log(cap * 1e-5);
  const double hi = std::log(cap * (1.0 - 1e-6));
  for (std::size_t i = 0; i < kGrid; ++i) g.push_back(std::exp(lo + (hi - lo) * i / (kGrid - 1)));
  return g;
}

}  // namespace

std::vector<double> queue_crossings(const ServiceCharacterization& a, const ServiceCharacterization& b) {
  const double cap = limit_rate(a, b);
  if (!(cap > 0.0) || !std::isfinite(cap)) return {};
  const auto grid = lambda_grid(cap);
  std::vector<double> roots;
  // (L_b - L_a) / lambda keeps its sign but not its vanishing size near zero
  auto f = [&](double l) { return excess(a, b, l) / l; };
  double prev = f(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = f(grid[i]);
    if (std::isfinite(prev) && std::isfinite(cur) && (prev < 0.0) != (cur < 0.0)) {
      roots.push_back(numerics::find_root(f, grid[i - 1], grid[i], grid[i - 1] * 1e-12));
    }
    prev = cur;
  }
  return roots;
}

double worst_queue_excess(const ServiceCharacterization& a, const ServiceCharacterization& b) {
  const double cap = limit_rate(a, b);
  const auto grid = lambda_grid(cap);
  auto f = [&](double l) { return excess(a, b, l) / l; };
  std::size_t best = 0;
  double best_value = -kInfinity;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (std::isfinite(v) && v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  const double x = numerics::golden_section_maximize(f, lo, hi, 1e-10);
  return std::max(best_value, f(x));
}

ParadoxReport queue_paradox(const HeadwayDistribution& law, double q, double q_lo, double q_hi) {
  const auto b1 = HeadwayDistribution::deterministic(law.mean());
  ParadoxReport r;
  r.crossings = queue_crossings(service(Behavior::B1, b1, q), service(Behavior::B2, law, q));
  auto g = [&](double major) {
    return worst_queue_excess(service(Behavior::B1, b1, major), service(Behavior::B2, law, major));
  };
  if ((g(q_lo) > 0.0) == (g(q_hi) > 0.0)) throw Error("paradox threshold is not bracketed by the search range");
  r.threshold = numerics::find_root(g, q_lo, q_hi, q_lo * 1e-10);
  return r;
}

}  // namespace gapcap::cli
