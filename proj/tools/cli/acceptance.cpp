#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <gapcap/impatience.hpp>
#include <gapcap/mmpp.hpp>
#include <gapcap/poisson_core.hpp>
#include <gapcap/simulator.hpp>
#include <gapcap/units.hpp>

#include "experiments.hpp"

namespace gapcap::cli {

namespace {

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

bool near(double actual, double expected, double tol) { return std::abs(actual - expected) <= tol; }

std::string name_of(Behavior b) { return std::string(to_string(b)); }

// 1
CriterionResult naive_anchors() {
  CriterionResult r{1, "naive decomposition anchors", false, {}, 0.0};
  const auto mmpp = MmppSpec::two_state(veh_h_to_per_s(600.0), veh_h_to_per_s(2400.0), 0.02, 0.1);
  const auto law = law_example5();
  const double v1[] = {229.91, 250.65, 194.89};
  const double v2[] = {96.28, 130.74, 11.63};
  bool ok = true;
  std::ostringstream d;
  for (Behavior b : kAllBehaviors) {
    const auto i = static_cast<std::size_t>(b);
    const double a = per_s_to_veh_h(naive_capacity(b, mmpp, law, 1).value);
    const double c = per_s_to_veh_h(naive_capacity(b, mmpp, law, 2).value);
    ok = ok && near(a, v1[i], 0.1) && near(c, v2[i], 0.1);
    d << name_of(b) << fmt(" %.3f/%.3f ", a, c);
  }
  r.passed = ok;
  r.detail = d.str() + "veh/h (variant 1/variant 2)";
  return r;
}

// 2
CriterionResult jensen_ordering(std::uint64_t seed) {
  CriterionResult r{2, "capacity ordering B2 >= B1 >= B3", false, {}, 0.0};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t violations = 0;
  std::size_t points = 0;
  double worst = 0.0;
  while (points < 200) {
    HeadwayDistribution law = HeadwayDistribution::deterministic(1.0);
    double q = 0.0;
    const int kind = static_cast<int>(u(rng) * 3.0);
    if (kind == 0) {
      const int atoms = 2 + static_cast<int>(u(rng) * 3.0);
      std::vector<Atom> a;
      double total = 0.0;
      for (int i = 0; i < atoms; ++i) {
        a.push_back({0.5 + 30.0 * u(rng), 0.05 + u(rng)});
        total += a.back().probability;
      }
      for (auto& x : a) x.probability /= total;
      double sum = 0.0;
      for (std::size_t i = 0; i + 1 < a.size(); ++i) sum += a[i].probability;
      a.back().probability = 1.0 - sum;
      law = HeadwayDistribution::discrete(a);
      q = std::exp(std::log(1e-3) + u(rng) * std::log(1e3));  // 1e-3 .. 1 per second
    } else {
      const double shape = kind == 1 ? 1.0 : 0.3 + 5.0 * u(rng);
      const double rate = shape / (2.0 + 15.0 * u(rng));
      law = kind == 1 ? HeadwayDistribution::exponential(rate) : HeadwayDistribution::gamma(shape, rate);
      q = rate * (0.01 + 0.98 * u(rng));  // keeps E[exp(qT)] finite
    }
    ++points;
    const double c1 = capacity(Behavior::B1, HeadwayDistribution::deterministic(law.mean()), q);
    const double c2 = capacity(Behavior::B2, law, q);
    const double c3 = capacity(Behavior::B3, law, q);
    const double slack = 1e-12 * c2;
    if (c2 + slack < c1 || c1 + slack < c3) {
      ++violations;
      worst = std::max(worst, std::max(c1 - c2, c3 - c1));
    }
  }
  r.passed = violations == 0;
  r.detail = fmt("%zu violations in %zu random (law, q) points", violations, points);
  return r;
}

// 3
CriterionResult exponential_constancy() {
  CriterionResult r{3, "B2 exponential law gives a flat capacity", false, {}, 0.0};
  const auto law = HeadwayDistribution::exponential(1.0 / 7.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double q = veh_h_to_per_s(10.0 * std::pow(1000.0, i / 49.0));
    worst = std::max(worst, std::abs(per_s_to_veh_h(capacity(Behavior::B2, law, q)) / (3600.0 / 7.0) - 1.0));
  }
  r.passed = worst < 1e-9;
  r.detail = fmt("max relative deviation from 514.286 veh/h over 10..10000 veh/h: %.2e", worst);
  return r;
}

std::function<double(double)> b2_curve(HeadwayDistribution law) {
  return [law = std::move(law)](double q_veh_h) {
    return per_s_to_veh_h(capacity(Behavior::B2, law, veh_h_to_per_s(q_veh_h)));
  };
}

// 4
CriterionResult stationary_points() {
  CriterionResult r{4, "interior extrema of B2 capacity", false, {}, 0.0};
  const auto p = find_stationary_points(b2_curve(law_high_low(3.11, 42.0)), 10.0, 20000.0);
  const auto s = find_stationary_points(b2_curve(law_high_low(7.71, 0.57)), 10.0, 20000.0);
  const bool shape = p.size() == 1 && p[0].kind == StationaryKind::Maximum && s.size() == 2 &&
                     s[0].kind == StationaryKind::Minimum && s[1].kind == StationaryKind::Maximum;
  if (!shape) {
    r.detail = fmt("unexpected extrema: %zu for {3.11, 42}, %zu for {7.71, 0.57}", p.size(), s.size());
    return r;
  }
  r.passed = near(p[0].q, 437.0, 10.0) && near(s[0].q, 1965.0, 25.0) && near(s[1].q, 6055.0, 60.0);
  r.detail = fmt("max %.1f; min %.1f, max %.1f veh/h", p[0].q, s[0].q, s[1].q);
  return r;
}

// 5
CriterionResult gamma_monotone() {
  CriterionResult r{5, "B2 gamma(1/2) capacity keeps increasing", false, {}, 0.0};
  const auto curve = b2_curve(HeadwayDistribution::gamma(0.5, 1.0 / 14.0));
  double prev = -1.0;
  std::size_t drops = 0;
  for (int i = 0; i < 100; ++i) {
    const double c = curve(10.0 * std::pow(1000.0, i / 99.0));
    if (!(c > prev)) ++drops;
    prev = c;
  }
  r.passed = drops == 0;
  r.detail = fmt("%zu non-increasing steps on 100 log points over 10..10000 veh/h", drops);
  return r;
}

// 6
CriterionResult queue_paradox_check() {
  CriterionResult r{6, "queue-length paradox B1(T=7) vs B2{4,34}", false, {}, 0.0};
  const auto rep = queue_paradox(law_high_low(4.0, 34.0), veh_h_to_per_s(60.0), veh_h_to_per_s(60.0),
                                 veh_h_to_per_s(400.0));
  const double t = per_s_to_veh_h(rep.threshold);
  if (rep.crossings.size() != 2) {
    r.detail = fmt("%zu crossings at q = 60 veh/h, threshold %.2f", rep.crossings.size(), t);
    return r;
  }
  const double lo = per_s_to_veh_h(rep.crossings[0]);
  const double hi = per_s_to_veh_h(rep.crossings[1]);
  r.passed = near(lo, 71.2, 1.0) && near(hi, 445.1, 1.0) && near(t, 124.6, 1.0);
  r.detail = fmt("crossings %.2f and %.2f veh/h, threshold q = %.2f veh/h", lo, hi, t);
  return r;
}

// 7
CriterionResult impatience_reduction(std::uint64_t seed) {
  CriterionResult r{7, "constant critical headways reduce to the closed forms", false, {}, 0.0};
  std::mt19937_64 rng(seed + 7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SeriesOptions so;
  so.analytic_constant_tail = false;
  so.tol = 1e-15;
  so.quad_tol = 1e-12;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto b = kAllBehaviors[i % 3];
    const HeadwayDistribution law = (i / 3) % 2 == 0
        ? HeadwayDistribution::discrete({{2.0 + 6.0 * u(rng), 0.7}, {8.0 + 10.0 * u(rng), 0.3}})
        : HeadwayDistribution::deterministic(3.0 + 6.0 * u(rng));
    const double q = 0.02 + 0.3 * u(rng);
    const auto policy = i % 2 == 0 ? ImpatiencePolicy::explicit_maps({{1.0, 0.0}})
                                   : ImpatiencePolicy::geometric(1.0, 5.0 * u(rng));
    const auto series = service_impatient(b, law, policy, q, so).service;
    const auto closed = service(b, law, q);
    worst = std::max({worst, std::abs(series.mean / closed.mean - 1.0),
                      std::abs(series.second_moment / closed.second_moment - 1.0)});
  }
  r.passed = worst <= 1e-10;
  r.detail = fmt("worst relative difference over 20 points (mean and second moment): %.2e", worst);
  return r;
}

// 8
CriterionResult mmpp_single_state(double tol) {
  CriterionResult r{8, "one-state MMPP matches the Poisson capacities", false, {}, 0.0};
  const auto law = law_example5();
  MmppOptions o;
  o.tol = tol;
  double worst = 0.0;
  bool monotone = true;
  for (double q : {0.05, 1.0 / 6.0, 0.3}) {
    for (Behavior b : kAllBehaviors) {
      const auto res = capacity_mmpp(b, MmppSpec::poisson(q), law, o);
      worst = std::max(worst, std::abs(res.value / capacity(b, law, q) - 1.0));
      for (std::size_t i = 2; i < res.history.size(); ++i) {
        monotone = monotone && res.history[i].raw_gap < res.history[i - 1].raw_gap;
      }
      monotone = monotone && res.converged;
    }
  }
  r.passed = worst < 1e-3 && monotone;
  r.detail = fmt("worst relative error %.2e; phase-doubling gaps %s", worst, monotone ? "shrink monotonically" : "do not shrink");
  return r;
}

// 9
CriterionResult long_platoon_limit(double tol) {
  CriterionResult r{9, "long platoons approach the first decomposition formula", false, {}, 0.0};
  const auto law = law_example5();
  const auto mmpp = MmppSpec::two_state(veh_h_to_per_s(600.0), veh_h_to_per_s(2400.0), 0.02e-3, 0.1e-3);
  MmppOptions o;
  o.tol = tol;
  const double v1[] = {229.91, 250.65, 194.89};
  double worst = 0.0;
  std::ostringstream d;
  for (Behavior b : kAllBehaviors) {
    const double c = per_s_to_veh_h(capacity_mmpp(b, mmpp, law, o).value);
    worst = std::max(worst, std::abs(c / v1[static_cast<std::size_t>(b)] - 1.0));
    d << name_of(b) << fmt(" %.3f ", c);
  }
  r.passed = worst < 0.01;
  r.detail = d.str() + fmt("veh/h; worst relative gap %.3f%%", 100.0 * worst);
  return r;
}

// 10
CriterionResult oracle_grid(const AcceptanceOptions& options) {
  CriterionResult r{10, "analytic capacities inside the simulator's 99% intervals", false, {}, 0.0};
  struct Cell {
    std::string name;
    Behavior behavior;
    HeadwayDistribution law;
    ImpatiencePolicy policy;
    std::optional<MmppSpec> mmpp;
    double q = 0.0;
  };
  std::vector<Cell> cells;
  const auto hl = law_high_low(6.22, 14.0);
  const auto ex4_law = law_high_low(3.0, 60.0);
  // Example 4 chain scaled to an average of 180 veh/h
  const auto ex4_base = MmppSpec::two_state(0.3, 0.1, 1.0 / 60.0, 1.0 / 240.0);
  const double scale = veh_h_to_per_s(180.0) / average_rate(ex4_base);
  const auto ex4 = MmppSpec::two_state(0.3 * scale, 0.1 * scale, 1.0 / 60.0, 1.0 / 240.0);
  const auto ex5 = MmppSpec::two_state(veh_h_to_per_s(600.0), veh_h_to_per_s(2400.0), 0.02, 0.1);
  for (Behavior b : kAllBehaviors) {
    cells.push_back({"poisson/" + name_of(b), b, hl, ImpatiencePolicy::none(), std::nullopt, 0.25});
    cells.push_back({"poisson+impatience/" + name_of(b), b, hl, ImpatiencePolicy::geometric(0.9, 4.0), std::nullopt, 0.25});
    cells.push_back({"mmpp-ex4/" + name_of(b), b, ex4_law, ImpatiencePolicy::none(), ex4, 0.0});
    cells.push_back({"mmpp-ex5/" + name_of(b), b, law_example5(), ImpatiencePolicy::none(), ex5, 0.0});
  }
  const std::size_t crossings = options.crossings ? options.crossings : (options.quick ? 100'000 : 1'000'000);
  MmppOptions mo;
  mo.tol = options.mmpp_tol;
  std::size_t misses = 0;
  std::ostringstream d;
  for (const auto& c : cells) {
    const double analytic = c.mmpp ? capacity_mmpp(c.behavior, *c.mmpp, c.law, mo).value
                                   : capacity_impatient(c.behavior, c.law, c.policy, c.q);
    SimConfig cfg;
    cfg.major = c.mmpp ? MajorTraffic::markov(*c.mmpp) : MajorTraffic::poisson(c.q);
    cfg.behavior = c.behavior;
    cfg.law = c.law;
    cfg.policy = c.policy;
    cfg.crossings = crossings;
    cfg.replications = options.replications;
    cfg.seed = options.seed;
    cfg.threads = options.threads;
    const auto est = simulate_capacity(cfg);
    if (!est.contains(analytic)) {
      ++misses;
      d << fmt("%s: %.3f outside [%.3f, %.3f]; ", c.name.c_str(), per_s_to_veh_h(analytic),
               per_s_to_veh_h(est.ci_low), per_s_to_veh_h(est.ci_high));
    }
  }
  r.passed = misses == 0;
  r.detail = fmt("%zu of %zu cells outside the interval (%zu x %zu crossings each)", misses, cells.size(),
                 options.replications, crossings);
  if (misses) r.detail += ": " + d.str();
  return r;
}

// 11
CriterionResult instability_flags() {
  CriterionResult r{11, "B3 exponential law: zero capacity and infinite-mean flags", false, {}, 0.0};
  const auto law = HeadwayDistribution::exponential(1.0 / 7.0);
  std::ostringstream bad;
  for (double q : {1.0 / 7.0, 0.2, 1.0}) {
    if (capacity(Behavior::B3, law, q) != 0.0) bad << fmt("capacity at q=%.4f is not 0; ", q);
  }
  for (double q : {1.0 / 14.0, 0.1, 0.14}) {
    const double cap = capacity(Behavior::B3, law, q);
    const auto m = queue_metrics(Behavior::B3, law, q, 0.1 * cap);
    if (!(cap > 0.0) || m.regime != QueueRegime::InfiniteMean) bad << fmt("q=%.4f not flagged; ", q);
  }
  const double cap = capacity(Behavior::B3, law, 0.07);
  if (queue_metrics(Behavior::B3, law, 0.07, 0.1 * cap).regime != QueueRegime::Stable) bad << "q=0.07 flagged; ";
  r.passed = bad.str().empty();
  r.detail = r.passed ? "capacity 0 for q >= 1/7, infinite second moment for 1/14 <= q < 1/7, finite below"
                      : bad.str();
  return r;
}

template <class Fn>
CriterionResult timed(Fn&& fn, double budget_s) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = fn();
  } catch (const std::exception& e) {
    r.detail = std::string("error: ") + e.what();
    r.passed = false;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s > 0.0 && r.seconds > budget_s) {
    r.passed = false;
    r.detail += fmt(" [over the %.0f s budget]", budget_s);
  }
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  const auto add = [&](int id, CriterionResult r) {
    r.id = id;
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  };
  add(1, timed(naive_anchors, 1.0));
  add(2, timed([&] { return jensen_ordering(options.seed); }, 5.0));
  add(3, timed(exponential_constancy, 0.0));
  add(4, timed(stationary_points, 10.0));
  add(5, timed(gamma_monotone, 0.0));
  add(6, timed(queue_paradox_check, 0.0));
  add(7, timed([&] { return impatience_reduction(options.seed); }, 0.0));
  add(8, timed([&] { return mmpp_single_state(options.mmpp_tol); }, 60.0));
  add(9, timed([&] { return long_platoon_limit(options.mmpp_tol); }, 0.0));
  add(10, timed([&] { return oracle_grid(options); }, 600.0));
  add(11, timed(instability_flags, 0.0));
  return out;
}

std::string format_result(const CriterionResult& r) {
  return fmt("%s [%d] %s (%.2f s): %s", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds, r.detail.c_str());
}

}  // namespace gapcap::cli
