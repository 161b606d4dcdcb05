#include "presets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <gapcap/errors.hpp>
#include <gapcap/impatience.hpp>
#include <gapcap/mmpp.hpp>
#include <gapcap/units.hpp>

#include "experiments.hpp"

namespace gapcap::cli {

using nlohmann::json;

bool PresetResult::passed() const {
  return std::all_of(anchors.begin(), anchors.end(), [](const AnchorCheck& a) { return a.passed; });
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"example1", "example2", "example3", "example4", "example5"};
  return names;
}

AnchorCheck check_near(std::string name, double actual, double expected, double tolerance) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.4f (expected %g +- %g)", actual, expected, tolerance);
  return {std::move(name), buf, std::abs(actual - expected) <= tolerance};
}

namespace {

// B3 with a 60 s headway in dense traffic needs far more phases than the library default
constexpr std::size_t kFigurePhases = 65536;

json discrete(double low, double high, double p_low = 0.9) {
  return {{"kind", "discrete"}, {"atoms", {{low, p_low}, {high, 1.0 - p_low}}}};
}

json deterministic(double t) { return {{"kind", "deterministic"}, {"seconds", t}}; }

json poisson_veh_h(double q) { return {{"poisson", {{"rate_veh_h", q}}}}; }

json sweep(const char* parameter, double from, double to, std::size_t points, bool log) {
  return {{"parameter", parameter}, {"from", from}, {"to", to}, {"points", points}, {"spacing", log ? "log" : "linear"}};
}

json scenario(std::string label, const char* analysis, std::vector<std::string> behaviors, json headway, json arrival) {
  return {{"label", std::move(label)}, {"analysis", analysis}, {"behaviors", std::move(behaviors)},
          {"headway", std::move(headway)}, {"arrival", std::move(arrival)}};
}

// Example 4 background chain: one minute at q1 = 3 q2, then four minutes at q2
json example4_arrival() {
  return {{"mmpp", {{"rates_per_s", {0.3, 0.1}}, {"transitions_per_s", {{0.0, 1.0 / 60.0}, {1.0 / 240.0, 0.0}}}}}};
}

// Example 5: 600 and 2400 veh/h with pi = (5/6, 1/6); platoons last 1/mu2
json example5_arrival() {
  return {{"mmpp", {{"rates_veh_h", {600.0, 2400.0}}, {"transitions_per_s", {{0.0, 0.02}, {0.1, 0.0}}}}}};
}

std::vector<json> preset_documents(const std::string& name, const PresetOptions& o) {
  std::vector<json> docs;
  const std::vector<std::string> all{"B1", "B2", "B3"};
  if (name == "example1") {
    auto b1 = scenario("b1_t7", "capacity", {"B1"}, deterministic(7.0), poisson_veh_h(100.0));
    auto hl = scenario("hl_4_34", "capacity", {"B2", "B3"}, discrete(4.0, 34.0), poisson_veh_h(100.0));
    b1["sweep"] = hl["sweep"] = sweep("q_veh_h", 10.0, 3000.0, 60, true);
    docs.push_back(b1);
    docs.push_back(hl);
    auto qb1 = scenario("queue_b1_t7", "queue", {"B1"}, deterministic(7.0), poisson_veh_h(60.0));
    auto qhl = scenario("queue_hl_4_34", "queue", {"B2", "B3"}, discrete(4.0, 34.0), poisson_veh_h(60.0));
    qb1["sweep"] = qhl["sweep"] = sweep("lambda_veh_h", 5.0, 480.0, 96, false);
    docs.push_back(qb1);
    docs.push_back(qhl);
  } else if (name == "example2") {
    const auto add = [&](const char* label, json law) {
      auto s = scenario(label, "capacity", {"B2"}, std::move(law), poisson_veh_h(100.0));
      s["sweep"] = sweep("q_veh_h", 10.0, 20000.0, 120, true);
      docs.push_back(s);
    };
    add("hl_6.22_14", discrete(6.22, 14.0));
    add("hl_3.11_42", discrete(3.11, 42.0));
    add("hl_7.71_0.57", discrete(7.71, 0.57));
    add("exp_7", {{"kind", "exponential"}, {"alpha_per_s", 1.0 / 7.0}});
    add("gamma_0.5", {{"kind", "gamma"}, {"shape", 0.5}, {"rate_per_s", 1.0 / 14.0}});
  } else if (name == "example3") {
    for (auto [alpha, delta, tag] : {std::tuple{0.9, 4.0, "a0.9_d4"}, std::tuple{0.6, 1.0, "a0.6_d1"}}) {
      const json policy = {{"kind", "geometric"}, {"alpha", alpha}, {"delta_s", delta}};
      auto b1 = scenario(std::string(tag) + "_b1_t7", "capacity", {"B1"}, deterministic(7.0), poisson_veh_h(100.0));
      auto hl = scenario(std::string(tag) + "_hl_6.22_14", "capacity", {"B2", "B3"}, discrete(6.22, 14.0),
                         poisson_veh_h(100.0));
      for (auto* s : {&b1, &hl}) {
        (*s)["impatience"] = policy;
        (*s)["sweep"] = sweep("q_veh_h", 10.0, 10000.0, 80, true);
        docs.push_back(*s);
      }
    }
  } else if (name == "example4") {
    for (auto [p, tag] : {std::pair{0.9, "p0.9"}, std::pair{0.1, "p0.1"}}) {
      auto m = scenario(std::string(tag) + "_mmpp", "mmpp-capacity", all, discrete(3.0, 60.0, p), example4_arrival());
      m["sweep"] = sweep("qbar_veh_h", 30.0, 900.0, 30, false);
      m["phases"] = {{"max", kFigurePhases}};
      auto c = scenario(std::string(tag) + "_poisson", "capacity", all, discrete(3.0, 60.0, p), poisson_veh_h(100.0));
      c["sweep"] = sweep("q_veh_h", 30.0, 900.0, 30, false);
      docs.push_back(m);
      docs.push_back(c);
    }
  } else if (name == "example5") {
    const json ex5_law = {{"kind", "discrete"}, {"atoms", {{56.0 / 9.0, 0.9}, {14.0, 0.1}}}};
    auto a = scenario("hl_6.22_14", "mmpp-capacity", all, ex5_law, example5_arrival());
    auto b = scenario("hl_3_60", "mmpp-capacity", all, discrete(3.0, 60.0), example5_arrival());
    a["sweep"] = b["sweep"] = sweep("platoon_mean_s", 0.25, 10.0, 40, false);
    a["phases"] = b["phases"] = {{"max", kFigurePhases}};
    docs.push_back(a);
    docs.push_back(b);
    if (o.naive) docs.push_back(scenario("hl_6.22_14", "naive", all, ex5_law, example5_arrival()));
  } else {
    throw InvalidArgument("unknown preset '" + name + "'");
  }
  return docs;
}

double rate_at(const std::vector<ResultRow>& rows, const std::string& quantity, const std::string& behavior) {
  for (const auto& r : rows) {
    if (r.quantity == quantity && r.behavior == behavior) return r.value;
  }
  throw Error("preset produced no row " + quantity + " for " + behavior);
}

void example1_anchors(PresetResult& out) {
  const auto report = queue_paradox(law_high_low(4.0, 34.0), veh_h_to_per_s(60.0), veh_h_to_per_s(60.0),
                                    veh_h_to_per_s(400.0));
  if (report.crossings.size() != 2) {
    out.anchors.push_back({"queue crossings at q=60", std::to_string(report.crossings.size()) + " crossings, expected 2", false});
  } else {
    out.anchors.push_back(check_near("lower queue crossing (veh/h)", per_s_to_veh_h(report.crossings[0]), 71.2, 1.0));
    out.anchors.push_back(check_near("upper queue crossing (veh/h)", per_s_to_veh_h(report.crossings[1]), 445.1, 1.0));
  }
  out.anchors.push_back(check_near("paradox threshold in q (veh/h)", per_s_to_veh_h(report.threshold), 124.6, 1.0));
}

std::function<double(double)> curve_veh_h(Behavior b, HeadwayDistribution law,
                                          ImpatiencePolicy policy = ImpatiencePolicy::none()) {
  return [b, law = std::move(law), policy = std::move(policy)](double q_veh_h) {
    return per_s_to_veh_h(capacity_impatient(b, law, policy, veh_h_to_per_s(q_veh_h)));
  };
}

void example2_anchors(PresetResult& out) {
  const auto p2 = find_stationary_points(curve_veh_h(Behavior::B2, law_high_low(3.11, 42.0)), 10.0, 20000.0);
  const auto p3 = find_stationary_points(curve_veh_h(Behavior::B2, law_high_low(7.71, 0.57)), 10.0, 20000.0);
  if (p2.size() != 1 || p2[0].kind != StationaryKind::Maximum) {
    out.anchors.push_back({"hl_3.11_42 interior maximum", "expected exactly one interior maximum", false});
  } else {
    out.anchors.push_back(check_near("hl_3.11_42 maximum at q (veh/h)", p2[0].q, 437.0, 10.0));
  }
  if (p3.size() != 2 || p3[0].kind != StationaryKind::Minimum || p3[1].kind != StationaryKind::Maximum) {
    out.anchors.push_back({"hl_7.71_0.57 minimum then maximum", "expected a minimum followed by a maximum", false});
  } else {
    out.anchors.push_back(check_near("hl_7.71_0.57 minimum at q (veh/h)", p3[0].q, 1965.0, 25.0));
    out.anchors.push_back(check_near("hl_7.71_0.57 maximum at q (veh/h)", p3[1].q, 6055.0, 60.0));
  }
  double worst = 0.0;
  for (const auto& r : out.rows) {
    if (r.quantity == "exp_7/capacity_veh_h") worst = std::max(worst, std::abs(r.value / (3600.0 / 7.0) - 1.0));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max relative deviation from 514.286 veh/h: %.2e", worst);
  out.anchors.push_back({"exp_7 flat capacity", buf, worst < 1e-9});
  bool increasing = true;
  double prev = -1.0;
  for (const auto& r : out.rows) {
    if (r.quantity != "gamma_0.5/capacity_veh_h") continue;
    increasing = increasing && r.value > prev;
    prev = r.value;
  }
  out.anchors.push_back({"gamma_0.5 capacity increasing in q", increasing ? "strictly increasing on the sweep" : "not monotone", increasing});
}

void example3_anchors(PresetResult& out) {
  const auto law = law_high_low(6.22, 14.0);
  const auto t7 = HeadwayDistribution::deterministic(7.0);
  const auto slow = ImpatiencePolicy::geometric(0.6, 1.0);
  for (Behavior b : kAllBehaviors) {
    const auto pts = find_stationary_points(curve_veh_h(b, b == Behavior::B1 ? t7 : law, slow), 10.0, 20000.0);
    const auto min = std::find_if(pts.begin(), pts.end(), [](const StationaryPoint& p) { return p.kind == StationaryKind::Minimum; });
    char buf[96];
    if (min != pts.end()) std::snprintf(buf, sizeof buf, "minimum at q = %.0f veh/h, increasing beyond", min->q);
    else std::snprintf(buf, sizeof buf, "no interior minimum");
    out.anchors.push_back({"a0.6_d1 " + std::string(to_string(b)) + " capacity rises past a threshold", buf, min != pts.end()});
  }
  // with alpha = 0.9, delta = 4 the ordering B2 >= B1 >= B3 fails somewhere
  const auto fast = ImpatiencePolicy::geometric(0.9, 4.0);
  std::size_t broken = 0;
  double first = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double q = 10.0 * std::pow(1000.0, i / 199.0);
    const double c1 = curve_veh_h(Behavior::B1, t7, fast)(q);
    const double c2 = curve_veh_h(Behavior::B2, law, fast)(q);
    const double c3 = curve_veh_h(Behavior::B3, law, fast)(q);
    if (!(c2 >= c1 && c1 >= c3)) {
      if (broken++ == 0) first = q;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu of 200 grid points out of order, first at q = %.0f veh/h", broken, first);
  out.anchors.push_back({"a0.9_d4 ordering no longer strict", buf, broken > 0});
}

void example4_anchors(PresetResult& out) {
  for (const char* tag : {"p0.9", "p0.1"}) {
    std::size_t checked = 0;
    std::size_t broken = 0;
    for (const auto& r : out.rows) {
      if (r.behavior != "B1" || r.quantity != std::string(tag) + "_mmpp/capacity_veh_h") continue;
      double c2 = -1.0;
      double c3 = -1.0;
      for (const auto& s : out.rows) {
        if (s.sweep_value != r.sweep_value || s.quantity != r.quantity) continue;
        if (s.behavior == "B2") c2 = s.value;
        if (s.behavior == "B3") c3 = s.value;
      }
      ++checked;
      if (!(c2 >= r.value && r.value >= c3)) ++broken;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu of %zu sweep points out of order", broken, checked);
    out.anchors.push_back({std::string(tag) + " platooned ordering B2 >= B1 >= B3", buf, broken == 0 && checked > 0});
  }
}

void example5_anchors(PresetResult& out, bool naive) {
  const auto law = law_example5();
  // long platoons at fixed mu1 / mu2 approach the first decomposition formula
  const auto slow = MmppSpec::two_state(veh_h_to_per_s(600.0), veh_h_to_per_s(2400.0), 2e-5, 1e-4);
  for (Behavior b : kAllBehaviors) {
    const double limit = capacity_mmpp(b, slow, law).value;
    const double v1 = naive_capacity(b, slow, law, 1).value;
    char buf[128];
    const double rel = std::abs(limit / v1 - 1.0);
    std::snprintf(buf, sizeof buf, "%.3f vs %.3f veh/h (%.3f%%)", per_s_to_veh_h(limit), per_s_to_veh_h(v1), 100 * rel);
    out.anchors.push_back({"long-platoon limit " + std::string(to_string(b)) + " within 1% of naive1", buf, rel < 0.01});
  }
  if (!naive) return;
  const double v1[] = {229.91, 250.65, 194.89};
  const double v2[] = {96.28, 130.74, 11.63};
  for (Behavior b : kAllBehaviors) {
    const auto i = static_cast<std::size_t>(b);
    const std::string name(to_string(b));
    out.anchors.push_back(check_near("naive1 " + name, rate_at(out.rows, "hl_6.22_14/naive1_capacity_veh_h", name), v1[i], 0.1));
    out.anchors.push_back(check_near("naive2 " + name, rate_at(out.rows, "hl_6.22_14/naive2_capacity_veh_h", name), v2[i], 0.1));
  }
}

}  // namespace

std::vector<Scenario> preset_scenarios(const std::string& name, const PresetOptions& options) {
  std::vector<Scenario> out;
  for (auto& doc : preset_documents(name, options)) {
    if (options.overrides.quick && doc.contains("sweep")) {
      auto& points = doc["sweep"]["points"];
      points = std::max<std::size_t>(2, points.get<std::size_t>() / 4);
    }
    auto s = parse_scenario(doc);
    apply_overrides(s, options.overrides);
    out.push_back(std::move(s));
  }
  return out;
}

PresetResult run_preset(const std::string& name, const PresetOptions& options) {
  PresetResult out;
  RunOptions run;
  run.threads = options.threads;
  out.rows = run_scenarios(preset_scenarios(name, options), run);
  if (name == "example1") example1_anchors(out);
  else if (name == "example2") example2_anchors(out);
  else if (name == "example3") example3_anchors(out);
  else if (name == "example4") example4_anchors(out);
  else if (name == "example5") example5_anchors(out, options.naive);
  return out;
}

}  // namespace gapcap::cli
