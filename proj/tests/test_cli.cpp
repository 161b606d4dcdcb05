#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "experiments.hpp"
#include "presets.hpp"
#include "runner.hpp"
#include "scenario.hpp"

namespace {

using gapcap::cli::Scenario;
using gapcap::cli::ScenarioError;
using nlohmann::json;

json base_doc() {
  return json::parse(R"({
    "analysis": "capacity",
    "headway": {"kind": "discrete", "atoms": [[6.22, 0.9], [14, 0.1]]},
    "arrival": {"poisson": {"rate_veh_h": 600}}
  })");
}

std::string error_path(const json& doc) {
  try {
    gapcap::cli::parse_scenario(doc);
  } catch (const ScenarioError& e) {
    return e.path();
  }
  return "<no error>";
}

TEST(ScenarioParse, Defaults) {
  const auto s = gapcap::cli::parse_scenario(base_doc());
  EXPECT_EQ(s.behaviors.size(), 3u);
  EXPECT_EQ(s.arrival.lanes.size(), 1u);
  EXPECT_DOUBLE_EQ(s.arrival.total_poisson_rate(), 600.0 / 3600.0);
  EXPECT_EQ(s.initial_phases, 64u);
  EXPECT_EQ(s.max_phases, 4096u);
  EXPECT_FALSE(s.sweep.has_value());
}

TEST(ScenarioParse, ErrorsNameTheField) {
  auto d = base_doc();
  d["colour"] = "red";
  EXPECT_EQ(error_path(d), "scenario.colour");

  d = base_doc();
  d["headway"]["atoms"][0][1] = 0.5;
  EXPECT_EQ(error_path(d), "scenario.headway");

  d = base_doc();
  d.erase("arrival");
  EXPECT_EQ(error_path(d), "scenario.arrival");

  d = base_doc();
  d["arrival"]["poisson"]["rate_per_s"] = 0.1;
  EXPECT_EQ(error_path(d), "scenario.arrival.poisson.rate");

  d = base_doc();
  d["analysis"] = "queue";
  EXPECT_EQ(error_path(d), "scenario.minor_rate_veh_h");

  d = base_doc();
  d["analysis"] = "mmpp-capacity";
  EXPECT_EQ(error_path(d), "scenario.arrival");

  d = base_doc();
  d["sweep"] = {{"parameter", "q_veh_h"}, {"from", 100}, {"to", 50}};
  EXPECT_EQ(error_path(d), "scenario.sweep.to");

  d = base_doc();
  d["sweep"] = {{"parameter", "platoon_mean_s"}, {"from", 1}, {"to", 5}};
  EXPECT_EQ(error_path(d), "scenario.sweep.parameter");

  d = base_doc();
  d["impatience"] = {{"kind", "geometric"}, {"alpha", 1.5}, {"delta_s", 1}};
  EXPECT_EQ(error_path(d), "scenario.impatience");
}

TEST(ScenarioParse, MultiScenarioFilesNeedDistinctLabels) {
  json a = base_doc(), b = base_doc();
  a["label"] = "x";
  b["label"] = "x";
  EXPECT_THROW(gapcap::cli::parse_scenario_file(json{{"scenarios", {a, b}}}), ScenarioError);
  b["label"] = "y";
  EXPECT_EQ(gapcap::cli::parse_scenario_file(json{{"scenarios", {a, b}}}).size(), 2u);
}

TEST(ScenarioParse, BundledFilesRoundTrip) {
  std::size_t seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(GAPCAP_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    const auto set = gapcap::cli::load_scenarios(entry.path().string());
    const json dumped = gapcap::cli::to_json(set);
    const auto again = gapcap::cli::parse_scenario_file(dumped);
    EXPECT_EQ(gapcap::cli::to_json(again), dumped) << entry.path();
  }
  EXPECT_GE(seen, 5u);
}

TEST(Sweep, ValuesAndApplication) {
  auto d = base_doc();
  d["sweep"] = {{"parameter", "q_veh_h"}, {"from", 10}, {"to", 1000}, {"points", 3}, {"spacing", "log"}};
  const auto s = gapcap::cli::parse_scenario(d);
  const auto v = s.sweep->values();
  ASSERT_EQ(v.size(), 3u);
  EXPECT_NEAR(v[1], 100.0, 1e-9);
  const auto at = gapcap::cli::at_sweep_value(s, 360.0);
  EXPECT_FALSE(at.sweep.has_value());
  EXPECT_NEAR(at.arrival.total_poisson_rate(), 0.1, 1e-15);
}

TEST(Sweep, PlatoonMeanScalesTheGenerator) {
  const auto s = gapcap::cli::parse_scenario(json::parse(R"({
    "analysis": "mmpp-capacity",
    "headway": {"kind": "deterministic", "seconds": 7},
    "arrival": {"mmpp": {"rates_veh_h": [600, 2400], "transitions_per_s": [[0, 0.02], [0.1, 0]]}},
    "sweep": {"parameter": "platoon_mean_s", "from": 1, "to": 10, "points": 4}
  })"));
  const auto at = gapcap::cli::at_sweep_value(s, 2.0);
  const auto m = at.arrival.mmpp();
  EXPECT_NEAR(1.0 / m.leave_rate(1), 2.0, 1e-12);
  EXPECT_NEAR(m.leave_rate(0) / m.leave_rate(1), 0.2, 1e-12);
}

TEST(Csv, FormatAndOrder) {
  EXPECT_EQ(gapcap::cli::format_number(0.1), "0.1");
  EXPECT_EQ(gapcap::cli::format_number(INFINITY), "inf");
  EXPECT_EQ(gapcap::cli::format_number(NAN), "");
  EXPECT_EQ(gapcap::cli::csv_header(),
            "sweep_value,behavior,quantity,value,diag_flag,diag_error,diag_count,diag_residual,diag_ci_low,"
            "diag_ci_high");
  gapcap::cli::ResultRow r;
  r.behavior = "B2";
  r.quantity = "capacity_veh_h";
  r.value = 123.5;
  r.count = 7;
  EXPECT_EQ(gapcap::cli::csv_line(r), ",B2,capacity_veh_h,123.5,,,7,,,");
}

TEST(Runner, OneRowPerBehaviourAtASinglePoint) {
  const auto rows = gapcap::cli::run_scenario(gapcap::cli::parse_scenario(base_doc()));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].behavior, "B1");
  EXPECT_EQ(rows[2].behavior, "B3");
  const auto law = gapcap::HeadwayDistribution::discrete({{6.22, 0.9}, {14.0, 0.1}});
  EXPECT_NEAR(rows[1].value, 3600.0 * gapcap::capacity(gapcap::Behavior::B2, law, 600.0 / 3600.0), 1e-9);
}

TEST(Runner, SweepRowsAreSortedAndThreadCountFree) {
  auto d = base_doc();
  d["sweep"] = {{"parameter", "q_veh_h"}, {"from", 10}, {"to", 2000}, {"points", 17}};
  const auto s = gapcap::cli::parse_scenario(d);
  const auto one = gapcap::cli::run_scenario(s, {1, nullptr});
  const auto many = gapcap::cli::run_scenario(s, {4, nullptr});
  ASSERT_EQ(one.size(), 51u);
  std::ostringstream a, b;
  gapcap::cli::write_csv(a, one);
  gapcap::cli::write_csv(b, many);
  EXPECT_EQ(a.str(), b.str());
  for (std::size_t i = 1; i < one.size(); ++i) EXPECT_LE(*one[i - 1].sweep_value, *one[i].sweep_value);
}

TEST(Runner, DivergenceIsARowNotAnError) {
  auto d = base_doc();
  d["headway"] = {{"kind", "exponential"}, {"alpha_per_s", 0.1}};
  d["behaviors"] = {"B3"};
  const auto rows = gapcap::cli::run_scenario(gapcap::cli::parse_scenario(d));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].value, 0.0);
  EXPECT_EQ(rows[0].flag, "infinite_mgf");
}

TEST(Experiments, QueueParadoxAtSixtyVehiclesPerHour) {
  const auto rep = gapcap::cli::queue_paradox(gapcap::cli::law_high_low(4.0, 34.0), 60.0 / 3600.0, 10.0 / 3600.0,
                                              3000.0 / 3600.0);
  EXPECT_EQ(rep.crossings.size(), 2u);
  EXPECT_GT(rep.threshold, 60.0 / 3600.0);
}

TEST(Presets, QuickRunsPassTheirAnchors) {
  gapcap::cli::PresetOptions o;
  o.overrides.quick = true;
  o.naive = true;
  for (const auto& name : gapcap::cli::preset_names()) {
    const auto r = gapcap::cli::run_preset(name, o);
    EXPECT_FALSE(r.rows.empty()) << name;
    for (const auto& a : r.anchors) EXPECT_TRUE(a.passed) << name << ": " << a.name << " " << a.detail;
  }
  EXPECT_THROW(gapcap::cli::preset_scenarios("example9", o), gapcap::InvalidArgument);
}

}  // namespace
