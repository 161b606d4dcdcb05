#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gapcap/distributions.hpp>
#include <gapcap/errors.hpp>
#include <gapcap/impatience.hpp>
#include <gapcap/mmpp.hpp>
#include <gapcap/poisson_core.hpp>

#include "json.hpp"

namespace gapcap::cli {

/// Bad scenario input; the message starts with the offending field path.
class ScenarioError : public Error {
 public:
  ScenarioError(const std::string& path, const std::string& message)
      : Error(path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

enum class Analysis { Capacity, Queue, MmppCapacity, Naive, Simulate };

std::string to_string(Analysis a);

enum class SweepParameter { MajorRate, AverageRate, PlatoonMean, MinorRate, Alpha, Delta };

struct Sweep {
  SweepParameter parameter = SweepParameter::MajorRate;
  std::string name;     ///< as written, e.g. "q_veh_h"
  double unit = 1.0;    ///< multiply a sweep value by this to get seconds / per-second
  double from = 0.0;
  double to = 0.0;
  std::size_t points = 1;
  bool log = false;

  std::vector<double> values() const;
};

struct SimulationSettings {
  std::size_t crossings = 1'000'000;
  std::size_t replications = 10;
  std::uint64_t seed = 1;
  bool replication_log = false;
};

/// Arrival literal: Poisson lanes or an MMPP. Rates are held per second.
struct ArrivalSpec {
  bool markov = false;
  std::vector<double> lanes;            ///< Poisson lanes
  std::vector<double> rates;            ///< MMPP per-state rates
  std::vector<std::vector<double>> transitions;  ///< MMPP rates per second, diagonal optional

  MmppSpec mmpp() const;
  double total_poisson_rate() const;
};

struct Scenario {
  std::string label;
  Analysis analysis = Analysis::Capacity;
  std::vector<Behavior> behaviors{Behavior::B1, Behavior::B2, Behavior::B3};
  HeadwayDistribution headway = HeadwayDistribution::deterministic(7.0);
  ImpatiencePolicy impatience = ImpatiencePolicy::none();
  ArrivalSpec arrival;
  std::optional<double> minor_rate;  ///< per second
  std::optional<Sweep> sweep;
  bool per_second_output = false;    ///< units "per_s" instead of "veh_h"
  std::optional<double> tolerance;
  std::size_t initial_phases = 64;
  std::size_t max_phases = 4096;
  SimulationSettings simulation;
};

/// Parses and validates; throws ScenarioError naming the field path.
Scenario parse_scenario(const nlohmann::json& doc, const std::string& root = "scenario");

/// A file holds one scenario object or {"scenarios": [...]} with distinct labels.
std::vector<Scenario> parse_scenario_file(const nlohmann::json& doc);
std::vector<Scenario> load_scenarios(const std::string& path);

/// Normalized form; parse_scenario(to_json(s)) reproduces s exactly.
nlohmann::json to_json(const Scenario& s);
nlohmann::json to_json(const std::vector<Scenario>& set);

nlohmann::json headway_to_json(const HeadwayDistribution& d);
HeadwayDistribution headway_from_json(const nlohmann::json& j, const std::string& path);

/// The scenario with one sweep value applied (and the sweep removed).
Scenario at_sweep_value(const Scenario& s, double value);

}  // namespace gapcap::cli
