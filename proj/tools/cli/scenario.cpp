#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <gapcap/units.hpp>

namespace gapcap::cli {

using nlohmann::json;

std::string to_string(Analysis a) {
  switch (a) {
    case Analysis::Capacity: return "capacity";
    case Analysis::Queue: return "queue";
    case Analysis::MmppCapacity: return "mmpp-capacity";
    case Analysis::Naive: return "naive";
    case Analysis::Simulate: return "simulate";
  }
  return "?";
}

std::vector<double> Sweep::values() const {
  std::vector<double> out;
  if (points == 1) return {from};
  for (std::size_t i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(points - 1);
    if (i + 1 == points) {
      out.push_back(to);
    } else if (log) {
      out.push_back(std::exp(std::log(from) + f * (std::log(to) - std::log(from))));
    } else {
      out.push_back(from + f * (to - from));
    }
  }
  return out;
}

MmppSpec ArrivalSpec::mmpp() const {
  const std::size_t d = rates.size();
  numerics::Matrix g(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) g(i, j) = transitions[i][j];
  }
  return MmppSpec(std::move(g), rates);
}

double ArrivalSpec::total_poisson_rate() const {
  double total = 0.0;
  for (double q : lanes) total += q;
  return total;
}

namespace {

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ScenarioError(path, "expected an object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
    if (!known) throw ScenarioError(path + "." + item.key(), "unknown field");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ScenarioError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ScenarioError(path, "expected a finite number");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) throw ScenarioError(path, "must be > 0");
  return v;
}

double non_negative(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v >= 0.0)) throw ScenarioError(path, "must be >= 0");
  return v;
}

std::uint64_t count(const json& j, const std::string& path, std::uint64_t min_value) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) throw ScenarioError(path, "expected an integer");
  if (j.is_number_integer() && j.get<std::int64_t>() < 0) throw ScenarioError(path, "must be >= 0");
  const auto v = j.get<std::uint64_t>();
  if (v < min_value) throw ScenarioError(path, "must be >= " + std::to_string(min_value));
  return v;
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw ScenarioError(path + "." + key, "required field is missing");
  return obj.at(key);
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ScenarioError(path, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(non_negative(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// value with a `_veh_h` or `_per_s` suffix, converted to per second
std::optional<double> rate_field(const json& obj, const std::string& stem, const std::string& path) {
  const std::string vh = stem + "_veh_h";
  const std::string ps = stem + "_per_s";
  if (obj.contains(vh) && obj.contains(ps)) throw ScenarioError(path + "." + stem, "give either " + vh + " or " + ps);
  if (obj.contains(vh)) return veh_h_to_per_s(non_negative(obj.at(vh), path + "." + vh));
  if (obj.contains(ps)) return non_negative(obj.at(ps), path + "." + ps);
  return std::nullopt;
}

std::optional<std::vector<double>> rate_list(const json& obj, const std::string& stem, const std::string& path) {
  const std::string vh = stem + "_veh_h";
  const std::string ps = stem + "_per_s";
  if (obj.contains(vh) && obj.contains(ps)) throw ScenarioError(path + "." + stem, "give either " + vh + " or " + ps);
  if (obj.contains(vh)) {
    auto v = number_list(obj.at(vh), path + "." + vh);
    for (double& x : v) x = veh_h_to_per_s(x);
    return v;
  }
  if (obj.contains(ps)) return number_list(obj.at(ps), path + "." + ps);
  return std::nullopt;
}

ImpatiencePolicy impatience_from_json(const json& j, const std::string& path) {
  check_keys(j, path, {"kind", "alpha", "delta_s", "maps"});
  const auto& kind = field(j, "kind", path);
  if (!kind.is_string()) throw ScenarioError(path + ".kind", "expected a string");
  const auto k = kind.get<std::string>();
  try {
    if (k == "none") return ImpatiencePolicy::none();
    if (k == "geometric") {
      return ImpatiencePolicy::geometric(number(field(j, "alpha", path), path + ".alpha"),
                                         number(field(j, "delta_s", path), path + ".delta_s"));
    }
    if (k == "explicit") {
      const auto& maps = field(j, "maps", path);
      if (!maps.is_array()) throw ScenarioError(path + ".maps", "expected an array of [scale, shift] pairs");
      std::vector<AffineMap> out;
      for (std::size_t i = 0; i < maps.size(); ++i) {
        const std::string p = path + ".maps[" + std::to_string(i) + "]";
        if (!maps[i].is_array() || maps[i].size() != 2) throw ScenarioError(p, "expected [scale, shift]");
        out.push_back({number(maps[i][0], p + "[0]"), number(maps[i][1], p + "[1]")});
      }
      return ImpatiencePolicy::explicit_maps(std::move(out));
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioError(path, e.what());
  }
  throw ScenarioError(path + ".kind", "unknown impatience kind '" + k + "'");
}

json impatience_to_json(const ImpatiencePolicy& p) {
  switch (p.kind()) {
    case ImpatiencePolicy::Kind::None: return {{"kind", "none"}};
    case ImpatiencePolicy::Kind::Geometric: return {{"kind", "geometric"}, {"alpha", p.alpha()}, {"delta_s", p.delta()}};
    case ImpatiencePolicy::Kind::Explicit: {
      json maps = json::array();
      for (const auto& m : p.maps()) maps.push_back({m.scale, m.shift});
      return {{"kind", "explicit"}, {"maps", maps}};
    }
  }
  return {};
}

ArrivalSpec arrival_from_json(const json& j, const std::string& path) {
  check_keys(j, path, {"poisson", "mmpp"});
  if (j.contains("poisson") == j.contains("mmpp")) {
    throw ScenarioError(path, "give exactly one of 'poisson' or 'mmpp'");
  }
  ArrivalSpec a;
  if (j.contains("poisson")) {
    const std::string p = path + ".poisson";
    const auto& obj = j.at("poisson");
    check_keys(obj, p, {"rate_veh_h", "rate_per_s", "lanes_veh_h", "lanes_per_s"});
    const auto single = rate_field(obj, "rate", p);
    const auto lanes = rate_list(obj, "lanes", p);
    if (single.has_value() == lanes.has_value()) throw ScenarioError(p, "give either a rate or a list of lanes");
    a.lanes = single ? std::vector<double>{*single} : *lanes;
    return a;
  }
  const std::string p = path + ".mmpp";
  const auto& obj = j.at("mmpp");
  check_keys(obj, p, {"rates_veh_h", "rates_per_s", "transitions_per_s"});
  const auto rates = rate_list(obj, "rates", p);
  if (!rates) throw ScenarioError(p + ".rates_veh_h", "required field is missing");
  a.markov = true;
  a.rates = *rates;
  const auto& t = field(obj, "transitions_per_s", p);
  const std::string tp = p + ".transitions_per_s";
  if (!t.is_array() || t.size() != a.rates.size()) throw ScenarioError(tp, "expected a d x d array matching the rates");
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::string rp = tp + "[" + std::to_string(i) + "]";
    if (!t[i].is_array() || t[i].size() != a.rates.size()) throw ScenarioError(rp, "expected a row of length d");
    std::vector<double> row;
    for (std::size_t k = 0; k < t[i].size(); ++k) {
      const std::string ep = rp + "[" + std::to_string(k) + "]";
      row.push_back(k == i ? number(t[i][k], ep) : non_negative(t[i][k], ep));
    }
    a.transitions.push_back(std::move(row));
  }
  try {
    (void)a.mmpp();
  } catch (const Error& e) {
    throw ScenarioError(p, e.what());
  }
  return a;
}

json arrival_to_json(const ArrivalSpec& a) {
  if (!a.markov) return {{"poisson", {{"lanes_per_s", a.lanes}}}};
  return {{"mmpp", {{"rates_per_s", a.rates}, {"transitions_per_s", a.transitions}}}};
}

Sweep sweep_from_json(const json& j, const std::string& path) {
  check_keys(j, path, {"parameter", "from", "to", "points", "spacing"});
  Sweep s;
  const auto& name = field(j, "parameter", path);
  if (!name.is_string()) throw ScenarioError(path + ".parameter", "expected a string");
  s.name = name.get<std::string>();
  struct Entry {
    const char* name;
    SweepParameter parameter;
    double unit;
  };
  static const Entry kEntries[] = {
      {"q_veh_h", SweepParameter::MajorRate, 1.0 / kSecondsPerHour},
      {"q_per_s", SweepParameter::MajorRate, 1.0},
      {"qbar_veh_h", SweepParameter::AverageRate, 1.0 / kSecondsPerHour},
      {"qbar_per_s", SweepParameter::AverageRate, 1.0},
      {"platoon_mean_s", SweepParameter::PlatoonMean, 1.0},
      {"lambda_veh_h", SweepParameter::MinorRate, 1.0 / kSecondsPerHour},
      {"lambda_per_s", SweepParameter::MinorRate, 1.0},
      {"alpha", SweepParameter::Alpha, 1.0},
      {"delta_s", SweepParameter::Delta, 1.0},
  };
  const auto* hit = std::find_if(std::begin(kEntries), std::end(kEntries), [&](const Entry& e) { return s.name == e.name; });
  if (hit == std::end(kEntries)) throw ScenarioError(path + ".parameter", "unknown sweep parameter '" + s.name + "'");
  s.parameter = hit->parameter;
  s.unit = hit->unit;
  s.from = positive(field(j, "from", path), path + ".from");
  s.to = j.contains("to") ? positive(j.at("to"), path + ".to") : s.from;
  if (s.to < s.from) throw ScenarioError(path + ".to", "must be >= from");
  s.points = j.contains("points") ? count(j.at("points"), path + ".points", 1) : 1;
  if (j.contains("spacing")) {
    const auto& sp = j.at("spacing");
    if (!sp.is_string() || (sp != "linear" && sp != "log")) throw ScenarioError(path + ".spacing", "expected 'linear' or 'log'");
    s.log = sp == "log";
  }
  if (s.parameter == SweepParameter::Alpha && s.to > 1.0) throw ScenarioError(path + ".to", "alpha must stay <= 1");
  return s;
}

json sweep_to_json(const Sweep& s) {
  return {{"parameter", s.name}, {"from", s.from}, {"to", s.to}, {"points", s.points}, {"spacing", s.log ? "log" : "linear"}};
}

void check_compatibility(const Scenario& s, const std::string& root) {
  const bool markov = s.arrival.markov;
  const bool has_lambda = s.minor_rate.has_value() || (s.sweep && s.sweep->parameter == SweepParameter::MinorRate);
  switch (s.analysis) {
    case Analysis::Capacity:
    case Analysis::Queue:
      if (markov) {
        throw ScenarioError(root + ".arrival", "analysis '" + to_string(s.analysis) +
                                                    "' needs Poisson arrivals; use mmpp-capacity or simulate");
      }
      if (s.analysis == Analysis::Queue && !has_lambda) {
        throw ScenarioError(root + ".minor_rate_veh_h", "queue analysis needs a minor-road rate");
      }
      break;
    case Analysis::MmppCapacity:
    case Analysis::Naive:
      if (!markov) throw ScenarioError(root + ".arrival", "analysis '" + to_string(s.analysis) + "' needs an mmpp arrival");
      if (!s.headway.is_atomic()) {
        throw ScenarioError(root + ".headway", "Markov platooning needs a deterministic or discrete law");
      }
      if (s.impatience.kind() != ImpatiencePolicy::Kind::None) {
        throw ScenarioError(root + ".impatience", "impatience is not supported together with Markov platooning");
      }
      break;
    case Analysis::Simulate:
      break;
  }
  if (!s.sweep) return;
  const std::string p = root + ".sweep.parameter";
  switch (s.sweep->parameter) {
    case SweepParameter::MajorRate:
      if (markov) throw ScenarioError(p, "use qbar_* to sweep an mmpp arrival");
      break;
    case SweepParameter::AverageRate:
      break;
    case SweepParameter::PlatoonMean:
      if (!markov) throw ScenarioError(p, "platoon_mean_s needs an mmpp arrival");
      break;
    case SweepParameter::MinorRate:
      if (s.analysis != Analysis::Queue && s.analysis != Analysis::Simulate) {
        throw ScenarioError(p, "lambda sweeps need the queue or simulate analysis");
      }
      break;
    case SweepParameter::Alpha:
    case SweepParameter::Delta:
      if (s.impatience.kind() != ImpatiencePolicy::Kind::Geometric) {
        throw ScenarioError(p, "alpha and delta_s sweeps need a geometric impatience policy");
      }
      break;
  }
}

}  // namespace

HeadwayDistribution headway_from_json(const json& j, const std::string& path) {
  check_keys(j, path, {"kind", "seconds", "atoms", "alpha_per_s", "shape", "rate_per_s"});
  const auto& kind = field(j, "kind", path);
  if (!kind.is_string()) throw ScenarioError(path + ".kind", "expected a string");
  const auto k = kind.get<std::string>();
  try {
    if (k == "deterministic") return HeadwayDistribution::deterministic(positive(field(j, "seconds", path), path + ".seconds"));
    if (k == "discrete") {
      const auto& atoms = field(j, "atoms", path);
      if (!atoms.is_array() || atoms.empty()) throw ScenarioError(path + ".atoms", "expected a non-empty array of [seconds, probability]");
      std::vector<Atom> out;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string p = path + ".atoms[" + std::to_string(i) + "]";
        if (!atoms[i].is_array() || atoms[i].size() != 2) throw ScenarioError(p, "expected [seconds, probability]");
        out.push_back({positive(atoms[i][0], p + "[0]"), non_negative(atoms[i][1], p + "[1]")});
      }
      return HeadwayDistribution::discrete(std::move(out));
    }
    if (k == "exponential") return HeadwayDistribution::exponential(positive(field(j, "alpha_per_s", path), path + ".alpha_per_s"));
    if (k == "gamma") {
      return HeadwayDistribution::gamma(positive(field(j, "shape", path), path + ".shape"),
                                        positive(field(j, "rate_per_s", path), path + ".rate_per_s"));
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioError(path, e.what());
  }
  throw ScenarioError(path + ".kind", "unknown headway kind '" + k + "'");
}

json headway_to_json(const HeadwayDistribution& d) {
  switch (d.kind()) {
    case HeadwayDistribution::Kind::Deterministic: return {{"kind", "deterministic"}, {"seconds", d.atoms()[0].value}};
    case HeadwayDistribution::Kind::Discrete: {
      json atoms = json::array();
      for (const auto& a : d.atoms()) atoms.push_back({a.value, a.probability});
      return {{"kind", "discrete"}, {"atoms", atoms}};
    }
    case HeadwayDistribution::Kind::Exponential: return {{"kind", "exponential"}, {"alpha_per_s", d.rate()}};
    case HeadwayDistribution::Kind::Gamma: return {{"kind", "gamma"}, {"shape", d.shape()}, {"rate_per_s", d.rate()}};
  }
  return {};
}

Scenario parse_scenario(const json& doc, const std::string& root) {
  check_keys(doc, root,
             {"label", "analysis", "behaviors", "headway", "impatience", "arrival", "minor_rate_veh_h",
              "minor_rate_per_s", "sweep", "units", "tolerance", "phases", "simulation"});
  Scenario s;
  if (doc.contains("label")) {
    if (!doc.at("label").is_string()) throw ScenarioError(root + ".label", "expected a string");
    s.label = doc.at("label").get<std::string>();
  }
  const auto& analysis = field(doc, "analysis", root);
  if (!analysis.is_string()) throw ScenarioError(root + ".analysis", "expected a string");
  const auto a = analysis.get<std::string>();
  if (a == "capacity") s.analysis = Analysis::Capacity;
  else if (a == "queue") s.analysis = Analysis::Queue;
  else if (a == "mmpp-capacity") s.analysis = Analysis::MmppCapacity;
  else if (a == "naive") s.analysis = Analysis::Naive;
  else if (a == "simulate") s.analysis = Analysis::Simulate;
  else throw ScenarioError(root + ".analysis", "unknown analysis '" + a + "'");

  if (doc.contains("behaviors")) {
    const auto& b = doc.at("behaviors");
    if (!b.is_array() || b.empty()) throw ScenarioError(root + ".behaviors", "expected a non-empty array");
    s.behaviors.clear();
    std::set<Behavior> seen;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::string p = root + ".behaviors[" + std::to_string(i) + "]";
      if (!b[i].is_string()) throw ScenarioError(p, "expected \"B1\", \"B2\" or \"B3\"");
      const auto parsed = parse_behavior(b[i].get<std::string>());
      if (!parsed) throw ScenarioError(p, "expected \"B1\", \"B2\" or \"B3\"");
      if (!seen.insert(*parsed).second) throw ScenarioError(p, "duplicate behaviour");
      s.behaviors.push_back(*parsed);
    }
    std::sort(s.behaviors.begin(), s.behaviors.end());
  }
  s.headway = headway_from_json(field(doc, "headway", root), root + ".headway");
  if (doc.contains("impatience")) s.impatience = impatience_from_json(doc.at("impatience"), root + ".impatience");
  s.arrival = arrival_from_json(field(doc, "arrival", root), root + ".arrival");
  s.minor_rate = rate_field(doc, "minor_rate", root);
  if (doc.contains("sweep")) s.sweep = sweep_from_json(doc.at("sweep"), root + ".sweep");
  if (doc.contains("units")) {
    const auto& u = doc.at("units");
    if (!u.is_string() || (u != "veh_h" && u != "per_s")) throw ScenarioError(root + ".units", "expected 'veh_h' or 'per_s'");
    s.per_second_output = u == "per_s";
  }
  if (doc.contains("tolerance")) s.tolerance = positive(doc.at("tolerance"), root + ".tolerance");
  if (doc.contains("phases")) {
    const std::string p = root + ".phases";
    const auto& ph = doc.at("phases");
    check_keys(ph, p, {"initial", "max"});
    if (ph.contains("initial")) s.initial_phases = count(ph.at("initial"), p + ".initial", 1);
    if (ph.contains("max")) s.max_phases = count(ph.at("max"), p + ".max", 1);
    if (s.max_phases < s.initial_phases) throw ScenarioError(p + ".max", "must be >= initial");
  }
  if (doc.contains("simulation")) {
    const std::string p = root + ".simulation";
    const auto& sim = doc.at("simulation");
    check_keys(sim, p, {"crossings", "replications", "seed", "replication_log"});
    if (sim.contains("crossings")) s.simulation.crossings = count(sim.at("crossings"), p + ".crossings", 100);
    if (sim.contains("replications")) s.simulation.replications = count(sim.at("replications"), p + ".replications", 1);
    if (sim.contains("seed")) s.simulation.seed = count(sim.at("seed"), p + ".seed", 0);
    if (sim.contains("replication_log")) {
      if (!sim.at("replication_log").is_boolean()) throw ScenarioError(p + ".replication_log", "expected true or false");
      s.simulation.replication_log = sim.at("replication_log").get<bool>();
    }
  }
  check_compatibility(s, root);
  return s;
}

std::vector<Scenario> parse_scenario_file(const json& doc) {
  if (!doc.is_object() || !doc.contains("scenarios")) return {parse_scenario(doc)};
  check_keys(doc, "scenario", {"scenarios"});
  const auto& list = doc.at("scenarios");
  if (!list.is_array() || list.empty()) throw ScenarioError("scenario.scenarios", "expected a non-empty array");
  std::vector<Scenario> out;
  std::set<std::string> labels;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "scenario.scenarios[" + std::to_string(i) + "]";
    out.push_back(parse_scenario(list[i], path));
    if (list.size() > 1 && out.back().label.empty()) throw ScenarioError(path + ".label", "required when a file holds several scenarios");
    if (!labels.insert(out.back().label).second) throw ScenarioError(path + ".label", "duplicate label");
  }
  return out;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path, "cannot open scenario file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError(path, std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario_file(doc);
}

json to_json(const Scenario& s) {
  json j;
  if (!s.label.empty()) j["label"] = s.label;
  j["analysis"] = to_string(s.analysis);
  j["behaviors"] = json::array();
  for (auto b : s.behaviors) j["behaviors"].push_back(std::string(to_string(b)));
  j["headway"] = headway_to_json(s.headway);
  j["impatience"] = impatience_to_json(s.impatience);
  j["arrival"] = arrival_to_json(s.arrival);
  if (s.minor_rate) j["minor_rate_per_s"] = *s.minor_rate;
  if (s.sweep) j["sweep"] = sweep_to_json(*s.sweep);
  j["units"] = s.per_second_output ? "per_s" : "veh_h";
  if (s.tolerance) j["tolerance"] = *s.tolerance;
  j["phases"] = {{"initial", s.initial_phases}, {"max", s.max_phases}};
  j["simulation"] = {{"crossings", s.simulation.crossings},
                     {"replications", s.simulation.replications},
                     {"seed", s.simulation.seed},
                     {"replication_log", s.simulation.replication_log}};
  return j;
}

json to_json(const std::vector<Scenario>& set) {
  if (set.size() == 1) return to_json(set.front());
  json list = json::array();
  for (const auto& s : set) list.push_back(to_json(s));
  return {{"scenarios", list}};
}

Scenario at_sweep_value(const Scenario& s, double value) {
  if (!s.sweep) return s;
  Scenario out = s;
  out.sweep.reset();
  const double v = value * s.sweep->unit;
  switch (s.sweep->parameter) {
    case SweepParameter::MajorRate:
    case SweepParameter::AverageRate:
      if (out.arrival.markov) {
        const double avg = average_rate(out.arrival.mmpp());
        if (!(avg > 0.0)) throw ScenarioError("scenario.arrival.mmpp", "cannot rescale an mmpp with zero average rate");
        for (double& q : out.arrival.rates) q *= v / avg;
      } else {
        const double total = out.arrival.total_poisson_rate();
        for (double& q : out.arrival.lanes) {
          q = total > 0.0 ? q * v / total : v / static_cast<double>(out.arrival.lanes.size());
        }
      }
      break;
    case SweepParameter::PlatoonMean: {
      const auto& rates = out.arrival.rates;
      const auto busiest = static_cast<std::size_t>(std::max_element(rates.begin(), rates.end()) - rates.begin());
      const double mu = out.arrival.mmpp().leave_rate(busiest);
      if (!(mu > 0.0)) throw ScenarioError("scenario.arrival.mmpp", "the busiest state never ends; cannot set a platoon length");
      const double factor = (1.0 / v) / mu;
      for (auto& row : out.arrival.transitions) {
        for (double& r : row) r *= factor;
      }
      break;
    }
    case SweepParameter::MinorRate:
      out.minor_rate = v;
      break;
    case SweepParameter::Alpha:
      out.impatience = ImpatiencePolicy::geometric(v, s.impatience.delta());
      break;
    case SweepParameter::Delta:
      out.impatience = ImpatiencePolicy::geometric(s.impatience.alpha(), v);
      break;
  }
  return out;
}

}  // namespace gapcap::cli
