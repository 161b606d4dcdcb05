#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"

#include "acceptance.hpp"
#include "presets.hpp"
#include "runner.hpp"
#include "scenario.hpp"

namespace {

using namespace gapcap::cli;

struct Flags {
  std::string out;
  std::uint64_t seed = 0;
  std::size_t replications = 0;
  double tol = 0.0;
  bool quick = false;
  bool dump_config = false;
  std::size_t threads = 0;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--out", f.out, "Write results to this file instead of standard output");
  cmd->add_option("--seed", f.seed, "Master seed for simulations");
  cmd->add_option("--replications", f.replications, "Simulation replications")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", f.tol, "Convergence tolerance (phase doubling, impatience series)")->check(CLI::PositiveNumber);
  cmd->add_flag("--quick", f.quick, "Shorter simulations and sparser sweeps");
  cmd->add_flag("--dump-config", f.dump_config, "Print the normalized scenario and exit");
  cmd->add_option("--threads", f.threads, "Worker threads (0: all cores)");
}

RunOverrides overrides(const Flags& f, const CLI::App* cmd) {
  RunOverrides o;
  if (cmd->count("--seed")) o.seed = f.seed;
  if (cmd->count("--replications")) o.replications = f.replications;
  if (cmd->count("--tol")) o.tol = f.tol;
  o.quick = f.quick;
  return o;
}

// stdout unless --out is given
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw gapcap::Error("cannot open output file " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int run_command(const std::string& path, const Flags& f, const CLI::App* cmd) {
  auto set = load_scenarios(path);
  const auto o = overrides(f, cmd);
  for (auto& s : set) apply_overrides(s, o);
  Output out(f.out);
  if (f.dump_config) {
    out.stream() << to_json(set).dump(2) << '\n';
    return 0;
  }
  RunOptions run;
  run.threads = f.threads;
  std::unique_ptr<std::ofstream> log_file;
  const bool wants_log = std::any_of(set.begin(), set.end(), [](const Scenario& s) { return s.simulation.replication_log; });
  if (wants_log) {
    if (f.out.empty()) {
      run.replication_log = &std::cerr;
    } else {
      log_file = std::make_unique<std::ofstream>(f.out + ".replications.jsonl");
      run.replication_log = log_file.get();
    }
  }
  write_csv(out.stream(), run_scenarios(set, run));
  return 0;
}

int validate_command(const Flags& f, const CLI::App* cmd) {
  AcceptanceOptions a;
  a.quick = f.quick;
  if (cmd->count("--seed")) a.seed = f.seed;
  if (cmd->count("--replications")) a.replications = f.replications;
  if (cmd->count("--tol")) a.mmpp_tol = f.tol;
  a.threads = f.threads;
  Output out(f.out);
  if (f.dump_config) {
    nlohmann::json j = {{"quick", a.quick}, {"seed", a.seed}, {"replications", a.replications}, {"mmpp_tol", a.mmpp_tol}};
    out.stream() << j.dump(2) << '\n';
    return 0;
  }
  bool ok = true;
  run_acceptance(a, [&](const CriterionResult& r) {
    out.stream() << format_result(r) << std::endl;
    ok = ok && r.passed;
  });
  return ok ? 0 : 1;
}

int preset_command(const std::string& name, const Flags& f, bool naive, const CLI::App* cmd) {
  if (name == "validate") return validate_command(f, cmd);
  PresetOptions p;
  p.overrides = overrides(f, cmd);
  p.naive = naive;
  p.threads = f.threads;
  Output out(f.out);
  if (f.dump_config) {
    out.stream() << to_json(preset_scenarios(name, p)).dump(2) << '\n';
    return 0;
  }
  const auto result = run_preset(name, p);
  write_csv(out.stream(), result.rows);
  for (const auto& a : result.anchors) {
    std::cerr << (a.passed ? "PASS " : "FAIL ") << a.name << ": " << a.detail << '\n';
  }
  return result.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minor-road capacity at priority intersections under gap acceptance"};
  app.require_subcommand(1);

  Flags run_flags;
  std::string scenario_path;
  auto* run = app.add_subcommand("run", "Evaluate a scenario file and print CSV");
  run->add_option("file", scenario_path, "Scenario JSON file")->required();
  add_common(run, run_flags);

  Flags preset_flags;
  std::string preset_name;
  bool naive = false;
  auto* preset = app.add_subcommand("preset", "Run a built-in experiment (example1..example5, validate)");
  preset->add_option("name", preset_name, "Preset name")
      ->required()
      ->check(CLI::IsMember({"example1", "example2", "example3", "example4", "example5", "validate"}));
  preset->add_flag("--naive", naive, "example5: add the decomposition-formula capacities");
  add_common(preset, preset_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(scenario_path, run_flags, run);
    return preset_command(preset_name, preset_flags, naive, preset);
  } catch (const ScenarioError& e) {
    std::cerr << "gapcap: invalid scenario: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gapcap: " << e.what() << '\n';
    return 3;
  }
}
