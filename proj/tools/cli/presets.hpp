#pragma once

#include <string>
#include <vector>

#include "runner.hpp"
#include "scenario.hpp"

namespace gapcap::cli {

struct PresetOptions {
  RunOverrides overrides;
  /// example5 only: add the decomposition-formula rows and anchors.
  bool naive = false;
  std::size_t threads = 0;
};

struct AnchorCheck {
  std::string name;
  std::string detail;
  bool passed = false;
};

struct PresetResult {
  std::vector<ResultRow> rows;
  std::vector<AnchorCheck> anchors;

  bool passed() const;
};

/// example1 ... example5; `validate` is handled by the acceptance runner.
const std::vector<std::string>& preset_names();

/// The scenarios a preset runs, with overrides applied. Throws InvalidArgument on unknown names.
std::vector<Scenario> preset_scenarios(const std::string& name, const PresetOptions& options);

PresetResult run_preset(const std::string& name, const PresetOptions& options);

/// "anchor <name> = <actual> (expected <x> +- <tol>)" style check.
AnchorCheck check_near(std::string name, double actual, double expected, double tolerance);

}  // namespace gapcap::cli
