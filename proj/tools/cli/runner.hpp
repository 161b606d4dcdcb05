#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace gapcap::cli {

/// One CSV line. Unset diagnostics print as empty cells.
struct ResultRow {
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

  std::optional<double> sweep_value;
  std::string behavior;
  std::string quantity;
  double value = 0.0;
  std::string flag;
  double error = kUnset;
  double count = kUnset;
  double residual = kUnset;
  double ci_low = kUnset;
  double ci_high = kUnset;
};

/// Command-line overrides applied on top of the scenario file.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::optional<double> tol;
  bool quick = false;
};

void apply_overrides(Scenario& s, const RunOverrides& o);

struct RunOptions {
  /// Worker threads for sweep points; 0 picks the hardware concurrency.
  std::size_t threads = 0;
  /// Receives per-replication JSON lines when a scenario asks for them.
  std::ostream* replication_log = nullptr;
};

/// All rows of one scenario, sorted by sweep value then behaviour.
std::vector<ResultRow> run_scenario(const Scenario& s, const RunOptions& options = {});

/// Rows of several scenarios merged in the same order; ties keep file order.
std::vector<ResultRow> run_scenarios(const std::vector<Scenario>& set, const RunOptions& options = {});

/// fn(i) for i < count on a small worker pool; the first exception is rethrown.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

std::string csv_header();
std::string csv_line(const ResultRow& row);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

/// %.12g, with inf and empty cells for NaN.
std::string format_number(double x);

}  // namespace gapcap::cli
