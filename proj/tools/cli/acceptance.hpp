#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gapcap::cli {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Shorter simulations; the oracle intervals widen accordingly.
  bool quick = false;
  std::uint64_t seed = 1;
  std::size_t replications = 10;
  /// Crossings per replication for the oracle cells; 0 picks 1e6 (quick: 1e5).
  std::size_t crossings = 0;
  /// Relative tolerance for the phase-doubling loop.
  double mmpp_tol = 1e-4;
  std::size_t threads = 0;
};

/// Runs criteria 1..11 in order. `on_result` sees each result as soon as it is known.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS [n] name (t s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace gapcap::cli
