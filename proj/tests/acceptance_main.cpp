#include <cstdlib>
#include <iostream>
#include <string>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  gapcap::cli::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--quick") options.quick = true;
  }
  const auto results = gapcap::cli::run_acceptance(options, [](const gapcap::cli::CriterionResult& r) {
    std::cout << gapcap::cli::format_result(r) << std::endl;
  });
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
