// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

#include <iostream>

#include "lpp/acceptance.hpp"

int main() {
  lpp::AcceptanceConfig config;
  config.threads = lpp::default_threads();
  const auto results =
      lpp::run_acceptance(config, [](const lpp::CriterionResult& r) { std::cout << lpp::format_result(r) << std::endl; });
  int failed = 0;
  for (const auto& r : results) failed += !r.pass;
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
