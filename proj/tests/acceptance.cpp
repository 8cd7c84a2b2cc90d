// Full-scale acceptance run: one PASS/FAIL line per criterion.

#include <cstdlib>
#include <iostream>

#include "bjo/acceptance.hpp"

int main() {
  bjo::AcceptanceOptions options;
  if (const char* seed = std::getenv("BJO_SEED")) options.seed = std::strtoull(seed, nullptr, 10);
  options.on_result = [](const bjo::CriterionResult& r) { std::cout << bjo::format_line(r) << std::endl; };
  const bjo::AcceptanceReport report = bjo::run_acceptance(options);
  int failed = 0;
  for (const auto& c : report.criteria) failed += c.pass ? 0 : 1;
  std::cout << (failed ? "FAILED " : "passed ") << report.criteria.size() - failed << "/" << report.criteria.size()
            << " criteria, seed " << report.seed << std::endl;
  return failed ? 1 : 0;
}
