#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dauction {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Property suites on small random instances; used by the `check` subcommand.
std::vector<CheckResult> run_property_checks(std::uint64_t seed);

}  // namespace dauction
