#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace rcm {

struct SelftestOptions {
  int instances = 1000;
  std::uint64_t seed = 7;
  /// Scales both BIC penalties inside the library (not the oracle) by this
  /// factor; any value other than 1 must make the equivalence checks fail.
  double penalty_fault = 1.0;
};

struct SelftestCheck {
  std::string name;
  bool passed = true;
  std::int64_t evaluated = 0;
  std::string detail;  // first failure, if any
};

/// Oracle-equivalence and invariance checks on exhaustive small instances
/// (N_a <= 4, N_p <= 5).
std::vector<SelftestCheck> run_selftest(const SelftestOptions& options);

/// Prints one line per check; returns true when all passed.
bool print_selftest(const std::vector<SelftestCheck>& checks, std::ostream& out);

}  // namespace rcm
