#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace erwlab {

/// One line of an acceptance table.
struct CheckResult {
  int criterion = 0;
  std::string suite;
  std::string name;
  double measured = 0.0;
  double target = 0.0;
  /// Human-readable pass condition, e.g. "|rel err| <= 0.05" or "in [1.2, 3.2]".
  std::string condition;
  bool passed = false;
  /// Recorded for reference only; never fails a suite.
  bool informational = false;
  double seconds = 0.0;
};

struct CheckOptions {
  std::uint64_t seed = 7;
  /// Replaces the Monte Carlo replica counts when > 0. Counts below a
  /// check's required minimum fail its precision guard.
  std::int64_t replicas = 0;
  int workers = 1;
};

/// "oracle", "clt", "scaling", "meeting", "limit", "lil", "determinism", "all".
std::vector<std::string_view> check_suites();
std::vector<int> suite_criteria(std::string_view suite);

std::vector<CheckResult> run_criterion(int criterion, const CheckOptions& options);
std::vector<CheckResult> run_check_suite(std::string_view suite, const CheckOptions& options);

bool all_passed(const std::vector<CheckResult>& results) noexcept;

}  // namespace erwlab
