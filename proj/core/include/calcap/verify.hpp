#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace calcap {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  /// measured quantities, one line
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

/// Runs one acceptance criterion (1..10). A criterion passes only when its checks hold and it finishes within its
/// time budget. Exceptions from the library are reported as failures.
CriterionResult run_criterion(int id, std::uint64_t seed = 1);

/// Criterion ids of a suite: rect, kernels, capacity, variational, whitney or all.
std::vector<int> suite_criteria(const std::string& suite);

std::vector<CriterionResult> run_suite(const std::string& suite, std::uint64_t seed = 1);

/// "PASS [3] name (1.2 s / 60 s): detail"
std::string format_result(const CriterionResult& result);

}  // namespace calcap
