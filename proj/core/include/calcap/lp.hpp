#pragma once

#include <string>
#include <vector>

namespace calcap {

/// maximize c.x subject to A x <= b, x >= 0, with b >= 0 so that x = 0 is feasible.
struct LpProblem {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // row-major rows x cols
  std::vector<double> b;
  std::vector<double> c;

  void add_row(const std::vector<double>& coeffs, double rhs);
};

struct LpOptions {
  int max_iterations = 200000;
  double pivot_tol = 1e-11;
  double optimality_tol = 1e-12;
  /// consecutive degenerate pivots before switching from Dantzig to Bland's rule
  int degenerate_switch = 50;
};

struct LpResult {
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
  int degenerate_pivots = 0;
  int bland_pivots = 0;
  /// max_i (A x - b)_i^+ of the returned point
  double max_violation = 0.0;
};

/// Dense tableau simplex with fixed tie-breaking (lowest variable index), deterministic across runs.
/// Throws InputError for malformed or origin-infeasible problems and ComputationError when unbounded or when the
/// iteration cap is hit; the message carries the last iterate's objective and basis summary.
LpResult solve_lp(const LpProblem& problem, const LpOptions& options = {});

}  // namespace calcap
