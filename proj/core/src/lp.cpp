#include "calcap/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "calcap/errors.hpp"

namespace calcap {

void LpProblem::add_row(const std::vector<double>& coeffs, double rhs) {
  if (static_cast<int>(coeffs.size()) != cols) throw InputError("LP row has the wrong length");
  a.insert(a.end(), coeffs.begin(), coeffs.end());
  b.push_back(rhs);
  ++rows;
}

LpResult solve_lp(const LpProblem& pb, const LpOptions& opt) {
  const int m = pb.rows, n = pb.cols;
  if (m < 0 || n < 0 || static_cast<long>(pb.a.size()) != static_cast<long>(m) * n ||
      static_cast<int>(pb.b.size()) != m || static_cast<int>(pb.c.size()) != n) {
    throw InputError("LP dimensions are inconsistent");
  }
  for (double v : pb.b) {
    if (!(v >= 0.0)) throw InputError("LP right-hand side must be >= 0 so that the origin is feasible");
  }
  // Tucker tableau: rows 0..m-1 hold [A | b], row m holds [-c | z]
  const int w = n + 1;
  std::vector<double> t(static_cast<std::size_t>(m + 1) * w, 0.0);
  for (int i = 0; i < m; ++i) {
    std::copy(pb.a.begin() + static_cast<long>(i) * n, pb.a.begin() + static_cast<long>(i + 1) * n,
              t.begin() + static_cast<long>(i) * w);
    t[static_cast<std::size_t>(i) * w + n] = pb.b[i];
  }
  for (int j = 0; j < n; ++j) t[static_cast<std::size_t>(m) * w + j] = -pb.c[j];
  auto at = [&](int i, int j) -> double& { return t[static_cast<std::size_t>(i) * w + j]; };

  // labels: 0..n-1 structural, n..n+m-1 slacks
  std::vector<int> row_label(m), col_label(n);
  for (int i = 0; i < m; ++i) row_label[i] = n + i;
  for (int j = 0; j < n; ++j) col_label[j] = j;

  LpResult res;
  int degenerate_run = 0;
  std::vector<double> pivot_row(w);
  while (true) {
    const bool bland = degenerate_run >= opt.degenerate_switch;
    int s = -1;
    if (bland) {
      for (int j = 0; j < n; ++j) {
        if (at(m, j) < -opt.optimality_tol && (s < 0 || col_label[j] < col_label[s])) s = j;
      }
    } else {
      double best = -opt.optimality_tol;
      for (int j = 0; j < n; ++j) {
        const double v = at(m, j);
        if (v < best || (v == best && s >= 0 && col_label[j] < col_label[s])) {
          best = v;
          s = j;
        }
      }
    }
    if (s < 0) break;
    if (res.iterations >= opt.max_iterations) {
      std::ostringstream os;
      os << "simplex hit the iteration cap of " << opt.max_iterations << " (objective " << at(m, n)
         << ", degenerate pivots " << res.degenerate_pivots << ", entering column " << col_label[s] << ")";
      throw ComputationError(os.str());
    }
    int r = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = at(i, s);
      if (a <= opt.pivot_tol) continue;
      const double ratio = std::max(at(i, n), 0.0) / a;
      if (r < 0 || ratio < best_ratio || (ratio == best_ratio && row_label[i] < row_label[r])) {
        r = i;
        best_ratio = ratio;
      }
    }
    if (r < 0) {
      std::ostringstream os;
      os << "LP is unbounded along variable " << col_label[s];
      throw ComputationError(os.str());
    }
    if (best_ratio == 0.0) {
      ++res.degenerate_pivots;
      ++degenerate_run;
    } else {
      degenerate_run = 0;
    }
    if (bland) ++res.bland_pivots;

    const double p = at(r, s);
    for (int j = 0; j < w; ++j) pivot_row[j] = at(r, j) / p;
    pivot_row[s] = 1.0 / p;
    for (int i = 0; i <= m; ++i) {
      if (i == r) continue;
      const double f = at(i, s);
      if (f == 0.0) continue;
      double* row = &at(i, 0);
      for (int j = 0; j < w; ++j) row[j] -= f * pivot_row[j];
      row[s] = -f / p;
    }
    std::copy(pivot_row.begin(), pivot_row.end(), &at(r, 0));
    std::swap(row_label[r], col_label[s]);
    ++res.iterations;
  }

  res.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i) {
    if (row_label[i] < n) res.x[row_label[i]] = std::max(at(i, n), 0.0);
  }
  res.objective = 0.0;
  for (int j = 0; j < n; ++j) res.objective += pb.c[j] * res.x[j];
  for (int i = 0; i < m; ++i) {
    double ax = 0.0;
    for (int j = 0; j < n; ++j) ax += pb.a[static_cast<std::size_t>(i) * n + j] * res.x[j];
    res.max_violation = std::max(res.max_violation, ax - pb.b[i]);
  }
  return res;
}

}  // namespace calcap
