#include <doctest.h>

#include <cmath>
#include <random>

#include "calcap/errors.hpp"
#include "calcap/lp.hpp"

using namespace calcap;

namespace {

// vertex enumeration over all choices of `cols` active constraints among rows and x_i = 0
double brute_force_max(const LpProblem& p) {
  const int n = p.cols;
  const int total = p.rows + n;
  auto row = [&](int k, std::vector<double>& a, double& b) {
    a.assign(n, 0.0);
    if (k < p.rows) {
      for (int j = 0; j < n; ++j) a[j] = p.a[k * n + j];
      b = p.b[k];
    } else {
      a[k - p.rows] = -1.0;
      b = 0.0;
    }
  };
  double best = -INFINITY;
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;
  while (true) {
    // gaussian elimination with partial pivoting on the n x n system
    std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
    for (int i = 0; i < n; ++i) {
      std::vector<double> a;
      double b;
      row(pick[i], a, b);
      for (int j = 0; j < n; ++j) m[i][j] = a[j];
      m[i][n] = b;
    }
    bool singular = false;
    for (int c = 0; c < n && !singular; ++c) {
      int piv = c;
      for (int r = c + 1; r < n; ++r) {
        if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
      }
      if (std::abs(m[piv][c]) < 1e-12) {
        singular = true;
        break;
      }
      std::swap(m[c], m[piv]);
      for (int r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = m[r][c] / m[c][c];
        for (int j = c; j <= n; ++j) m[r][j] -= f * m[c][j];
      }
    }
    if (!singular) {
      std::vector<double> x(n);
      for (int i = 0; i < n; ++i) x[i] = m[i][n] / m[i][i];
      bool ok = true;
      for (int k = 0; k < total && ok; ++k) {
        std::vector<double> a;
        double b;
        row(k, a, b);
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += a[j] * x[j];
        if (s > b + 1e-9) ok = false;
      }
      if (ok) {
        double obj = 0.0;
        for (int j = 0; j < n; ++j) obj += p.c[j] * x[j];
        best = std::max(best, obj);
      }
    }
    int i = n - 1;
    while (i >= 0 && pick[i] == total - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

}  // namespace

TEST_CASE("textbook problem") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
  LpProblem p;
  p.cols = 2;
  p.c = {3, 5};
  p.add_row({1, 0}, 4);
  p.add_row({0, 2}, 12);
  p.add_row({3, 2}, 18);
  const LpResult r = solve_lp(p);
  CHECK(r.objective == doctest::Approx(36).epsilon(1e-12));
  CHECK(r.x[0] == doctest::Approx(2).epsilon(1e-12));
  CHECK(r.x[1] == doctest::Approx(6).epsilon(1e-12));
  CHECK(r.max_violation <= 1e-12);
}

TEST_CASE("random problems agree with vertex enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(0.05, 2.0), rhs(0.5, 3.0), obj(-0.5, 2.0);
  for (int trial = 0; trial < 60; ++trial) {
    LpProblem p;
    p.cols = 2 + trial % 3;
    for (int j = 0; j < p.cols; ++j) p.c.push_back(obj(rng));
    const int m = 3 + trial % 5;
    for (int i = 0; i < m; ++i) {
      std::vector<double> a(p.cols);
      for (double& v : a) v = coef(rng);
      p.add_row(a, rhs(rng));
    }
    const LpResult r = solve_lp(p);
    CHECK(r.objective == doctest::Approx(std::max(0.0, brute_force_max(p))).epsilon(1e-9));
  }
}

TEST_CASE("degenerate problem terminates") {
  // classic cycling example for the textbook largest-coefficient rule
  LpProblem p;
  p.cols = 4;
  p.c = {0.75, -20, 0.5, -6};
  p.add_row({0.25, -8, -1, 9}, 0);
  p.add_row({0.5, -12, -0.5, 3}, 0);
  p.add_row({0, 0, 1, 0}, 1);
  const LpResult r = solve_lp(p);
  CHECK(r.objective == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("many ties and zero right-hand sides") {
  LpProblem p;
  p.cols = 6;
  p.c.assign(6, 1.0);
  for (int i = 0; i < 6; ++i) {
    std::vector<double> a(6, 1.0);
    p.add_row(a, 1.0);
    a.assign(6, 0.0);
    a[i] = 1.0;
    p.add_row(a, 0.5);
  }
  const LpResult r = solve_lp(p);
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("errors") {
  LpProblem unbounded;
  unbounded.cols = 2;
  unbounded.c = {1, 1};
  unbounded.add_row({1, -1}, 1);
  CHECK_THROWS_AS(solve_lp(unbounded), ComputationError);

  LpProblem negative;
  negative.cols = 1;
  negative.c = {1};
  negative.add_row({1}, -1);
  CHECK_THROWS_AS(solve_lp(negative), InputError);

  LpProblem capped;
  capped.cols = 2;
  capped.c = {1, 1};
  capped.add_row({1, 1}, 1);
  LpOptions opt;
  opt.max_iterations = 0;
  CHECK_THROWS_AS(solve_lp(capped, opt), ComputationError);
}

TEST_CASE("repeated solves are bitwise identical") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LpProblem p;
  p.cols = 30;
  p.c.assign(30, 1.0);
  for (int i = 0; i < 80; ++i) {
    std::vector<double> a(30);
    for (double& v : a) v = u(rng);
    p.add_row(a, 1.0 + u(rng));
  }
  const LpResult a = solve_lp(p), b = solve_lp(p);
  CHECK(a.objective == b.objective);
  CHECK(a.x == b.x);
  CHECK(a.iterations == b.iterations);
}
