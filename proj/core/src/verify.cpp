#include "calcap/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "calcap/calibration.hpp"
#include "calcap/capacity.hpp"
#include "calcap/errors.hpp"
#include "calcap/kernels.hpp"
#include "calcap/parallel.hpp"
#include "calcap/quadrature.hpp"
#include "calcap/rect2d.hpp"
#include "calcap/variational.hpp"
#include "calcap/whitney.hpp"

namespace calcap {

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

struct Check {
  bool pass = true;
  std::ostringstream detail;
  void expect(bool ok) { pass = pass && ok; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Check rect_formula(std::uint64_t seed) {
  Check c;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> e(-2.0, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double lx = std::pow(10.0, e(rng)), lt = std::pow(10.0, e(rng));
    const Big bx(lx), bt(lt);
    const Big q = bt / bx;
    const Big exact = bt / (boost::multiprecision::log1p(q * q) / 2 + q * boost::multiprecision::atan(bx / bt));
    const double got = capacity_formula(lx, lt);
    const double rel = static_cast<double>(boost::multiprecision::abs((Big(got) - exact) / exact));
    worst = std::max(worst, rel);
  }
  c.expect(worst <= 1e-10);
  c.detail << "50 pairs, max rel err " << fmt(worst) << ", unit square " << fmt(capacity_formula(1.0, 1.0));
  return c;
}

Check rect_quadrature(std::uint64_t seed) {
  Check c;
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> ur(std::log(0.25), std::log(4.0)), u(0.0, 1.0);
  std::vector<double> xs, ts, rs;
  while (xs.size() < 200) {
    const double r = std::exp(ur(rng));
    const double x = -2.0 * r + 5.0 * r * u(rng), t = -2.0 + 5.0 * u(rng);
    // seam band
    if (std::abs(t) < 1e-9 || std::abs(t - 1.0) < 1e-9 || std::abs(x) < 1e-9 || std::abs(x - r) < 1e-9) continue;
    rs.push_back(r);
    xs.push_back(x);
    ts.push_back(t);
  }
  std::vector<double> rel(xs.size());
  parallel_for(xs.size(), [&](std::size_t k) {
    const NormalizedRect rect = NormalizedRect::unit_height(rs[k]);
    const Point p = Point::xt(xs[k], ts[k]);
    auto f = [&](const Point& y) {
      const Point z = p - y;
      return z.norm2() == 0.0 ? 0.0 : kernel_unchecked(KernelKind::P, z);
    };
    CubatureOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-10;
    const double q = integrate_box(f, AxisBox(Point::xt(0, 0), Point::xt(rs[k], 1)), Singularity{p, 1.0}, opt).value;
    const double exact = rect_potential(rect, xs[k], ts[k]);
    // P*μ vanishes identically for t <= 0
    rel[k] = exact == 0.0 ? std::abs(q) : std::abs(q - exact) / exact;
  });
  const double worst = *std::max_element(rel.begin(), rel.end());
  c.expect(worst <= 1e-6);
  c.detail << "200 points, max rel err " << fmt(worst);
  return c;
}

Check rect_extrema() {
  Check c;
  const int n = 1001;
  double worst_max = 0.0, worst_min = 0.0;
  for (double r : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const NormalizedRect rect = NormalizedRect::unit_height(r);
    const double hx = 5.0 * r / (n - 1), ht = 5.0 / (n - 1);
    std::vector<double> row_max(n), row_arg(n);
    parallel_for(n, [&](std::size_t i) {
      const double x = -2.0 * r + hx * static_cast<double>(i);
      double best = -1.0, arg = 0.0;
      for (int j = 0; j < n; ++j) {
        const double t = -2.0 + ht * j;
        const double v = rect_potential(rect, x, t);
        if (v > best) best = v, arg = t;
      }
      row_max[i] = best;
      row_arg[i] = arg;
    });
    const auto it = std::max_element(row_max.begin(), row_max.end());
    const std::size_t i = static_cast<std::size_t>(it - row_max.begin());
    const double x_at = -2.0 * r + hx * static_cast<double>(i), t_at = row_arg[i];
    const double dmax = std::abs(*it - rect_max_M(r));
    worst_max = std::max(worst_max, dmax);
    c.expect(dmax <= 1e-4);
    c.expect(std::abs(x_at - r / 2) <= hx + 1e-12 && std::abs(t_at - 1.0) <= ht + 1e-12);

    // P_sym over R_0
    const double gx = r / (n - 1), gt = 1.0 / (n - 1);
    std::vector<double> row_min(n), row_tmin(n);
    parallel_for(n, [&](std::size_t a) {
      const double x = gx * static_cast<double>(a);
      double best = INFINITY, arg = 0.0;
      for (int b = 0; b < n; ++b) {
        const double t = gt * b;
        const double v = rect_sym_potential(rect, x, t);
        if (v < best) best = v, arg = t;
      }
      row_min[a] = best;
      row_tmin[a] = arg;
    });
    const auto jt = std::min_element(row_min.begin(), row_min.end());
    const std::size_t a = static_cast<std::size_t>(jt - row_min.begin());
    const double xm = gx * static_cast<double>(a), tm = row_tmin[a];
    const double dmin = std::abs(*jt - rect_min_m(r) / 2);
    worst_min = std::max(worst_min, dmin);
    c.expect(dmin <= 1e-3);
    const bool corner = (xm <= gx + 1e-12 || xm >= r - gx - 1e-12) && (tm <= gt + 1e-12 || tm >= 1.0 - gt - 1e-12);
    c.expect(corner);
  }
  c.detail << "r in {1/4,1/2,1,2,4}, max |grid max - M| " << fmt(worst_max) << ", max |grid min - m/2| "
           << fmt(worst_min);
  return c;
}

Check m_vs_M(std::uint64_t seed) {
  Check c;
  std::mt19937_64 rng(seed + 3);
  std::uniform_real_distribution<double> e(-3.0, 3.0);
  double worst = -INFINITY;
  for (int k = 0; k < 1000; ++k) {
    const double r = std::pow(10.0, e(rng));
    const double d = rect_max_M(r) - 4.0 * rect_min_m(r);
    worst = std::max(worst, d);
    c.expect(d <= 0.0);
  }
  c.detail << "1000 r, max M - 4m = " << fmt(worst);
  return c;
}

Check envelopes() {
  Check c;
  for (double r : {1e-3, 1e-2, 1e-1, 0.5}) {
    const double v = r / rect_min_m(r), L = std::abs(std::log(r));
    c.expect(v >= 1.0 / (3.0 * L) && v <= 1.0 / L);
    c.expect(asymptotic_bounds(r).inside);
    c.detail << "r=" << r << ": " << fmt(v) << " in [" << fmt(1 / (3 * L)) << "," << fmt(1 / L) << "]; ";
  }
  for (double r : {1.0, 2.0, 10.0, 100.0}) {
    const double v = r / rect_min_m(r);
    c.expect(v >= r / 2 && v <= r);
    c.expect(asymptotic_bounds(r).inside);
    c.detail << "r=" << r << ": " << fmt(v) << "; ";
  }
  return c;
}

Check sandwich() {
  Check c;
  const BoxUnionSet square(1, {AxisBox(Point::xt(0, 0), Point::xt(1, 1))});
  LpCapacityOptions lp;
  lp.generation = 4;  // 256 cells
  const CapacityBracket b = estimate_capacity(square, lp);
  const double lo_target = 0.9 / rect_max_M(1.0), hi_target = 1.05 * 2.0 / rect_min_m(1.0);
  c.expect(b.constraint_report.cells <= 4096);
  c.expect(b.lower >= lo_target);
  c.expect(b.upper <= hi_target);
  c.expect(b.lower <= b.upper);
  c.detail << "generation 4, " << b.constraint_report.cells << " cells: lower " << fmt(b.lower) << " (>= "
           << fmt(lo_target) << "), upper " << fmt(b.upper) << " (<= " << fmt(hi_target) << "), verify violation "
           << fmt(b.constraint_report.max_violation);
  return c;
}

Check kernel_suite(std::uint64_t seed) {
  Check c;
  const BoxUnionSet f(1, {AxisBox(Point::xt(0, 0), Point::xt(1, 1)), AxisBox(Point::xt(3, -1), Point::xt(3.5, 2))});
  auto lambda = [&](const Point& p) { return distance_to_set(p, f); };
  std::mt19937_64 rng(seed + 5);
  std::uniform_real_distribution<double> u(-4.0, 7.0);
  std::size_t item1 = 0, item3 = 0;
  for (int k = 0; k < 100000; ++k) {
    const Point x = Point::xt(u(rng), u(rng)), y = Point::xt(u(rng), u(rng));
    const double lx = lambda(x), ly = lambda(y);
    for (KernelKind kind : {KernelKind::P, KernelKind::P_CONJ, KernelKind::P_SYM}) {
      const double v = suppressed_value(kind, x, y, lx, ly);
      if (!(v >= 0.0 && v <= 1.0 / distance(x, y))) ++item1;
      const double big = std::max(lx, ly);
      if (big > 0.0 && v > 4.0 / big) ++item3;
    }
  }
  c.expect(item1 == 0 && item3 == 0);
  const double cz = cz_smoothness_probe(KernelKind::P, 1, 100000, seed + 6);
  c.expect(cz <= calibration::kCzConstant);
  const BumpProfile psi;
  double lo = INFINITY, hi = 0.0;
  for (double tau : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
    const double v = regularized_cz_probe(KernelKind::P_SYM, 1, tau, psi, 20000, seed + 7);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  c.expect(hi <= 1.5 * lo);
  c.detail << "1e5 pairs: item 1 misses " << item1 << ", item 3 misses " << item3 << "; CZ ratio " << fmt(cz)
           << " (<= " << calibration::kCzConstant << "); regularized CZ over tau in [" << fmt(lo) << ", " << fmt(hi)
           << "]";
  return c;
}

Check variational(std::uint64_t seed) {
  Check c;
  const BoxUnionSet square(1, {AxisBox(Point::xt(0, 0), Point::xt(1, 1))});
  const VariationalProblem pr = make_variational_problem(square, 4);
  const AscentResult r = maximize_F(pr, 100, seed);
  const bool normalized = r.energy <= r.mass * (1.0 + 1e-6);
  bool monotone = true;
  for (std::size_t i = 1; i < r.trace.size(); ++i) monotone = monotone && r.trace[i] >= r.trace[i - 1];
  c.expect(normalized && r.value < r.mass && monotone);
  c.detail << "generation 4: F " << fmt(r.value) << ", mass " << fmt(r.mass) << ", energy " << fmt(r.energy)
           << ", " << r.accepted << " accepted steps, trace monotone " << (monotone ? "yes" : "no");
  return c;
}

Check whitney(std::uint64_t seed) {
  Check c;
  const BoxUnionSet e(1, {AxisBox(Point::xt(0, 0), Point::xt(1, 1)), AxisBox(Point::xt(4, 0), Point::xt(5, 1))});
  const VariationalProblem pr = make_variational_problem(e, 3);
  const WhitneyField field(maximize_F(pr, 40, seed).mu0, pr.tau0);
  WhitneyOptions opt;
  opt.samples = 10000;
  opt.seed = seed;
  const WhitneyCover plain = build_whitney_cover(e, field, opt);
  opt.p4_hypothesis = true;
  const WhitneyCover p4 = build_whitney_cover(e, field, opt);
  for (const WhitneyCover* w : {&plain, &p4}) {
    const CoverStats& s = w->stats;
    c.expect(s.p1 && s.halves_disjoint && s.covers_samples && s.overlap5 <= calibration::kCoverOverlapBound);
  }
  c.expect(p4.stats.p4 && p4.stats.max_diam <= e.diameter() / 10.0);
  c.detail << plain.cubes.size() << " cubes, overlap " << plain.stats.overlap5 << "; with P4 " << p4.cubes.size()
           << " cubes, overlap " << p4.stats.overlap5 << ", diam ratio " << fmt(p4.stats.max_diam_ratio)
           << " (bound " << calibration::kCoverOverlapBound << ")";
  return c;
}

// two disjoint unions of 1 to 3 boxes with corners on the quarter lattice of [0, 3]^2
std::pair<BoxUnionSet, BoxUnionSet> random_pair(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> corner(0, 11), side(1, 4), count(1, 3);
  auto box = [&] {
    const int x = corner(rng), t = corner(rng);
    return AxisBox(Point::xt(x / 4.0, t / 4.0), Point::xt((x + side(rng)) / 4.0, (t + side(rng)) / 4.0));
  };
  std::vector<AxisBox> all;
  std::vector<AxisBox> parts[2];
  for (int s = 0; s < 2; ++s) {
    const int k = count(rng);
    while (static_cast<int>(parts[s].size()) < k) {
      const AxisBox b = box();
      // closed boxes must not even touch so the two unions are disjoint compacts
      bool clash = false;
      for (const AxisBox& o : all) clash = clash || intersect(b, o).has_value();
      if (clash) continue;
      all.push_back(b);
      parts[s].push_back(b);
    }
  }
  return {BoxUnionSet(1, parts[0]), BoxUnionSet(1, parts[1])};
}

Check semi_additivity(std::uint64_t seed) {
  Check c;
  std::mt19937_64 rng(seed + 11);
  LpCapacityOptions lp;
  lp.generation = 3;
  double worst = 0.0;
  c.detail << "ratios:";
  for (int k = 0; k < 10; ++k) {
    const auto [a, b] = random_pair(rng);
    const SemiAdditivity s = semi_additivity_probe({a, b}, lp, 4.0);
    c.expect(s.within_constant && s.union_value <= 4.0 * s.sum_value);
    worst = std::max(worst, s.ratio);
    c.detail << " " << fmt(s.ratio);
  }
  c.detail << "; max " << fmt(worst) << " (ceiling 4)";
  return c;
}

struct Spec {
  const char* name;
  double budget;
};

const Spec kSpecs[] = {
    {"rectangle formula", 1.0},       {"analytic vs quadrature", 30.0}, {"extrema", 60.0},
    {"M <= 4m", 1.0},                 {"asymptotic envelopes", 1.0},    {"capacity sandwich", 300.0},
    {"kernel properties", 60.0},      {"variational normalization", 300.0}, {"Whitney properties", 120.0},
    {"semi-additivity", 900.0},
};

}  // namespace

CriterionResult run_criterion(int id, std::uint64_t seed) {
  if (id < 1 || id > 10) throw InputError("criterion id must be in [1, 10]");
  CriterionResult out;
  out.id = id;
  out.name = kSpecs[id - 1].name;
  out.budget_seconds = kSpecs[id - 1].budget;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Check c;
    switch (id) {
      case 1: c = rect_formula(seed); break;
      case 2: c = rect_quadrature(seed); break;
      case 3: c = rect_extrema(); break;
      case 4: c = m_vs_M(seed); break;
      case 5: c = envelopes(); break;
      case 6: c = sandwich(); break;
      case 7: c = kernel_suite(seed); break;
      case 8: c = variational(seed); break;
      case 9: c = whitney(seed); break;
      case 10: c = semi_additivity(seed); break;
    }
    out.pass = c.pass;
    out.detail = c.detail.str();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("error: ") + e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out.seconds > out.budget_seconds) {
    out.pass = false;
    out.detail += " [over time budget]";
  }
  return out;
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "rect") return {1, 2, 3, 4, 5};
  if (suite == "kernels") return {7};
  if (suite == "capacity") return {6, 10};
  if (suite == "variational") return {8};
  if (suite == "whitney") return {9};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  throw InputError("unknown suite '" + suite + "'");
}

std::vector<CriterionResult> run_suite(const std::string& suite, std::uint64_t seed) {
  std::vector<CriterionResult> out;
  for (int id : suite_criteria(suite)) out.push_back(run_criterion(id, seed));
  return out;
}

std::string format_result(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "%s [%d] %s (%.2f s / %.0f s): ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds, r.budget_seconds);
  return head + r.detail;
}

}  // namespace calcap
