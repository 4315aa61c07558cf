#include <doctest.h>

#include <cmath>
#include <random>

#include "calcap/calibration.hpp"
#include "calcap/errors.hpp"
#include "calcap/kernels.hpp"

using namespace calcap;

TEST_CASE("kernel values") {
  CHECK(eval_kernel(KernelKind::P, Point::xt(0, -1)) == 0.0);
  CHECK(eval_kernel(KernelKind::P, Point::xt(0, 2)) == 0.5);
  CHECK(eval_kernel(KernelKind::P_SYM, Point::xt(1, -1)) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(eval_kernel(KernelKind::P_CONJ, Point::xt(0, -2)) == 0.5);
  CHECK(eval_kernel(KernelKind::P, Point::xt(3, 0)) == 0.0);
  CHECK_THROWS_WITH_AS(eval_kernel(KernelKind::P, Point::xt(0, 0)), "kernel singularity", InputError);
  CHECK(kernel_kind_from_string("P_SYM") == KernelKind::P_SYM);
  CHECK_THROWS_AS(kernel_kind_from_string("Q"), InputError);
}

TEST_CASE("kernel algebra at random points") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int n = 1; n <= 3; ++n) {
    for (int k = 0; k < 3000; ++k) {
      Point x(n);
      for (int i = 0; i < x.dim(); ++i) x[i] = g(rng);
      const double p = eval_kernel(KernelKind::P, x);
      const double pc = eval_kernel(KernelKind::P_CONJ, x);
      const double ps = eval_kernel(KernelKind::P_SYM, x);
      CHECK(p >= 0.0);
      CHECK(pc >= 0.0);
      CHECK(pc == eval_kernel(KernelKind::P, -x));
      CHECK(ps == eval_kernel(KernelKind::P_SYM, -x));
      CHECK(ps == doctest::Approx(0.5 * (p + pc)).epsilon(1e-15));
      const double size = std::pow(x.norm(), -n) * (1.0 + 1e-14);
      CHECK(p <= size);
      CHECK(ps <= size);
    }
  }
}

TEST_CASE("bump profile") {
  const BumpProfile psi;
  CHECK(psi(0.0) == 0.0);
  CHECK(psi(0.5) == 0.0);
  CHECK(psi(1.0) == 1.0);
  CHECK(psi(0.75) == doctest::Approx(0.5));
  CHECK(psi.gradient_bound() == doctest::Approx(3.0));
  double prev = 0.0, steepest = 0.0;
  for (int k = 0; k <= 10000; ++k) {
    const double r = 0.4 + 0.7 * k / 10000.0;
    CHECK(psi(r) >= prev);
    prev = psi(r);
    steepest = std::max(steepest, psi.derivative(r));
  }
  CHECK(steepest <= psi.gradient_bound() + 1e-12);
  CHECK(steepest == doctest::Approx(psi.gradient_bound()).epsilon(1e-6));
  // primitive of 1 - psi by comparison with a fine midpoint sum
  double acc = 0.0;
  const int m = 200000;
  for (int k = 0; k < m; ++k) acc += (1.0 - psi((k + 0.5) * 1.5 / m)) * 1.5 / m;
  CHECK(psi.complement_primitive(1.5) == doctest::Approx(acc).epsilon(1e-9));
  CHECK(psi.complement_primitive(0.3) == doctest::Approx(0.3));
  CHECK_THROWS_AS(BumpProfile(1.0, 0.5), InputError);
}

TEST_CASE("regularized kernel") {
  const BumpProfile psi;
  const double tau = 0.2;
  CHECK(eval_regularized(KernelKind::P_SYM, Point::xt(0, 0), tau, psi) == 0.0);
  const Point far = Point::xt(0.3, 2 * tau * 0.9);
  CHECK(eval_regularized(KernelKind::P_SYM, far, tau, psi) == eval_kernel(KernelKind::P_SYM, far));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int k = 0; k < 10000; ++k) {
    const Point x = Point::xt(u(rng), u(rng));
    if (x.norm2() == 0.0) continue;
    const double reg = eval_regularized(KernelKind::P_SYM, x, tau, psi);
    CHECK(reg >= 0.0);
    CHECK(reg <= eval_kernel(KernelKind::P_SYM, x));
  }
  CHECK_THROWS_AS(eval_regularized(KernelKind::P, far, 0.0, psi), InputError);
}

TEST_CASE("suppressed kernel bounds") {
  const BoxUnionSet f(1, {AxisBox(Point::xt(0, 0), Point::xt(1, 1)), AxisBox(Point::xt(3, -1), Point::xt(3.5, 2))});
  auto lambda = [&](const Point& p) { return distance_to_set(p, f); };
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-4.0, 7.0);
  for (int k = 0; k < 20000; ++k) {
    const Point x = Point::xt(u(rng), u(rng));
    const Point y = Point::xt(u(rng), u(rng));
    for (KernelKind kind : {KernelKind::P, KernelKind::P_CONJ, KernelKind::P_SYM}) {
      const double v = eval_suppressed(kind, x, y, lambda);
      CHECK(v >= 0.0);
      CHECK(v <= (1.0 + 1e-14) / distance(x, y));
      const double big = std::max(lambda(x), lambda(y));
      if (big > 0.0) CHECK(v <= 4.0 / big);
    }
    CHECK(eval_suppressed(KernelKind::P_SYM, x, y, lambda) == eval_suppressed(KernelKind::P_SYM, y, x, lambda));
  }
  // inside F the suppression is inactive
  const Point a = Point::xt(0.2, 0.9), b = Point::xt(0.7, 0.1);
  CHECK(eval_suppressed(KernelKind::P_CONJ, a, b, lambda) == eval_kernel(KernelKind::P_CONJ, a - b));
  CHECK_THROWS_AS(eval_suppressed(KernelKind::P, a, a, lambda), InputError);
}

TEST_CASE("smoothness probes") {
  const double plain = cz_smoothness_probe(KernelKind::P, 1, 20000, 3);
  CHECK(plain > 0.5);
  CHECK(plain <= calibration::kCzConstant);
  for (int n = 2; n <= 3; ++n) CHECK(cz_smoothness_probe(KernelKind::P_SYM, n, 5000, 4) <= calibration::kCzConstant * n);

  const BoxUnionSet f(1, {AxisBox(Point::xt(0, 0), Point::xt(1, 1))});
  auto zero = [](const Point&) { return 0.0; };
  const AxisBox region(Point::xt(-1, -1), Point::xt(2, 2));
  CHECK(cz_smoothness_probe_suppressed(KernelKind::P, 1, zero, region, 20000, 3) <= calibration::kCzConstant);

  const BumpProfile psi;
  double lo = 1e300, hi = 0.0;
  for (double tau : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
    const double c = regularized_cz_probe(KernelKind::P_SYM, 1, tau, psi, 20000, 17);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  CHECK(hi <= 1.5 * lo);
}
