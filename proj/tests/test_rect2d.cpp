#include <doctest.h>

#include <cmath>
#include <random>

#include "calcap/errors.hpp"
#include "calcap/kernels.hpp"
#include "calcap/quadrature.hpp"
#include "calcap/rect2d.hpp"

using namespace calcap;

namespace {

double quad_rect(const NormalizedRect& rect, double x, double t, KernelKind kind) {
  const AxisBox cell(Point::xt(0, 0), Point::xt(rect.r, 1));
  const Point p = Point::xt(x, t);
  auto f = [&](const Point& y) {
    const Point z = p - y;
    return z.norm2() == 0.0 ? 0.0 : kernel_unchecked(kind, z);
  };
  CubatureOptions opt;
  opt.abs_tol = 1e-11;
  opt.rel_tol = 1e-10;
  return integrate_box(f, cell, Singularity{p, 1.0}, opt).value;
}

}  // namespace

TEST_CASE("branch values") {
  const auto rect = NormalizedRect::unit_height(1.0);
  CHECK(rect_potential(rect, 0.4, -0.3) == 0.0);
  CHECK(rect_potential(rect, 0.5, 0.5) == doctest::Approx(0.5 * std::log(2.0) + M_PI / 4.0).epsilon(1e-14));
  for (double r : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const auto R = NormalizedRect::unit_height(r);
    CHECK(rect_potential(R, r / 2, 1.0) == doctest::Approx(rect_max_M(r)).epsilon(1e-14));
    CHECK(rect_potential(R, r / 2, 0.5) == doctest::Approx(rect_min_m(r)).epsilon(1e-14));
    CHECK(rect_sym_potential(R, 0.0, 0.0) == doctest::Approx(rect_min_m(r) / 2).epsilon(1e-14));
    CHECK(rect_sym_potential(R, r, 1.0) == doctest::Approx(rect_min_m(r) / 2).epsilon(1e-14));
    CHECK(rect_sym_potential(R, 1e-9, 1e-9) == doctest::Approx(rect_min_m(r) / 2).epsilon(1e-7));
  }
}

TEST_CASE("continuity across seams and symmetry") {
  std::mt19937_64 rng(3);
  for (double r : {0.25, 1.0, 4.0}) {
    const auto R = NormalizedRect::unit_height(r);
    std::uniform_real_distribution<double> ux(-2 * r, 3 * r);
    for (int k = 0; k < 200; ++k) {
      const double x = ux(rng);
      CHECK(std::abs(rect_potential(R, x, 1.0 - 1e-13) - rect_potential(R, x, 1.0 + 1e-13)) <= 1e-10);
      CHECK(std::abs(rect_potential(R, x, 1e-13)) <= 1e-10);
      CHECK(std::abs(rect_potential(R, 1e-15, 0.3 + 0.01 * k) - rect_potential(R, -1e-15, 0.3 + 0.01 * k)) <= 1e-10);
      const double t = -2.0 + 5.0 * (k + 0.5) / 200.0;
      // dyadic x keeps r - x exact
      const double xd = std::ldexp(std::round(std::ldexp(x, 20)), -20);
      CHECK(rect_potential(R, xd, t) == rect_potential(R, r - xd, t));
      CHECK(rect_sym_potential(R, x, t) == rect_sym_potential(R, x, 1.0 - t));
    }
  }
}

TEST_CASE("closed form against cubature") {
  std::mt19937_64 rng(101);
  for (double r : {0.5, 1.0, 3.0}) {
    const auto R = NormalizedRect::unit_height(r);
    std::uniform_real_distribution<double> ux(-r, 2 * r), ut(-0.5, 2.0);
    for (int k = 0; k < 12; ++k) {
      const double x = ux(rng), t = ut(rng);
      const double exact = rect_potential(R, x, t);
      const double q = quad_rect(R, x, t, KernelKind::P);
      CHECK(q == doctest::Approx(exact).epsilon(1e-7).scale(1e-12));
      const double qs = quad_rect(R, x, t, KernelKind::P_SYM);
      CHECK(qs == doctest::Approx(rect_sym_potential(R, x, t)).epsilon(1e-7));
    }
  }
}

TEST_CASE("capacity formula") {
  CHECK(capacity_formula(1, 1) == doctest::Approx(1.0 / (0.5 * std::log(2.0) + M_PI / 4.0)).epsilon(1e-15));
  CHECK(capacity_formula(1, 1) == doctest::Approx(0.88341).epsilon(1e-5));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 100; ++k) {
    const double lx = std::exp(u(rng)), lt = std::exp(u(rng));
    const double v = capacity_formula(lx, lt);
    CHECK(v == doctest::Approx(lt * (lx / lt) / rect_min_m(lx / lt)).epsilon(1e-13));
    CHECK(capacity_formula(4.0 * lx, 4.0 * lt) == doctest::Approx(4.0 * v).epsilon(1e-14));
    if (lx >= lt) {
      CHECK(v >= lx / 2);
      CHECK(v <= lx);
    }
  }
  CHECK_THROWS_AS(capacity_formula(0.0, 1.0), InputError);
}

TEST_CASE("asymptotic envelopes") {
  for (double r : {0.001, 0.01, 0.1, 0.5}) {
    const auto b = asymptotic_bounds(r);
    CHECK(b.regime == AsymptoticRegime::Thin);
    CHECK(b.inside);
  }
  for (double r : {1.0, 2.0, 4.0, 10.0, 100.0}) {
    const auto b = asymptotic_bounds(r);
    CHECK(b.regime == AsymptoticRegime::Wide);
    CHECK(b.inside);
  }
  const auto mid = asymptotic_bounds(0.75);
  CHECK(mid.regime == AsymptoticRegime::Transition);
  CHECK(mid.inside);
  CHECK(asymptotic_bounds(1.0).value == doctest::Approx(0.88341).epsilon(1e-5));
}

TEST_CASE("M <= 4m") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(std::log(1e-3), std::log(1e3));
  for (int k = 0; k < 1000; ++k) {
    const double r = std::exp(u(rng));
    CHECK(rect_max_M(r) - 4.0 * rect_min_m(r) <= 0.0);
  }
}

TEST_CASE("general cells by scaling") {
  const AxisBox cell(Point::xt(2, -1), Point::xt(2.5, 1));
  const Point p = Point::xt(2.1, 0.3);
  auto f = [&](const Point& y) {
    const Point z = p - y;
    return z.norm2() == 0.0 ? 0.0 : kernel_unchecked(KernelKind::P_CONJ, z);
  };
  CubatureOptions opt;
  opt.abs_tol = 1e-11;
  opt.rel_tol = 1e-10;
  const double q = integrate_box(f, cell, Singularity{p, 1.0}, opt).value;
  CHECK(cell_potential_2d(KernelKind::P_CONJ, cell, p) == doctest::Approx(q).epsilon(1e-8));
}
