#include <doctest.h>

#include <cmath>

#include "calcap/errors.hpp"
#include "calcap/kernels.hpp"
#include "calcap/quadrature.hpp"

using namespace calcap;

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int q : {3, 5, 7, 10}) {
    const GaussRule& r = gauss_legendre(q);
    REQUIRE(static_cast<int>(r.nodes.size()) == q);
    for (int deg = 0; deg < 2 * q; ++deg) {
      double s = 0.0;
      for (int k = 0; k < q; ++k) s += r.weights[k] * std::pow(r.nodes[k], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("smooth integrands") {
  const AxisBox b(Point::xt(0, 0), Point::xt(2, 1));
  auto f = [](const Point& p) { return std::exp(p[0]) * std::cos(p[1]); };
  const auto res = integrate_box(f, b);
  CHECK(res.value == doctest::Approx((std::exp(2.0) - 1.0) * std::sin(1.0)).epsilon(1e-12));

  const std::vector<double> lo{0, 0, 0}, hi{1, 2, 3};
  const AxisBox b3(Point::from_coords(lo), Point::from_coords(hi));
  auto g = [](const Point& p) { return p[0] * p[1] * p[1] + p[2]; };
  CHECK(integrate_box(g, b3).value == doctest::Approx(0.5 * 8.0 / 3.0 * 3.0 + 2.0 * 4.5).epsilon(1e-12));
  CHECK(integrate_box(f, AxisBox(Point::xt(0, 0), Point::xt(0, 1))).value == 0.0);
}

TEST_CASE("corner and interior singularities") {
  // int over [0,1]^2 of 1/|y| = 2 asinh(1)
  auto inv = [](const Point& p) { return 1.0 / p.norm(); };
  const AxisBox b(Point::xt(0, 0), Point::xt(1, 1));
  CubatureOptions opt;
  opt.abs_tol = 1e-9;
  opt.rel_tol = 1e-9;
  const auto res = integrate_box(inv, b, Singularity{Point::xt(0, 0), 1.0}, opt);
  CHECK(res.value == doctest::Approx(2.0 * std::asinh(1.0)).epsilon(1e-8));
  CHECK(res.error <= 1e-8);

  // the symmetric kernel over a square centred on the singularity: 4 * int_0^a int_0^a t/(2|y|^2)
  const AxisBox c(Point::xt(-1, -1), Point::xt(1, 1));
  auto ps = [](const Point& p) { return kernel_unchecked(KernelKind::P_SYM, p); };
  const auto sym = integrate_box(ps, c, Singularity{Point::xt(0, 0), 0.5}, opt);
  // int_0^1 int_0^1 t/(x^2+t^2) = ln2/2 + pi/4
  CHECK(sym.value == doctest::Approx(2.0 * (0.5 * std::log(2.0) + M_PI / 4.0)).epsilon(1e-8));
}

TEST_CASE("budget exhaustion reports the estimate") {
  auto inv = [](const Point& p) { return 1.0 / p.norm(); };
  const AxisBox b(Point::xt(0, 0), Point::xt(1, 1));
  CubatureOptions opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = 0.0;
  opt.max_boxes = 50;
  try {
    integrate_box(inv, b, Singularity{Point::xt(0, 0), 1.0}, opt);
    FAIL("expected a quadrature error");
  } catch (const QuadratureError& e) {
    CHECK(e.error_estimate() > 0.0);
    CHECK(e.estimate() > 1.0);
  }
}
