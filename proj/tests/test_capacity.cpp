#include <doctest.h>

#include <cmath>

#include "calcap/capacity.hpp"
#include "calcap/errors.hpp"
#include "calcap/rect2d.hpp"

using namespace calcap;

namespace {

BoxUnionSet rect(double x0, double t0, double x1, double t1) {
  return BoxUnionSet(1, {AxisBox(Point::xt(x0, t0), Point::xt(x1, t1))});
}

LpCapacityOptions gen(int g) {
  LpCapacityOptions o;
  o.generation = g;
  return o;
}

}  // namespace

TEST_CASE("unit square lower bound and witness") {
  const LowerBound lb = lower_bound_lp(rect(0, 0, 1, 1), gen(4));
  CHECK(lb.value >= 0.9 / rect_max_M(1.0));
  CHECK(lb.report.cells == 256);
  CHECK(lb.report.max_potential_solve <= 1.0 / 1.1 + 1e-9);
  CHECK(lb.report.max_potential_verify <= 1.0 + lb.report.safety);
  CHECK(lb.report.max_violation == 0.0);
  CHECK(lb.report.growth_worst_ratio <= 1.0 + 1e-9);
  CHECK(lb.witness.max_density() <= lb.report.density_cap * (1 + 1e-12));
  CHECK(lb.witness.total_mass() == doctest::Approx(lb.value).epsilon(1e-12));
  // scaled Lebesgue is feasible for the potential rows, so the optimum dominates its mass
  CHECK(lb.value >= 1.0 / (1.1 * rect_max_M(1.0)));
}

TEST_CASE("lower bound is deterministic") {
  const LowerBound a = lower_bound_lp(rect(0, 0, 1, 1), gen(3));
  const LowerBound b = lower_bound_lp(rect(0, 0, 1, 1), gen(3));
  CHECK(a.value == b.value);
  CHECK(a.witness.densities() == b.witness.densities());
}

TEST_CASE("thin segment capacity decreases under refinement") {
  const BoxUnionSet seg = rect(0.5, 0, 0.5, 1);
  double prev = INFINITY;
  for (int g = 2; g <= 5; ++g) {
    const double v = lower_bound_lp(seg, gen(g)).value;
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 0.3);
}

TEST_CASE("far translate nearly doubles the bound") {
  const double one = lower_bound_lp(rect(0, 0, 1, 1), gen(3)).value;
  const BoxUnionSet two(1, {AxisBox(Point::xt(0, 0), Point::xt(1, 1)), AxisBox(Point::xt(4, 0), Point::xt(5, 1))});
  CHECK(lower_bound_lp(two, gen(3)).value >= 1.9 * one);
}

TEST_CASE("monotone under inclusion") {
  const double small = lower_bound_lp(rect(0, 0, 1, 1), gen(3)).value;
  const double big = lower_bound_lp(rect(0, 0, 2, 1), gen(3)).value;
  CHECK(small <= big + 1e-9);
}

TEST_CASE("scaling law") {
  const double v = lower_bound_lp(rect(0, 0, 1, 1), gen(3)).value;
  LpCapacityOptions o = gen(3);
  o.lattice.base_scale = 2.0;
  const double w = lower_bound_lp(rect(0, 0, 2, 2), o).value;
  CHECK(w == doctest::Approx(2.0 * v).epsilon(1e-8));
}

TEST_CASE("duality upper bound") {
  const BoxUnionSet sq = rect(0, 0, 1, 1);
  DualityOptions d;
  const UpperBound ub = upper_bound_duality(sq, CellMeasure::lebesgue(sq), d);
  const double exact = 2.0 / rect_min_m(1.0);
  CHECK(ub.value >= exact * (1 - 1e-9));
  CHECK(ub.value <= exact * (1 + d.gap) * (1 + 1e-9));
  CHECK(ub.certified_inf <= ub.best_sample);
  CHECK(ub.best_sample == doctest::Approx(rect_min_m(1.0) / 2).epsilon(1e-9));

  const UpperBound scaled = upper_bound_duality(sq, CellMeasure::lebesgue(sq, 3.5), d);
  CHECK(scaled.value == doctest::Approx(ub.value).epsilon(1e-9));

  const BoxUnionSet two(1, {AxisBox(Point::xt(0, 0), Point::xt(1, 1)), AxisBox(Point::xt(4, 0), Point::xt(5, 1))});
  const UpperBound both = upper_bound_duality(two, CellMeasure::lebesgue(two), d);
  CHECK(std::isfinite(both.value));
  CHECK(both.value >= ub.value);
}

TEST_CASE("duality errors") {
  const BoxUnionSet sq = rect(0, 0, 1, 1);
  // reference far above E: its symmetric potential on E is tiny but positive, and the modulus swamps it
  const BoxUnionSet far = rect(0, 1000, 1e-3, 1000.001);
  DualityOptions d;
  d.max_boxes = 2000;
  CHECK_THROWS_AS(upper_bound_duality(sq, CellMeasure::lebesgue(far, 1e6), d), ComputationError);
  CHECK_THROWS_AS(upper_bound_duality(BoxUnionSet(1, {}), CellMeasure::lebesgue(sq), d), InputError);
}

TEST_CASE("Hausdorff content") {
  const HausdorffContent sq = hausdorff_content_upper(rect(0, 0, 1, 1), 0, 0);
  CHECK(sq.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(hausdorff_content_upper(BoxUnionSet(1, {}), 0, 3).value == 0.0);
  double prev = INFINITY;
  for (int k = 1; k <= 6; ++k) {
    const double v = hausdorff_content_upper(rect(0, 0, std::ldexp(1.0, -k), 1), 0, 8).value;
    CHECK(v <= prev);
    // a unit-height set still needs cubes of total diameter about its height
    CHECK(v >= 1.0);
    prev = v;
  }
}

TEST_CASE("semi-additivity probe") {
  const BoxUnionSet a = rect(0, 0, 1, 1), far = rect(4, 0, 5, 1), adj = rect(1, 0, 2, 1);
  const SemiAdditivity pair = semi_additivity_probe({a, far}, gen(3));
  CHECK(pair.ratio >= 0.9);
  CHECK(pair.ratio <= 1.1);
  CHECK(semi_additivity_probe({a}, gen(3)).ratio == 1.0);
  const SemiAdditivity side = semi_additivity_probe({a, adj}, gen(3));
  CHECK(side.ratio <= 4.0);
  CHECK(side.within_constant);
  CHECK_THROWS_AS(semi_additivity_probe({a, rect(0.5, 0.5, 1.5, 1.5)}, gen(3)), InputError);
}

TEST_CASE("rectangle sandwich") {
  struct Case {
    double r;
    int g;
  };
  for (const Case c : {Case{0.25, 5}, Case{0.5, 4}, Case{1.0, 4}, Case{2.0, 3}, Case{4.0, 3}}) {
    CAPTURE(c.r);
    const BoxUnionSet e = rect(0, 0, c.r, 1);
    const CapacityBracket b = estimate_capacity(e, gen(c.g));
    const double low = 0.9 * c.r / rect_max_M(c.r);
    const double high = 2.0 * c.r / rect_min_m(c.r) * (1 + DualityOptions{}.gap) * (1 + 1e-9);
    CHECK(b.lower >= low);
    CHECK(b.lower <= b.upper);
    CHECK(b.upper <= high);
    CHECK(b.upper / b.lower <= 2.0 * rect_max_M(c.r) / (0.9 * rect_min_m(c.r)) * (1 + DualityOptions{}.gap));
    // r/m(r) bounds the capacity with both P and P* rows; the symmetric rows alone may exceed it
    LpCapacityOptions both = gen(c.g);
    both.both_kernels = true;
    const double lb2 = lower_bound_lp(e, both).value;
    CHECK(lb2 >= low);
    CHECK(lb2 <= c.r / rect_min_m(c.r));
    CHECK(lb2 <= b.lower + 1e-9);
  }
}

TEST_CASE("bracket on a set off the dyadic grid") {
  const CapacityBracket b = estimate_capacity(rect(0.1, 0.2, 0.9, 0.7), gen(3));
  CHECK(b.lower > 0.0);
  CHECK(b.lower <= b.upper);
  CHECK(b.hausdorff_content > 0.0);
}
