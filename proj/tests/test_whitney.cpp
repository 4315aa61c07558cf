#include <doctest.h>

#include <cmath>
#include <random>

#include "calcap/calibration.hpp"
#include "calcap/errors.hpp"
#include "calcap/whitney.hpp"

using namespace calcap;

namespace {

const BoxUnionSet kSquare(1, {AxisBox(Point::xt(0, 0), Point::xt(1, 1))});

BoxUnionSet two_squares(double gap) {
  return BoxUnionSet(1, {AxisBox(Point::xt(0, 0), Point::xt(1, 1)), AxisBox(Point::xt(1 + gap, 0), Point::xt(2 + gap, 1))});
}

double bell(const Point& p) {
  const double x = p[0] - 0.5, t = p[1] - 0.5;
  return 1.0 / (1.0 + x * x + t * t);
}

// n x n cells of side 1/64, inside on [lo, hi) on both axes
RegionMask square_region(std::int64_t n, std::int64_t lo, std::int64_t hi) {
  std::vector<std::uint8_t> in(static_cast<std::size_t>(n * n), 0);
  for (std::int64_t i = lo; i < hi; ++i) {
    for (std::int64_t j = lo; j < hi; ++j) in[static_cast<std::size_t>(i * n + j)] = 1;
  }
  std::array<std::int64_t, kMaxDim> dims{};
  dims[0] = dims[1] = n;
  return RegionMask(Point::xt(0, 0), 1.0 / 64.0, dims, std::move(in));
}

struct Fixture {
  BoxUnionSet set;
  CellMeasure mu0;
  double tau0;
};

const Fixture& two_square_measure() {
  static const Fixture f = [] {
    const BoxUnionSet e = two_squares(3.0);
    const VariationalProblem pr = make_variational_problem(e, 3);
    return Fixture{e, maximize_F(pr, 40, 1).mu0, pr.tau0};
  }();
  return f;
}

bool strictly_inside(const AxisBox& b, double lo, double hi) {
  for (int i = 0; i < 2; ++i) {
    if (b.min()[i] < lo || b.max()[i] > hi) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("superlevel set at zero is the whole domain") {
  const FieldGrid g = sample_field(bell, kSquare, 1.0 / 16.0, 1.0);
  const RegionMask m = superlevel_set(g, 0.0, kSquare, {4});
  CHECK(m.inside_count() == static_cast<std::size_t>(m.extent(0) * m.extent(1)));
  CHECK(m.shrinks == 0);
}

TEST_CASE("threshold above the field shrinks") {
  const FieldGrid g = sample_field(bell, kSquare, 1.0 / 16.0, 1.0);
  const RegionMask m = superlevel_set(g, 2.0, kSquare, {4});
  CHECK(m.shrinks > 0);
  CHECK(m.theta < 2.0);
  for (const Point& p : kSquare.sample_points(9)) {
    bool any = false;
    for (const MaskIndex& c : m.cells_at(p)) any = any || m.in(c);
    CHECK(any);
  }
}

TEST_CASE("field interpolation reproduces multilinear data") {
  auto lin = [](const Point& p) { return 2.0 + p[0] - 3.0 * p[1] + 0.5 * p[0] * p[1]; };
  const FieldGrid g = sample_field(lin, kSquare, 0.25, 0.5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int k = 0; k < 100; ++k) {
    const Point p = Point::xt(u(rng), u(rng));
    CHECK(g.interpolate(p) == doctest::Approx(lin(p)).epsilon(1e-12));
  }
}

TEST_CASE("mask contains E at the default threshold") {
  const VariationalProblem pr = make_variational_problem(kSquare, 3);
  const AscentResult r = maximize_F(pr, 30, 1);
  const WhitneyField field(r.mu0, pr.tau0);
  const std::vector<Point> pts = kSquare.sample_points(9);
  const std::vector<double> v = field.totals(pts);
  const double theta = 0.5 * *std::min_element(v.begin(), v.end());
  const RegionMask m = superlevel_set(sample_field(field, kSquare, kSquare.diameter() / 32.0), theta, kSquare);
  CHECK(m.shrinks == 0);
  for (const Point& p : kSquare.sample_points(17)) {
    for (const MaskIndex& c : m.cells_at(p)) CHECK(m.in(c));
  }
}

TEST_CASE("Whitney cubes of an open square") {
  const RegionMask m = square_region(256, 32, 224);
  const double lo = 0.5, hi = 3.5;
  const WhitneyDecomposition dec = whitney_decompose(m);
  REQUIRE(!dec.cubes.empty());

  std::vector<int> hits(256 * 256, 0);
  for (const MaskCube& q : dec.cubes) {
    const AxisBox b = q.box(m);
    CHECK(strictly_inside(b.scaled_about_center(20.0), lo, hi));
    CHECK_FALSE(strictly_inside(b.scaled_about_center(dec.worst_outer_factor), lo + 1e-12, hi - 1e-12));
    const std::int64_t s = std::int64_t{1} << q.level;
    for (std::int64_t i = q.index[0] * s; i < (q.index[0] + 1) * s; ++i) {
      for (std::int64_t j = q.index[1] * s; j < (q.index[1] + 1) * s; ++j) ++hits[i * 256 + j];
    }
  }
  CHECK(dec.worst_outer_factor <= 41.0);
  MESSAGE("cubes " << dec.cubes.size() << ", A = 40 misses " << dec.outer_failures << ", worst factor "
                   << dec.worst_outer_factor);

  // disjoint interiors, everything inside the region, every cell far from the boundary covered
  std::size_t covered = 0;
  for (std::int64_t i = 0; i < 256; ++i) {
    for (std::int64_t j = 0; j < 256; ++j) {
      const int h = hits[i * 256 + j];
      CHECK(h <= 1);
      const bool inside = i >= 32 && i < 224 && j >= 32 && j < 224;
      if (!inside) CHECK(h == 0);
      covered += h;
      const std::int64_t depth = std::min({i - 32, 223 - i, j - 32, 223 - j});
      if (depth >= 12) CHECK(h == 1);
    }
  }
  CHECK(covered + dec.unresolved_cells == m.inside_count());

  // touching cubes differ in side by at most 4
  for (std::size_t a = 0; a < dec.cubes.size(); ++a) {
    const AxisBox ba = dec.cubes[a].box(m);
    for (std::size_t b = a + 1; b < dec.cubes.size(); ++b) {
      const AxisBox bb = dec.cubes[b].box(m);
      bool touch = true;
      for (int i = 0; i < 2; ++i) touch = touch && ba.min()[i] <= bb.max()[i] && bb.min()[i] <= ba.max()[i];
      if (touch) CHECK(std::abs(dec.cubes[a].level - dec.cubes[b].level) <= 2);
    }
  }
}

TEST_CASE("overlap of dilated Whitney cubes") {
  const RegionMask m = square_region(256, 32, 224);
  const WhitneyDecomposition dec = whitney_decompose(m);
  std::vector<AxisBox> ten;
  for (const MaskCube& q : dec.cubes) ten.push_back(q.box(m).scaled_about_center(10.0));
  int brute = 0;
  for (const MaskCube& q : dec.cubes) {
    const Point c = q.box(m).center();
    int k = 0;
    for (const AxisBox& b : ten) k += b.contains(c);
    brute = std::max(brute, k);
  }
  CHECK(decomposition_overlap(dec, m, 10.0, 0, 1) == brute);
  const int overlap = decomposition_overlap(dec, m, 10.0, 10000, calibration::kOverlapSeed);
  MESSAGE("{10Q} overlap " << overlap);
  CHECK(overlap <= calibration::kWhitneyOverlapBound);
}

TEST_CASE("unbounded region is rejected") {
  const RegionMask m = square_region(64, 0, 64);
  CHECK_THROWS_AS(whitney_decompose(m), InputError);
}

TEST_CASE("cover selection fails when E misses the region") {
  const RegionMask m = square_region(256, 32, 224);
  const WhitneyDecomposition dec = whitney_decompose(m);
  const BoxUnionSet far(1, {AxisBox(Point::xt(10, 10), Point::xt(11, 11))});
  CHECK_THROWS_AS(select_cover(dec, m, far), ComputationError);
}

TEST_CASE("cover of two squares") {
  const Fixture& f = two_square_measure();
  const WhitneyField field(f.mu0, f.tau0);
  const WhitneyCover c = build_whitney_cover(f.set, field);
  REQUIRE(!c.cubes.empty());
  CHECK(c.theta > 0.0);
  CHECK(c.stats.p1);
  CHECK(c.stats.halves_disjoint);
  CHECK(c.stats.covers_samples);
  CHECK(c.stats.overlap5 <= calibration::kCoverOverlapBound);
  CHECK(c.cubes.size() == c.selected.size());
  for (std::size_t i = 0; i < c.cubes.size(); ++i) {
    // P1 recomputed from the boxes: (5/8) of each output cube meets E
    const AxisBox small = c.cubes[i].scaled_about_center(5.0 / 8.0);
    bool meets = false;
    for (const AxisBox& b : f.set.boxes()) meets = meets || intersect(small, b);
    CHECK(meets);
  }
  // every E sample lies in a cube
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const Point p = Point::xt(u(rng) + (k % 2 ? 4.0 : 0.0), u(rng));
    bool in = false;
    for (const AxisBox& q : c.cubes) in = in || q.contains(p);
    CHECK(in);
  }
  const CoverStats again = verify_cover(c, f.set, 10000, 9);
  CHECK(again.overlap5 <= calibration::kCoverOverlapBound);
  CHECK(again.covers_samples);
}

TEST_CASE("P4 cover has small cubes") {
  const Fixture& f = two_square_measure();
  const WhitneyField field(f.mu0, f.tau0);
  WhitneyOptions opt;
  opt.p4_hypothesis = true;
  const WhitneyCover c = build_whitney_cover(f.set, field, opt);
  CHECK(c.stats.p4_hypothesis);
  CHECK(c.stats.p4);
  CHECK(c.stats.p1);
  CHECK(c.stats.halves_disjoint);
  CHECK(c.stats.covers_samples);
  CHECK(c.stats.overlap5 <= calibration::kCoverOverlapBound);
  for (const AxisBox& q : c.cubes) CHECK(q.diameter() <= f.set.diameter() / 10.0);
}

TEST_CASE("capacity sum over a coarse cover") {
  // a low threshold and a wide field make the region large enough for unit-size cubes
  WhitneyOptions opt;
  opt.field_spacing = 1.0;
  opt.refine = 4;
  opt.theta = 0.03;
  LpCapacityOptions lp;
  lp.generation = 3;

  SUBCASE("single square") {
    const VariationalProblem pr = make_variational_problem(kSquare, 3);
    const WhitneyField field(maximize_F(pr, 40, 1).mu0, pr.tau0);
    opt.margin = 60.0;
    const WhitneyCover c = build_whitney_cover(kSquare, field, opt);
    REQUIRE(c.cubes.size() == 1);
    const CapacitySum s = capacity_sum_probe(c, kSquare, lp);
    CHECK(s.ratio == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("two far squares") {
    const BoxUnionSet e = two_squares(10.0);
    const VariationalProblem pr = make_variational_problem(e, 3);
    const WhitneyField field(maximize_F(pr, 40, 1).mu0, pr.tau0);
    opt.margin = 80.0;
    const WhitneyCover c = build_whitney_cover(e, field, opt);
    const CapacitySum s = capacity_sum_probe(c, e, lp);
    MESSAGE("cubes " << c.cubes.size() << " ratio " << s.ratio);
    CHECK(std::isfinite(s.ratio));
    CHECK(s.ratio >= 0.5);
    CHECK(s.ratio <= 4.0);
    lp.generation = 4;
    const CapacitySum finer = capacity_sum_probe(c, e, lp);
    MESSAGE("finer ratio " << finer.ratio);
    CHECK(finer.ratio <= 2.0 * s.ratio);
  }
}
