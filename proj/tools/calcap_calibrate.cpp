// Measures the empirical constants frozen in calibration.hpp and prints a replacement block.
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "calcap/calibration.hpp"
#include "calcap/kernels.hpp"
#include "calcap/whitney.hpp"

using namespace calcap;

namespace {

RegionMask box_region(std::int64_t n, std::int64_t lo0, std::int64_t hi0, std::int64_t lo1, std::int64_t hi1) {
  std::vector<std::uint8_t> in(static_cast<std::size_t>(n * n), 0);
  for (std::int64_t i = lo0; i < hi0; ++i) {
    for (std::int64_t j = lo1; j < hi1; ++j) in[static_cast<std::size_t>(i * n + j)] = 1;
  }
  std::array<std::int64_t, kMaxDim> dims{};
  dims[0] = dims[1] = n;
  return RegionMask(Point::xt(0, 0), 1.0 / 64.0, dims, std::move(in));
}

struct Named {
  std::string name;
  BoxUnionSet set;
};

std::vector<Named> battery() {
  auto sq = [](double x, double t, double s) { return AxisBox(Point::xt(x, t), Point::xt(x + s, t + s)); };
  return {
      {"unit square", BoxUnionSet(1, {sq(0, 0, 1)})},
      {"two squares, gap 3", BoxUnionSet(1, {sq(0, 0, 1), sq(4, 0, 1)})},
      {"two squares, gap 1", BoxUnionSet(1, {sq(0, 0, 1), sq(2, 0, 1)})},
      {"L shape", BoxUnionSet(1, {AxisBox(Point::xt(0, 0), Point::xt(2, 0.5)), AxisBox(Point::xt(0, 0.5), Point::xt(0.5, 2))})},
      {"three squares", BoxUnionSet(1, {sq(0, 0, 1), sq(3, 0, 0.5), sq(1, 3, 1)})},
      {"rectangle 4x1", BoxUnionSet(1, {AxisBox(Point::xt(0, 0), Point::xt(4, 1))})},
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"calcap constant calibration"};
  int cz_samples = 1000000;
  int overlap_samples = 10000;
  int iterations = 40;
  double headroom = 1.1;
  app.add_option("--cz-samples", cz_samples, "triples for the CZ smoothness probe");
  app.add_option("--overlap-samples", overlap_samples, "random probe points per overlap count");
  app.add_option("--iterations", iterations, "ascent steps for each mu0");
  app.add_option("--headroom", headroom, "factor applied to the largest observed overlap");
  CLI11_PARSE(app, argc, argv);

  const std::uint64_t cz_seed = calibration::kCzSeed;
  const std::uint64_t ov_seed = calibration::kOverlapSeed;

  const double cz = cz_smoothness_probe(KernelKind::P, 1, cz_samples, cz_seed);
  std::printf("cz smoothness, P, n=1, %d triples: %.4f\n", cz_samples, cz);

  int whitney_max = 0, cover_max = 0;
  for (const auto& [name, m] : std::vector<std::pair<std::string, RegionMask>>{
           {"square region", box_region(256, 32, 224, 32, 224)},
           {"offset square region", box_region(256, 21, 203, 37, 230)},
           {"slab region", box_region(256, 40, 216, 100, 156)}}) {
    const WhitneyDecomposition dec = whitney_decompose(m);
    const int ov = decomposition_overlap(dec, m, 10.0, overlap_samples, ov_seed);
    whitney_max = std::max(whitney_max, ov);
    std::printf("%-28s cubes %6zu  {10Q} overlap %d\n", name.c_str(), dec.cubes.size(), ov);
  }
  for (const Named& e : battery()) {
    const VariationalProblem pr = make_variational_problem(e.set, 3);
    const WhitneyField field(maximize_F(pr, iterations, 1).mu0, pr.tau0);
    for (bool p4 : {false, true}) {
      WhitneyOptions opt;
      opt.p4_hypothesis = p4;
      opt.samples = overlap_samples;
      opt.seed = ov_seed;
      const WhitneyCover c = build_whitney_cover(e.set, field, opt);
      SuperlevelOptions so;
      if (p4) so.restrict_radius = opt.p4_fraction * e.set.diameter();
      cover_max = std::max(cover_max, c.stats.overlap5);
      const RegionMask m = superlevel_set(c.field, c.theta, e.set, so);
      int ov = 0;
      if (!p4) {
        // the decomposition over the untruncated superlevel set of the same field
        try {
          ov = decomposition_overlap(whitney_decompose(m), m, 10.0, overlap_samples, ov_seed);
          whitney_max = std::max(whitney_max, ov);
        } catch (const std::exception&) {
          ov = -1;
        }
      }
      std::printf("%-20s p4=%d  selected %5zu  {5Q_i} overlap %3d  {10Q} overlap %3d  diam ratio %.4f\n", e.name.c_str(),
                  p4, c.cubes.size(), c.stats.overlap5, ov, c.stats.max_diam_ratio);
    }
  }
  const int whitney_bound = static_cast<int>(std::ceil(headroom * whitney_max));
  const int cover_bound = static_cast<int>(std::ceil(headroom * cover_max));
  std::printf("\n// paste into core/include/calcap/calibration.hpp\n");
  std::printf("// CZ smoothness of P, n = 1: largest ratio over %d triples was %.2f (seed %llu)\n", cz_samples, cz,
              static_cast<unsigned long long>(cz_seed));
  std::printf("// {10 Q_j} max %d, {5 Q_i} max %d, headroom %.2f (seed %llu)\n", whitney_max, cover_max, headroom,
              static_cast<unsigned long long>(ov_seed));
  std::printf("inline constexpr int kWhitneyOverlapBound = %d;\n", whitney_bound);
  std::printf("inline constexpr int kCoverOverlapBound = %d;\n", cover_bound);
  return 0;
}
