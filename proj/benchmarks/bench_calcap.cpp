#include <benchmark/benchmark.h>

#include <random>

#include "calcap/capacity.hpp"
#include "calcap/kernels.hpp"
#include "calcap/lp.hpp"
#include "calcap/measures.hpp"
#include "calcap/rect2d.hpp"
#include "calcap/variational.hpp"
#include "calcap/whitney.hpp"

using namespace calcap;

namespace {

const BoxUnionSet kSquare(1, {AxisBox(Point::xt(0, 0), Point::xt(1, 1))});

std::vector<Point> random_points(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  std::vector<Point> out;
  for (int k = 0; k < count; ++k) out.push_back(Point::xt(u(rng), u(rng)));
  return out;
}

}  // namespace

static void KernelEval(benchmark::State& state) {
  const auto pts = random_points(1024, 1);
  for (auto _ : state) {
    double s = 0.0;
    for (const Point& p : pts) s += eval_kernel(KernelKind::P_SYM, p);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(KernelEval);

static void RectPotential(benchmark::State& state) {
  const auto rect = NormalizedRect::unit_height(0.5);
  const auto pts = random_points(1024, 2);
  for (auto _ : state) {
    double s = 0.0;
    for (const Point& p : pts) s += rect_potential(rect, p);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(RectPotential);

static void CellPotentialQuadrature(benchmark::State& state) {
  const AxisBox cell(Point::xt(0, 0), Point::xt(1, 1));
  const auto pts = random_points(16, 3);
  for (auto _ : state) {
    double s = 0.0;
    for (const Point& p : pts) s += cell_potential(KernelKind::P, cell, p, 1e-8, PotentialMethod::Quadrature);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(CellPotentialQuadrature)->Unit(benchmark::kMillisecond);

static void SimplexDense(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LpProblem lp;
  lp.cols = m;
  lp.c.assign(m, 1.0);
  for (int i = 0; i < m; ++i) {
    std::vector<double> row(m);
    for (double& v : row) v = u(rng);
    lp.add_row(row, 1.0 + u(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(lp).objective);
  state.SetComplexityN(m);
}
BENCHMARK(SimplexDense)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond)->Complexity();

static void LowerBoundLp(benchmark::State& state) {
  LpCapacityOptions opt;
  opt.generation = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lower_bound_lp(kSquare, opt).value);
}
BENCHMARK(LowerBoundLp)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void AscentSteps(benchmark::State& state) {
  const VariationalProblem pr = make_variational_problem(kSquare, 3);
  for (auto _ : state) benchmark::DoNotOptimize(maximize_F(pr, 10, 1).value);
}
BENCHMARK(AscentSteps)->Unit(benchmark::kMillisecond);

static void WhitneyDecompose(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  std::vector<std::uint8_t> in(static_cast<std::size_t>(n * n), 0);
  for (std::int64_t i = n / 8; i < n - n / 8; ++i) {
    for (std::int64_t j = n / 8; j < n - n / 8; ++j) in[static_cast<std::size_t>(i * n + j)] = 1;
  }
  std::array<std::int64_t, kMaxDim> dims{};
  dims[0] = dims[1] = n;
  const RegionMask mask(Point::xt(0, 0), 1.0 / 64.0, dims, in);
  for (auto _ : state) benchmark::DoNotOptimize(whitney_decompose(mask).cubes.size());
  state.SetComplexityN(n * n);
}
BENCHMARK(WhitneyDecompose)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond)->Complexity();

BENCHMARK_MAIN();
