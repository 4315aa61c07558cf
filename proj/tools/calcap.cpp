#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "calcap/capacity.hpp"
#include "calcap/errors.hpp"
#include "calcap/io.hpp"
#include "calcap/kernels.hpp"
#include "calcap/rect2d.hpp"
#include "calcap/variational.hpp"
#include "calcap/verify.hpp"
#include "calcap/whitney.hpp"

using namespace calcap;

namespace {

enum Exit { kOk = 0, kComputation = 1, kConfig = 2 };

void parse_grid(const std::string& spec, RunConfig& cfg) {
  const auto x = spec.find_first_of("xX");
  if (x == std::string::npos) throw InputError("grid must look like WxH, got '" + spec + "'");
  try {
    std::size_t used = 0;
    cfg.grid_x = std::stoi(spec.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(spec);
    const std::string rest = spec.substr(x + 1);
    cfg.grid_t = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(spec);
  } catch (const std::logic_error&) {
    throw InputError("grid must look like WxH, got '" + spec + "'");
  }
}

void emit(const RunConfig& cfg, const std::string& doc) {
  if (cfg.out_path.empty()) return;
  write_text_file(cfg.out_path, doc);
  std::printf("wrote %s\n", cfg.out_path.c_str());
}

int kernel_eval(const RunConfig& cfg) {
  if (cfg.point.empty()) throw InputError("--point is required");
  const Point p = Point::from_coords(cfg.point);
  const KernelKind kind = kernel_kind_from_string(cfg.kernel);
  const double v = cfg.tau > 0.0 ? eval_regularized(kind, p, cfg.tau, BumpProfile{}) : eval_kernel(kind, p);
  std::printf("%.17g\n", v);
  return kOk;
}

int rect_capacity(const RunConfig& cfg) {
  const NormalizedRect rect = NormalizedRect::from_sides(cfg.lx, cfg.lt);
  const double r = rect.r, M = rect_max_M(r), m = rect_min_m(r);
  std::printf("capacity %.12g\n", capacity_formula(cfg.lx, cfg.lt));
  std::printf("r %.12g\nM(r) %.12g\nm(r) %.12g\n", r, M, m);
  std::printf("bracket [%.12g, %.12g]\n", cfg.lt * r / M, cfg.lt * 2.0 * r / m);
  emit(cfg, rect_artifact(cfg.lx, cfg.lt, cfg));
  return kOk;
}

int potential_surface(const RunConfig& cfg) {
  if (cfg.out_path.empty()) throw InputError("--out is required");
  const SurfaceGrid s = rect_surface(cfg.r, cfg.grid_x, cfg.grid_t, kernel_kind_from_string(cfg.kernel));
  export_surface(s, cfg.out_path, cfg);
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.values.size(); ++k) {
    if (s.values[k] > s.values[best]) best = k;
  }
  std::printf("rows %zu, max %.12g at (%.12g, %.12g)\nwrote %s\n", s.values.size(), s.values[best],
              s.xs[best / s.ts.size()], s.ts[best % s.ts.size()], cfg.out_path.c_str());
  return kOk;
}

int estimate(const RunConfig& cfg) {
  const BoxUnionSet set = read_set_json(cfg.set_path);
  LpCapacityOptions lp;
  lp.generation = cfg.generation;
  lp.safety = cfg.safety;
  lp.both_kernels = cfg.both_kernels;
  DualityOptions dual;
  dual.gap = cfg.gap;
  const CapacityBracket b = estimate_capacity(set, lp, dual);
  std::printf("%s in [%.10g, %.10g]\n", b.capacity.c_str(), b.lower, b.upper);
  std::printf("cells %zu, potential rows %zu, growth rows %zu, verify violation %.3g, hausdorff content %.6g\n",
              b.constraint_report.cells, b.constraint_report.potential_rows, b.constraint_report.growth_rows,
              b.constraint_report.max_violation, b.hausdorff_content);
  emit(cfg, bracket_artifact(b, cfg));
  return kOk;
}

int variational(const RunConfig& cfg) {
  const BoxUnionSet set = read_set_json(cfg.set_path);
  const VariationalProblem pr = make_variational_problem(set, cfg.generation, cfg.tau0);
  const AscentResult r = maximize_F(pr, cfg.iterations, cfg.seed);
  std::printf("F %.10g (start %.10g), mass %.10g, energy %.10g, accepted %d, rescalings %d\n", r.value,
              r.start_value, r.mass, r.energy, r.accepted, r.rescalings);
  emit(cfg, measure_artifact(r.mu0, pr.tau0, cfg, &r));
  return kOk;
}

int whitney(const RunConfig& cfg) {
  if (cfg.mu0_path.empty()) throw InputError("--mu0 is required");
  const BoxUnionSet set = read_set_json(cfg.set_path);
  const MeasureFile mf = read_measure_json(cfg.mu0_path);
  double tau0 = cfg.tau0 > 0.0 ? cfg.tau0 : mf.tau0;
  if (!(tau0 > 0.0)) tau0 = 0.25 * mf.measure.min_cell_width();
  const WhitneyField field(mf.measure, tau0, BumpProfile{}, 2, cfg.seed);
  WhitneyOptions opt;
  opt.p4_hypothesis = cfg.p4_hypothesis;
  opt.seed = cfg.seed;
  const WhitneyCover c = build_whitney_cover(set, field, opt);
  const CoverStats& s = c.stats;
  std::printf("theta %.6g, %zu cubes, overlap %d, diam ratio %.4g, P1 %s, disjoint %s, covers %s%s\n", c.theta,
              s.count, s.overlap5, s.max_diam_ratio, s.p1 ? "yes" : "no", s.halves_disjoint ? "yes" : "no",
              s.covers_samples ? "yes" : "no", c.truncated ? ", region truncated" : "");
  emit(cfg, cover_artifact(c, cfg));
  return s.p1 && s.halves_disjoint && s.covers_samples ? kOk : kComputation;
}

int verify(const RunConfig& cfg) {
  int failed = 0;
  for (int id : suite_criteria(cfg.suite)) {
    const CriterionResult r = run_criterion(id, cfg.seed);
    std::printf("%s\n", format_result(r).c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  std::printf("%s: %d failed\n", cfg.suite.c_str(), failed);
  return failed == 0 ? kOk : kComputation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"calcap: capacity estimates for the 1/2-heat kernel"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  RunConfig cfg;
  std::string grid = "101x101";
  app.add_option("--seed", cfg.seed, "seed for every stochastic step");

  auto* ke = app.add_subcommand("kernel-eval", "evaluate P, P_CONJ or P_SYM at a point");
  ke->add_option("--kernel", cfg.kernel, "P, P_CONJ or P_SYM");
  ke->add_option("--point", cfg.point, "coordinates x_1..x_n,t")->delimiter(',')->required();
  ke->add_option("--tau", cfg.tau, "regularization scale (0: plain kernel)");

  auto* rc = app.add_subcommand("rect-capacity", "closed-form capacity of an lx by lt rectangle");
  rc->add_option("--lx", cfg.lx)->required();
  rc->add_option("--lt", cfg.lt)->required();
  rc->add_option("--out", cfg.out_path, "JSON artifact");

  auto* ps = app.add_subcommand("potential-surface", "CSV of the rectangle potential on [-2r,3r]x[-2,3]");
  ps->add_option("--r", cfg.r)->required();
  ps->add_option("--grid", grid, "WxH nodes");
  ps->add_option("--kernel", cfg.kernel, "P, P_CONJ or P_SYM");
  ps->add_option("--out", cfg.out_path)->required();

  auto* ec = app.add_subcommand("estimate-capacity", "LP lower bound and duality upper bound");
  ec->add_option("--set", cfg.set_path)->required();
  ec->add_option("--generation", cfg.generation);
  ec->add_option("--safety", cfg.safety);
  ec->add_option("--gap", cfg.gap);
  ec->add_flag("--both-kernels", cfg.both_kernels, "impose P and P* rows");
  ec->add_option("--out", cfg.out_path);

  auto* va = app.add_subcommand("variational", "maximize F over growth-bounded cell densities");
  va->add_option("--set", cfg.set_path)->required();
  va->add_option("--generation", cfg.generation);
  va->add_option("--iterations", cfg.iterations);
  va->add_option("--tau0", cfg.tau0, "0 picks a quarter of the cell side");
  va->add_option("--out", cfg.out_path);

  auto* wh = app.add_subcommand("whitney", "Whitney cover of E from mu0");
  wh->add_option("--set", cfg.set_path)->required();
  wh->add_option("--mu0", cfg.mu0_path)->required();
  wh->add_option("--tau0", cfg.tau0, "overrides the tau0 stored with mu0");
  wh->add_flag("--p4", cfg.p4_hypothesis, "restrict to a diam(E)/40 neighbourhood");
  wh->add_option("--out", cfg.out_path);

  auto* ve = app.add_subcommand("verify", "run acceptance checks");
  ve->add_option("--suite", cfg.suite, "rect, kernels, capacity, variational, whitney or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kConfig;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.command == "potential-surface") parse_grid(grid, cfg);
    cfg.validate();
    if (cfg.command == "kernel-eval") return kernel_eval(cfg);
    if (cfg.command == "rect-capacity") return rect_capacity(cfg);
    if (cfg.command == "potential-surface") return potential_surface(cfg);
    if (cfg.command == "estimate-capacity") return estimate(cfg);
    if (cfg.command == "variational") return variational(cfg);
    if (cfg.command == "whitney") return whitney(cfg);
    return verify(cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kComputation;
  }
}
