#include "calcap/capacity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

#include "calcap/errors.hpp"
#include "calcap/parallel.hpp"

namespace calcap {

namespace {

using Index = std::array<std::int64_t, kMaxDim>;

// merges boxes that abut along `axis` and agree on every other axis
std::vector<AxisBox> merge_along(std::vector<AxisBox> boxes, int axis) {
  auto key = [axis](const AxisBox& b) {
    std::vector<double> k;
    for (int i = 0; i < b.dim(); ++i) {
      if (i == axis) continue;
      k.push_back(b.min()[i]);
      k.push_back(b.max()[i]);
    }
    k.push_back(b.min()[axis]);
    return k;
  };
  std::sort(boxes.begin(), boxes.end(), [&](const AxisBox& a, const AxisBox& b) { return key(a) < key(b); });
  std::vector<AxisBox> out;
  for (const AxisBox& b : boxes) {
    if (!out.empty()) {
      const AxisBox& last = out.back();
      bool same = last.max()[axis] == b.min()[axis];
      for (int i = 0; i < b.dim() && same; ++i) {
        if (i != axis) same = last.min()[i] == b.min()[i] && last.max()[i] == b.max()[i];
      }
      if (same) {
        out.back() = AxisBox(last.min(), b.max());
        continue;
      }
    }
    out.push_back(b);
  }
  return out;
}

// E_0 with cubes merged into larger boxes, so reference measures stay small
BoxUnionSet merged_cover(const std::vector<DyadicCube>& cubes, int n) {
  std::vector<AxisBox> boxes;
  for (const DyadicCube& q : cubes) boxes.push_back(q.box());
  for (int axis = 0; axis <= n; ++axis) boxes = merge_along(std::move(boxes), axis);
  return BoxUnionSet(n, std::move(boxes));
}

// lattice origin + side/ppc * k over the cells grown by `margin` cells in sup-norm
std::vector<Point> constraint_lattice(const std::vector<DyadicCube>& cubes, int ppc, int margin) {
  std::set<Index> keys;
  const int d = cubes.front().n + 1;
  for (const DyadicCube& q : cubes) {
    Index lo{}, hi{}, k{};
    for (int i = 0; i < d; ++i) {
      lo[i] = ppc * (q.index[i] - margin);
      hi[i] = ppc * (q.index[i] + 1 + margin);
      k[i] = lo[i];
    }
    while (true) {
      keys.insert(k);
      int a = d - 1;
      while (a >= 0 && ++k[a] > hi[a]) {
        k[a] = lo[a];
        --a;
      }
      if (a < 0) break;
    }
  }
  const DyadicCube& ref = cubes.front();
  const double step = ref.side() / ppc;
  std::vector<Point> pts;
  pts.reserve(keys.size());
  for (const Index& k : keys) {
    Point p(ref.n);
    for (int i = 0; i < d; ++i) p[i] = ref.origin_shift[i] + step * static_cast<double>(k[i]);
    pts.push_back(p);
  }
  return pts;
}

double max_potential(KernelKind kind, const CellMeasure& mu, const std::vector<Point>& pts) {
  std::vector<double> v(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    double s = 0.0;
    for (const Cell& c : mu.cells()) {
      if (c.density > 0.0) s += c.density * cell_potential(kind, c.box, pts[i], 1e-9);
    }
    v[i] = s;
  });
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

LowerBound lower_bound_lp(const BoxUnionSet& set, const LpCapacityOptions& opt) {
  if (!(opt.safety >= 0.0)) throw InputError("safety factor must be nonnegative");
  if (opt.points_per_cell < 1 || opt.margin_cells < 0 || opt.verify_refinement < 1) {
    throw InputError("constraint lattice parameters must be positive");
  }
  if (!(opt.growth_constant > 0.0)) throw InputError("growth constant must be positive");
  LowerBound out;
  ConstraintReport& rep = out.report;
  rep.safety = opt.safety;
  rep.both_kernels = opt.both_kernels;
  const int n = set.n();
  if (set.empty()) {
    out.witness = CellMeasure(n, {});
    return out;
  }
  const std::vector<DyadicCube> cubes = dyadic_cover(set, opt.generation, opt.lattice);
  const std::size_t nc = cubes.size();
  rep.cells = nc;
  std::vector<AxisBox> boxes;
  boxes.reserve(nc);
  for (const DyadicCube& q : cubes) boxes.push_back(q.box());
  const double side = cubes.front().side();
  const double vol = std::pow(side, n + 1);
  const double omega = unit_ball_volume(n + 1);
  const double r_min = 0.5 * side;
  const double dmax = 1.0 / (omega * r_min);
  rep.density_cap = dmax;

  LpProblem lp;
  lp.cols = static_cast<int>(nc);
  lp.c.assign(nc, 1.0);

  // potential rows, mass variables m_j = density_j * vol
  const std::vector<Point> solve_pts = constraint_lattice(cubes, opt.points_per_cell, opt.margin_cells);
  rep.solve_spacing = side / opt.points_per_cell;
  std::vector<KernelKind> kinds = opt.both_kernels ? std::vector<KernelKind>{KernelKind::P, KernelKind::P_CONJ}
                                                   : std::vector<KernelKind>{KernelKind::P_SYM};
  const double bound = 1.0 / (1.0 + opt.safety);
  for (KernelKind kind : kinds) {
    std::vector<double> block(solve_pts.size() * nc);
    parallel_for(solve_pts.size(), [&](std::size_t i) {
      for (std::size_t j = 0; j < nc; ++j) block[i * nc + j] = cell_potential(kind, boxes[j], solve_pts[i], 1e-11) / vol;
    });
    for (std::size_t i = 0; i < solve_pts.size(); ++i) {
      lp.add_row(std::vector<double>(block.begin() + i * nc, block.begin() + (i + 1) * nc), bound);
      ++rep.potential_rows;
    }
  }

  // growth rows mu(B) <= C r^n
  const double diam = merged_cover(cubes, n).diameter();
  const GrowthFamily fam = mandated_growth_family(boxes, diam);
  const GrowthRows gr = growth_rows(boxes, fam);
  const std::size_t nrows = gr.rows();
  double full_rhs = INFINITY;
  for (std::size_t k = 0; k < nrows; ++k) {
    const double r = gr.radius[k];
    const double rhs = opt.growth_constant * std::pow(r, n);
    double capped = 0.0;
    bool full = true;
    const double* row = &gr.fraction[k * nc];
    for (std::size_t j = 0; j < nc; ++j) {
      capped += row[j] * dmax * vol;
      if (row[j] < 1.0) full = false;
    }
    if (capped <= rhs) {
      ++rep.pruned_growth_rows;
      continue;
    }
    if (full) {
      // balls containing every cell all bound the total mass; keep the tightest
      if (rhs < full_rhs) full_rhs = rhs;
      ++rep.pruned_growth_rows;
      continue;
    }
    lp.add_row(std::vector<double>(row, row + nc), rhs);
    ++rep.growth_rows;
  }
  if (std::isfinite(full_rhs)) {
    lp.add_row(std::vector<double>(nc, 1.0), full_rhs);
    ++rep.growth_rows;
    --rep.pruned_growth_rows;
  }
  for (std::size_t j = 0; j < nc; ++j) {
    std::vector<double> row(nc, 0.0);
    row[j] = 1.0;
    lp.add_row(row, dmax * vol);
    ++rep.cap_rows;
  }

  const LpResult sol = solve_lp(lp, opt.lp);
  rep.lp_iterations = sol.iterations;
  rep.lp_degenerate_pivots = sol.degenerate_pivots;
  rep.lp_residual = sol.max_violation;

  std::vector<double> dens(nc);
  for (std::size_t j = 0; j < nc; ++j) dens[j] = std::max(0.0, sol.x[j]) / vol;
  out.witness = CellMeasure::on_cubes(cubes, n, dens);
  out.value = 0.0;
  for (double m : sol.x) out.value += std::max(0.0, m);

  double solve_max = 0.0, verify_max = 0.0;
  const std::vector<Point> verify_pts =
      constraint_lattice(cubes, opt.points_per_cell * opt.verify_refinement, opt.margin_cells);
  rep.verify_points = verify_pts.size();
  rep.verify_spacing = rep.solve_spacing / opt.verify_refinement;
  std::vector<KernelKind> check = kinds;
  for (KernelKind kind : check) {
    solve_max = std::max(solve_max, max_potential(kind, out.witness, solve_pts));
    verify_max = std::max(verify_max, max_potential(kind, out.witness, verify_pts));
  }
  rep.max_potential_solve = solve_max;
  rep.max_potential_verify = verify_max;
  rep.max_violation = std::max(0.0, verify_max - 1.0);
  if (out.value > 0.0) {
    rep.growth_worst_ratio = growth_check(out.witness, opt.growth_constant, fam.centers, fam.radii).worst_ratio;
  }
  return out;
}

double potential_modulus(int n, double density_bound, double h, double reach) {
  if (h <= 0.0) return 0.0;
  const double sigma = unit_sphere_area(n + 1);
  const double far = reach > 2.0 * h ? std::log(reach / (2.0 * h)) : 0.0;
  return density_bound * h * sigma * (2.5 + (n + 2) * std::ldexp(1.0, n) * far);
}

UpperBound upper_bound_duality(const BoxUnionSet& set, const CellMeasure& ref, const DualityOptions& opt) {
  if (set.empty()) throw InputError("duality bound needs a nonempty set");
  if (ref.empty() || !(ref.total_mass() > 0.0)) throw InputError("reference measure must have positive mass");
  if (ref.n() != set.n()) throw InputError("set and reference measure dimensions differ");
  const int n = set.n();
  UpperBound out;
  out.gap = opt.gap;
  // mass of the reference on E
  double mass = 0.0;
  for (const Cell& c : ref.cells()) {
    for (const AxisBox& b : set.boxes()) {
      if (auto i = intersect(c.box, b)) mass += c.density * i->volume();
    }
  }
  // E boxes may overlap on faces only; the reference must live on E
  out.reference_mass = std::min(mass, ref.total_mass());
  const double dens = ref.max_density();
  const AxisBox supp = ref.bounding_box();
  auto u = [&](const Point& p) { return potential(KernelKind::P_SYM, ref, p, opt.potential_tol); };

  double best = INFINITY;
  for (const Point& p : set.sample_points(opt.initial_per_axis + 1)) {
    const double v = u(p);
    if (v < best) {
      best = v;
      out.argmin = p;
    }
  }
  double threshold = best / (1.0 + opt.gap);
  double forced = INFINITY;
  std::vector<AxisBox> stack;
  for (const AxisBox& b : set.boxes()) stack.push_back(b);
  std::size_t count = 0;
  const double tiny = 1e-12 * std::max(1.0, set.diameter());
  while (!stack.empty()) {
    const AxisBox b = stack.back();
    stack.pop_back();
    ++count;
    const Point c = b.center();
    const double v = u(c);
    if (v < best) {
      best = v;
      out.argmin = c;
      threshold = std::min(threshold, best / (1.0 + opt.gap));
    }
    const double h = 0.5 * b.diameter();
    const double lb = v - potential_modulus(n, dens, h, supp.max_distance_to(c));
    if (lb >= threshold) continue;
    if (h < tiny || count >= opt.max_boxes) {
      forced = std::min(forced, lb);
      continue;
    }
    // halve the long sides only, keeping pieces at bounded aspect ratio
    double longest = 0.0;
    for (int axis = 0; axis < b.dim(); ++axis) longest = std::max(longest, b.side(axis));
    std::vector<AxisBox> parts{b};
    for (int axis = 0; axis < b.dim(); ++axis) {
      if (b.side(axis) < 0.5 * longest || b.degenerate_axis(axis)) continue;
      std::vector<AxisBox> next;
      for (const AxisBox& q : parts) {
        const double mid = 0.5 * (q.min()[axis] + q.max()[axis]);
        Point a = q.max();
        a[axis] = mid;
        Point z = q.min();
        z[axis] = mid;
        next.emplace_back(q.min(), a);
        next.emplace_back(z, q.max());
      }
      parts = std::move(next);
    }
    for (const AxisBox& q : parts) stack.push_back(q);
  }
  out.boxes = count;
  out.best_sample = best;
  out.certified_inf = std::min(threshold, forced);
  if (!(out.certified_inf > 0.0)) {
    throw ComputationError("reference measure potential too small on E (certified infimum " +
                           std::to_string(out.certified_inf) + ", best sample " + std::to_string(best) + ")");
  }
  out.value = out.reference_mass / out.certified_inf;
  return out;
}

HausdorffContent hausdorff_content_upper(const BoxUnionSet& set, int first, int last, const DyadicLattice& lattice) {
  if (last < first) throw InputError("generation range is empty");
  HausdorffContent out;
  if (set.empty()) {
    out.best_generation = first;
    out.per_generation.assign(static_cast<std::size_t>(last - first + 1), 0.0);
    return out;
  }
  out.value = INFINITY;
  const int n = set.n();
  for (int g = first; g <= last; ++g) {
    const std::vector<DyadicCube> cubes = dyadic_cover(set, g, lattice);
    const double diam = cubes.front().side() * std::sqrt(static_cast<double>(n + 1));
    const double s = static_cast<double>(cubes.size()) * std::pow(diam, n);
    out.per_generation.push_back(s);
    if (s < out.value) {
      out.value = s;
      out.best_generation = g;
    }
  }
  return out;
}

CapacityBracket estimate_capacity(const BoxUnionSet& set, const LpCapacityOptions& lp_opt,
                                  const DualityOptions& dual_opt) {
  if (set.empty()) throw InputError("capacity bracket needs a nonempty set");
  CapacityBracket out;
  LowerBound lo = lower_bound_lp(set, lp_opt);
  out.lower = lo.value;
  out.lower_witness = std::move(lo.witness);
  out.constraint_report = lo.report;
  out.capacity = lp_opt.both_kernels ? "gamma_tilde_plus" : "gamma_sym_plus";
  const BoxUnionSet e0 = merged_cover(dyadic_cover(set, lp_opt.generation, lp_opt.lattice), set.n());
  out.upper_reference = CellMeasure::lebesgue(e0);
  out.upper_detail = upper_bound_duality(e0, out.upper_reference, dual_opt);
  out.upper = out.upper_detail.value;
  out.hausdorff_content = hausdorff_content_upper(set, 0, lp_opt.generation, lp_opt.lattice).value;
  return out;
}

SemiAdditivity semi_additivity_probe(const std::vector<BoxUnionSet>& sets, const LpCapacityOptions& opt,
                                     double constant) {
  if (sets.empty()) throw InputError("semi-additivity probe needs at least one set");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      for (const AxisBox& a : sets[i].boxes()) {
        for (const AxisBox& b : sets[j].boxes()) {
          if (boxes_overlap(a, b)) throw InputError("overlapping sets");
        }
      }
    }
  }
  SemiAdditivity out;
  BoxUnionSet all = sets.front();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    out.parts.push_back(lower_bound_lp(sets[i], opt).value);
    out.sum_value += out.parts.back();
    if (i > 0) all = all.united_with(sets[i]);
  }
  out.union_value = sets.size() == 1 ? out.parts.front() : lower_bound_lp(all, opt).value;
  out.ratio = out.sum_value > 0.0 ? out.union_value / out.sum_value : 0.0;
  out.constant = constant;
  out.within_constant = out.ratio <= constant;
  return out;
}

}  // namespace calcap
