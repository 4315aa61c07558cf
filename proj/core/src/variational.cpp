#include "calcap/variational.hpp"

#include <algorithm>
#include <cmath>

#include "calcap/errors.hpp"
#include "calcap/lp.hpp"
#include "calcap/parallel.hpp"
#include "calcap/quadrature.hpp"

namespace calcap {

namespace {

struct Node {
  Point p;
  double w;
  std::size_t cell;
};

std::vector<Node> cell_nodes(const CellMeasure& mu, int q) {
  const GaussRule& rule = gauss_legendre(q);
  std::vector<Node> out;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const AxisBox& b = mu.cells()[j].box;
    const int d = b.dim();
    std::array<int, kMaxDim> idx{};
    while (true) {
      Point p = b.min();
      double w = 1.0;
      for (int i = 0; i < d; ++i) {
        const double h = 0.5 * b.side(i);
        p[i] = b.min()[i] + h * (1.0 + rule.nodes[idx[i]]);
        w *= h * rule.weights[idx[i]];
      }
      out.push_back({p, w, j});
      int k = d - 1;
      while (k >= 0 && ++idx[k] == q) idx[k--] = 0;
      if (k < 0) break;
    }
  }
  return out;
}

// discrete problem: Sμ at node a is Σ_k G[a][k] d_k, mass Σ vol_k d_k, energy Σ_a w_a d_{cell(a)} (Sμ_a)^2
struct Discrete {
  std::vector<Node> nodes;
  std::vector<double> vol;
  std::vector<double> g;  // nodes x cells
  std::size_t nc = 0;
  // growth rows in mass units, pruned against the density cap
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  double dmax = 0.0;

  Discrete(const VariationalProblem& pr, bool with_growth, std::uint64_t seed) {
    const CellMeasure& mu = pr.candidate;
    nc = mu.size();
    nodes = cell_nodes(mu, pr.nodes_per_axis);
    for (const Cell& c : mu.cells()) vol.push_back(c.box.volume());
    g.assign(nodes.size() * nc, 0.0);
    parallel_for(nodes.size(), [&](std::size_t a) {
      for (std::size_t k = 0; k < nc; ++k) {
        g[a * nc + k] =
            cell_regularized_potential(KernelKind::P_SYM, mu.cells()[k].box, nodes[a].p, pr.tau0, pr.bump, 1e-10);
      }
    });
    if (!with_growth || nc == 0) return;
    const int n = mu.n();
    dmax = 1.0 / (unit_ball_volume(n + 1) * 0.5 * mu.min_cell_width());
    std::vector<AxisBox> boxes;
    for (const Cell& c : mu.cells()) boxes.push_back(c.box);
    const GrowthFamily fam = mandated_growth_family(boxes, mu.support().diameter());
    const GrowthRows gr = growth_rows(boxes, fam, seed);
    for (std::size_t k = 0; k < gr.rows(); ++k) {
      const double r = pr.growth_constant * std::pow(gr.radius[k], n);
      std::vector<double> row(nc);
      double capped = 0.0;
      for (std::size_t j = 0; j < nc; ++j) {
        row[j] = gr.fraction[k * nc + j] * vol[j];
        capped += row[j] * dmax;
      }
      if (capped <= r) continue;
      rows.push_back(std::move(row));
      rhs.push_back(r);
    }
  }

  std::vector<double> field(const std::vector<double>& d) const {
    std::vector<double> v(nodes.size(), 0.0);
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      double s = 0.0;
      const double* row = &g[a * nc];
      for (std::size_t k = 0; k < nc; ++k) s += row[k] * d[k];
      v[a] = s;
    }
    return v;
  }

  Energy evaluate(const std::vector<double>& d) const {
    Energy e;
    for (std::size_t k = 0; k < nc; ++k) e.mass += vol[k] * d[k];
    const std::vector<double> v = field(d);
    for (std::size_t a = 0; a < nodes.size(); ++a) e.energy += nodes[a].w * d[nodes[a].cell] * v[a] * v[a];
    e.value = (e.mass + e.energy) > 0.0 ? e.mass * e.mass / (e.mass + e.energy) : 0.0;
    return e;
  }

  std::vector<double> gradient(const std::vector<double>& d, const Energy& e) const {
    const std::vector<double> v = field(d);
    std::vector<double> de(nc, 0.0);
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      const std::size_t j = nodes[a].cell;
      de[j] += nodes[a].w * v[a] * v[a];
      const double f = 2.0 * nodes[a].w * d[j] * v[a];
      if (f == 0.0) continue;
      const double* row = &g[a * nc];
      for (std::size_t k = 0; k < nc; ++k) de[k] += f * row[k];
    }
    const double s = e.mass + e.energy;
    std::vector<double> out(nc);
    for (std::size_t k = 0; k < nc; ++k) {
      out[k] = s > 0.0 ? (2.0 * e.mass * s * vol[k] - e.mass * e.mass * (vol[k] + de[k])) / (s * s) : vol[k];
    }
    return out;
  }

  double worst_growth(const std::vector<double>& d) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double m = 0.0;
      for (std::size_t k = 0; k < nc; ++k) m += rows[i][k] * d[k];
      worst = std::max(worst, m / rhs[i]);
    }
    return worst;
  }

  // vertex of the feasible polytope maximizing grad . d
  std::vector<double> linear_max(const std::vector<double>& grad) const {
    LpProblem lp;
    lp.cols = static_cast<int>(nc);
    lp.c = grad;
    for (std::size_t i = 0; i < rows.size(); ++i) lp.add_row(rows[i], rhs[i]);
    for (std::size_t k = 0; k < nc; ++k) {
      std::vector<double> row(nc, 0.0);
      row[k] = 1.0;
      lp.add_row(row, dmax);
    }
    return solve_lp(lp).x;
  }

  void project(std::vector<double>& d) const {
    for (double& x : d) x = std::clamp(x, 0.0, dmax);
    const double w = worst_growth(d);
    if (w > 1.0) {
      for (double& x : d) x /= w;
    }
  }
};

// Lemma-style rescaling: when energy > mass, s = sqrt(m/e) gives F(sμ) = m/2 > F(μ) and energy = mass
bool rescale(std::vector<double>& d, Energy& e, const Discrete& disc) {
  if (!(e.energy > e.mass) || e.mass <= 0.0) return false;
  const double s = std::sqrt(e.mass / e.energy);
  for (double& x : d) x *= s;
  e = disc.evaluate(d);
  return true;
}

}  // namespace

VariationalProblem make_variational_problem(const BoxUnionSet& set, int generation, double tau0,
                                            double growth_constant, const DyadicLattice& lattice) {
  if (set.empty()) throw InputError("variational problem needs a nonempty set");
  if (!(growth_constant > 0.0)) throw InputError("growth constant must be positive");
  VariationalProblem pr;
  pr.set = set;
  pr.growth_constant = growth_constant;
  const std::vector<DyadicCube> cubes = dyadic_cover(set, generation, lattice);
  const double side = cubes.front().side();
  pr.tau0 = tau0 > 0.0 ? tau0 : 0.25 * side;
  const int n = set.n();
  const double dmax = 1.0 / (unit_ball_volume(n + 1) * 0.5 * side);
  std::vector<double> dens(cubes.size(), dmax);
  pr.candidate = CellMeasure::on_cubes(cubes, n, dens);
  const double worst = growth_check(pr.candidate, growth_constant).worst_ratio;
  if (worst > 1.0) pr.candidate = pr.candidate.scaled(1.0 / worst);
  return pr;
}

Energy functional_F(const VariationalProblem& pr) {
  if (!(pr.tau0 > 0.0)) throw InputError("tau0 must be positive");
  if (pr.candidate.empty()) return {};
  const Discrete disc(pr, false, 1);
  return disc.evaluate(pr.candidate.densities());
}

AscentResult maximize_F(const VariationalProblem& pr, int iterations, std::uint64_t seed) {
  if (iterations < 1) throw InputError("iteration budget must be at least 1");
  if (!(pr.tau0 > 0.0)) throw InputError("tau0 must be positive");
  AscentResult out;
  if (pr.candidate.empty()) {
    out.mu0 = pr.candidate;
    out.trace.push_back(0.0);
    return out;
  }
  const Discrete disc(pr, true, seed);
  std::vector<double> d = pr.candidate.densities();
  disc.project(d);
  Energy e = disc.evaluate(d);
  if (rescale(d, e, disc)) ++out.rescalings;
  out.start_value = e.value;
  out.trace.push_back(e.value);

  double step = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const std::vector<double> grad = disc.gradient(d, e);
    double gmax = 0.0;
    for (double x : grad) gmax = std::max(gmax, std::abs(x));
    if (gmax == 0.0) break;
    if (step == 0.0) step = 0.5 * disc.dmax / gmax;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      std::vector<double> trial(d.size());
      for (std::size_t k = 0; k < d.size(); ++k) trial[k] = d[k] + step * grad[k];
      disc.project(trial);
      const Energy et = disc.evaluate(trial);
      if (et.value > e.value) {
        d = std::move(trial);
        e = et;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // the radial retraction stalls on active growth rows; move toward the linearized maximizer instead
      const std::vector<double> vertex = disc.linear_max(grad);
      double gamma = 1.0;
      for (int halving = 0; halving < 60 && !accepted; ++halving, gamma *= 0.5) {
        std::vector<double> trial(d.size());
        for (std::size_t k = 0; k < d.size(); ++k) trial[k] = std::max(0.0, d[k] + gamma * (vertex[k] - d[k]));
        const Energy et = disc.evaluate(trial);
        if (et.value > e.value) {
          d = std::move(trial);
          e = et;
          accepted = true;
        }
      }
      if (!accepted) break;
      ++out.conditional_steps;
      step = 0.0;
    }
    ++out.accepted;
    if (rescale(d, e, disc)) ++out.rescalings;
    out.trace.push_back(e.value);
    step *= 2.0;
  }
  out.mu0 = pr.candidate.with_densities(d);
  out.value = e.value;
  out.mass = e.mass;
  out.energy = e.energy;
  out.growth_worst_ratio = disc.worst_growth(d);
  return out;
}

WhitneyField::WhitneyField(const CellMeasure& mu0, double tau0, const BumpProfile& bump, int sub, std::uint64_t seed)
    : mu0_(mu0), tau0_(tau0), bump_(bump), seed_(seed) {
  if (!(tau0 > 0.0)) throw InputError("tau0 must be positive");
  if (sub < 1) throw InputError("sub-cell count must be positive");
  if (mu0.empty()) {
    weighted_ = mu0;
    return;
  }
  min_width_ = mu0.min_cell_width();
  std::vector<Cell> pieces;
  for (const Cell& c : mu0.cells()) {
    if (c.density == 0.0) continue;
    const int d = c.box.dim();
    std::array<int, kMaxDim> idx{};
    while (true) {
      Point lo = c.box.min(), hi = c.box.min();
      for (int i = 0; i < d; ++i) {
        const double h = c.box.side(i) / sub;
        lo[i] = c.box.min()[i] + h * idx[i];
        hi[i] = idx[i] + 1 == sub ? c.box.max()[i] : c.box.min()[i] + h * (idx[i] + 1);
      }
      pieces.push_back({AxisBox(lo, hi), c.density});
      int k = d - 1;
      while (k >= 0 && ++idx[k] == sub) idx[k--] = 0;
      if (k < 0) break;
    }
  }
  std::vector<double> inner(pieces.size());
  parallel_for(pieces.size(), [&](std::size_t i) {
    inner[i] = regularized_potential(KernelKind::P_SYM, mu0_, pieces[i].box.center(), tau0_, bump_, 1e-9);
  });
  for (std::size_t i = 0; i < pieces.size(); ++i) pieces[i].density *= inner[i];
  weighted_ = CellMeasure(mu0.n(), std::move(pieces), false);
}

std::vector<double> WhitneyField::radii_for(const Point& p) const {
  const AxisBox bb = mu0_.bounding_box();
  const double lo = std::max(0.5 * min_width_, 0.5 * bb.distance_to(p));
  std::vector<double> r = dyadic_radii(lo, std::max(lo, 2.0 * bb.max_distance_to(p)));
  return r;
}

WhitneyPotentials WhitneyField::at(const Point& p) const {
  WhitneyPotentials out;
  if (mu0_.empty() || mu0_.total_mass() == 0.0) return out;
  const std::vector<double> radii = radii_for(p);
  out.maximal = maximal_function(mu0_, p, radii, seed_);
  out.single = regularized_potential(KernelKind::P_SYM, mu0_, p, tau0_, bump_, 1e-9);
  out.iterated = regularized_potential(KernelKind::P_SYM, weighted_, p, tau0_, bump_, 1e-9);
  out.weighted_maximal = maximal_function(weighted_, p, radii, seed_);
  return out;
}

std::vector<double> WhitneyField::totals(std::span<const Point> points) const {
  std::vector<double> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out[i] = at(points[i]).total(); });
  return out;
}

WhitneyPotentials whitney_potentials(const CellMeasure& mu0, const Point& p, double tau0, const BumpProfile& bump) {
  return WhitneyField(mu0, tau0, bump).at(p);
}

}  // namespace calcap
