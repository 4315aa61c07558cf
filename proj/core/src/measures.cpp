#include "calcap/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "calcap/errors.hpp"
#include "calcap/parallel.hpp"
#include "calcap/quadrature.hpp"
#include "calcap/rect2d.hpp"

namespace calcap {

CellMeasure::CellMeasure(int n, std::vector<Cell> cells, bool check_disjoint) : n_(n), cells_(std::move(cells)) {
  if (n < 1 || n > kMaxSpatialDim) throw InputError("measure dimension out of range");
  for (const Cell& c : cells_) {
    if (c.box.n() != n) throw InputError("cell dimension does not match the measure");
    if (!(c.density >= 0.0) || !std::isfinite(c.density)) throw InputError("cell densities must be finite and >= 0");
  }
  if (!check_disjoint) return;
  // sweep along axis 0 over cells of positive volume
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].box.volume() > 0.0) order.push_back(i);
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cells_[a].box.min()[0] < cells_[b].box.min()[0]; });
  for (std::size_t a = 0; a < order.size(); ++a) {
    const AxisBox& A = cells_[order[a]].box;
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const AxisBox& B = cells_[order[b]].box;
      if (B.min()[0] >= A.max()[0]) break;
      if (boxes_overlap(A, B)) throw InputError("cells of a measure must have disjoint interiors");
    }
  }
}

CellMeasure CellMeasure::lebesgue(const BoxUnionSet& set, double density) {
  std::vector<Cell> cells;
  for (const AxisBox& b : set.boxes()) cells.push_back({b, density});
  return CellMeasure(set.n(), std::move(cells));
}

CellMeasure CellMeasure::on_cubes(const std::vector<DyadicCube>& cubes, int n, std::span<const double> densities) {
  if (densities.size() != cubes.size()) throw InputError("one density per cube expected");
  std::vector<Cell> cells;
  cells.reserve(cubes.size());
  for (std::size_t i = 0; i < cubes.size(); ++i) cells.push_back({cubes[i].box(), densities[i]});
  return CellMeasure(n, std::move(cells), false);
}

double CellMeasure::total_mass() const {
  double m = 0.0;
  for (const Cell& c : cells_) m += c.density * c.box.volume();
  return m;
}

double CellMeasure::max_density() const {
  double d = 0.0;
  for (const Cell& c : cells_) d = std::max(d, c.density);
  return d;
}

double CellMeasure::min_cell_width() const {
  double w = INFINITY;
  for (const Cell& c : cells_) {
    for (int i = 0; i < c.box.dim(); ++i) {
      if (c.box.side(i) > 0.0) w = std::min(w, c.box.side(i));
    }
  }
  return w;
}

AxisBox CellMeasure::bounding_box() const { return support().bounding_box(); }

BoxUnionSet CellMeasure::support() const {
  std::vector<AxisBox> boxes;
  for (const Cell& c : cells_) boxes.push_back(c.box);
  return BoxUnionSet(n_, std::move(boxes));
}

std::vector<double> CellMeasure::densities() const {
  std::vector<double> d;
  d.reserve(cells_.size());
  for (const Cell& c : cells_) d.push_back(c.density);
  return d;
}

CellMeasure CellMeasure::scaled(double factor) const {
  if (!(factor >= 0.0)) throw InputError("measures can only be scaled by factors >= 0");
  std::vector<Cell> cells = cells_;
  for (Cell& c : cells) c.density *= factor;
  return CellMeasure(n_, std::move(cells), false);
}

CellMeasure CellMeasure::with_densities(std::span<const double> densities) const {
  if (densities.size() != cells_.size()) throw InputError("one density per cell expected");
  std::vector<Cell> cells = cells_;
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i].density = densities[i];
  return CellMeasure(n_, std::move(cells), false);
}

CellMeasure CellMeasure::plus(const CellMeasure& other) const {
  if (other.n_ != n_) throw InputError("cannot add measures of different dimensions");
  std::vector<Cell> cells = cells_;
  cells.insert(cells.end(), other.cells_.begin(), other.cells_.end());
  return CellMeasure(n_, std::move(cells));
}

CellMeasure CellMeasure::restricted_to(const AxisBox& box) const {
  std::vector<Cell> cells;
  for (const Cell& c : cells_) {
    if (auto piece = intersect(c.box, box); piece && piece->volume() > 0.0) cells.push_back({*piece, c.density});
  }
  return CellMeasure(n_, std::move(cells), false);
}

namespace {

double singular_coefficient(KernelKind kind) { return kind == KernelKind::P_SYM ? 0.5 : 1.0; }

double cubature_cell(const AxisBox& cell, const Point& p, double tol, const std::function<double(const Point&)>& k,
                     double coefficient) {
  CubatureOptions opt;
  opt.abs_tol = tol;
  opt.rel_tol = 0.0;
  auto f = [&](const Point& y) {
    const Point z = p - y;
    return z.norm2() == 0.0 ? 0.0 : k(z);
  };
  return integrate_box(f, cell, Singularity{p, coefficient}, opt).value;
}

}  // namespace

double cell_potential(KernelKind kind, const AxisBox& cell, const Point& p, double tol, PotentialMethod method) {
  if (!(tol > 0.0)) throw InputError("potential tolerance must be positive");
  if (cell.volume() == 0.0) return 0.0;
  const bool plane = cell.n() == 1;
  if (method == PotentialMethod::Analytic && !plane) throw InputError("closed-form potentials exist only for n = 1");
  if (plane && method != PotentialMethod::Quadrature) return cell_potential_2d(kind, cell, p);
  return cubature_cell(cell, p, tol, [kind](const Point& z) { return kernel_unchecked(kind, z); },
                       singular_coefficient(kind));
}

double potential(KernelKind kind, const CellMeasure& mu, const Point& p, double tol, PotentialMethod method) {
  if (!(tol > 0.0)) throw InputError("potential tolerance must be positive");
  if (p.n() != mu.n()) throw InputError("point and measure dimensions differ");
  double sum = 0.0;
  const double per = tol / static_cast<double>(std::max<std::size_t>(1, mu.size()));
  for (const Cell& c : mu.cells()) {
    if (c.density == 0.0) continue;
    sum += c.density * cell_potential(kind, c.box, p, per / c.density, method);
  }
  return sum;
}

std::vector<double> potential_many(KernelKind kind, const CellMeasure& mu, std::span<const Point> points, double tol,
                                   PotentialMethod method) {
  std::vector<double> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out[i] = potential(kind, mu, points[i], tol, method); });
  return out;
}

double radial_window_integral_2d(KernelKind kind, const AxisBox& cell, const Point& p,
                                 const std::function<double(double)>& primitive, std::span<const double> kink_radii,
                                 double tol) {
  if (cell.n() != 1) throw InputError("polar near-field integrals need n = 1");
  if (cell.volume() == 0.0 || kink_radii.empty()) return 0.0;
  const double cutoff = *std::max_element(kink_radii.begin(), kink_radii.end());
  if (cell.distance_to(p) >= cutoff) return 0.0;

  auto angular = [kind](double th) {
    const double s = std::sin(th);
    switch (kind) {
      case KernelKind::P:
        return std::max(s, 0.0);
      case KernelKind::P_CONJ:
        return std::max(-s, 0.0);
      case KernelKind::P_SYM:
        return 0.5 * std::abs(s);
    }
    return 0.0;
  };
  // y = p - ρ (cos θ, sin θ); the ray meets the convex cell in [ρ_in, ρ_out]
  auto integrand = [&](double th) {
    const double e[2] = {std::cos(th), std::sin(th)};
    double lo = 0.0, hi = INFINITY;
    for (int i = 0; i < 2; ++i) {
      if (e[i] == 0.0) {
        if (p[i] < cell.min()[i] || p[i] > cell.max()[i]) return 0.0;
        continue;
      }
      double a = (p[i] - cell.max()[i]) / e[i];
      double b = (p[i] - cell.min()[i]) / e[i];
      if (a > b) std::swap(a, b);
      lo = std::max(lo, a);
      hi = std::min(hi, b);
    }
    if (!(hi > lo)) return 0.0;
    const double k = angular(th);
    if (k == 0.0) return 0.0;
    return k * (primitive(hi) - primitive(lo));
  };

  std::vector<double> breaks{-M_PI, -M_PI / 2, 0.0, M_PI / 2, M_PI};
  for (const Point& c : cell.corners()) {
    const double dx = p[0] - c[0], dt = p[1] - c[1];
    if (dx != 0.0 || dt != 0.0) breaks.push_back(std::atan2(dt, dx));
  }
  for (double R : kink_radii) {
    for (int axis = 0; axis < 2; ++axis) {
      for (double edge : {cell.min()[axis], cell.max()[axis]}) {
        const double gap = p[axis] - edge;
        if (std::abs(gap) > R) continue;
        const double h = std::sqrt(R * R - gap * gap);
        for (double sgn : {-1.0, 1.0}) {
          // direction from the crossing point back to p
          const double along = sgn * h;
          const double dx = axis == 0 ? gap : along;
          const double dt = axis == 0 ? along : gap;
          breaks.push_back(std::atan2(dt, dx));
        }
      }
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (b - a < 1e-15) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 21>::integrate(integrand, a, b, 12, tol);
  }
  return total;
}

namespace {

double near_field_truncation(KernelKind kind, const AxisBox& cell, const Point& p, double eps) {
  const double kinks[1] = {eps};
  return radial_window_integral_2d(kind, cell, p, [eps](double r) { return std::min(r, eps); }, kinks);
}

double near_field_regularization(KernelKind kind, const AxisBox& cell, const Point& p, double tau,
                                 const BumpProfile& bump) {
  const double kinks[2] = {tau * bump.inner_radius(), tau * bump.outer_radius()};
  return radial_window_integral_2d(
      kind, cell, p, [&](double r) { return tau * bump.complement_primitive(r / tau); }, kinks);
}

}  // namespace

double truncated_potential(KernelKind kind, const CellMeasure& mu, const Point& p, double eps, double tol) {
  if (!(eps > 0.0)) throw InputError("truncation radius must be positive");
  if (!(tol > 0.0)) throw InputError("potential tolerance must be positive");
  double sum = 0.0;
  const double per = tol / static_cast<double>(std::max<std::size_t>(1, mu.size()));
  for (const Cell& c : mu.cells()) {
    if (c.density == 0.0 || c.box.volume() == 0.0) continue;
    if (c.box.max_distance_to(p) <= eps) continue;
    double v;
    if (mu.n() == 1) {
      v = cell_potential_2d(kind, c.box, p);
      if (c.box.distance_to(p) < eps) v -= near_field_truncation(kind, c.box, p, eps);
    } else {
      v = cubature_cell(c.box, p, per / c.density,
                        [&](const Point& z) { return z.norm() > eps ? kernel_unchecked(kind, z) : 0.0; }, 0.0);
    }
    sum += c.density * std::max(v, 0.0);
  }
  return sum;
}

double cell_regularized_potential(KernelKind kind, const AxisBox& cell, const Point& p, double tau,
                                  const BumpProfile& bump, double tol) {
  if (!(tau > 0.0)) throw InputError("regularization scale tau must be positive");
  if (cell.volume() == 0.0) return 0.0;
  if (cell.max_distance_to(p) <= tau * bump.inner_radius()) return 0.0;
  if (cell.n() == 1) {
    double v = cell_potential_2d(kind, cell, p);
    if (cell.distance_to(p) < tau * bump.outer_radius()) v -= near_field_regularization(kind, cell, p, tau, bump);
    return std::max(v, 0.0);
  }
  return cubature_cell(cell, p, tol, [&](const Point& z) { return eval_regularized(kind, z, tau, bump); }, 0.0);
}

double regularized_potential(KernelKind kind, const CellMeasure& mu, const Point& p, double tau,
                             const BumpProfile& bump, double tol) {
  if (!(tol > 0.0)) throw InputError("potential tolerance must be positive");
  double sum = 0.0;
  const double per = tol / static_cast<double>(std::max<std::size_t>(1, mu.size()));
  for (const Cell& c : mu.cells()) {
    if (c.density == 0.0) continue;
    sum += c.density * cell_regularized_potential(kind, c.box, p, tau, bump, per / c.density);
  }
  return sum;
}

namespace {

double disk_rect_area(const AxisBox& box, const Point& c, double R) {
  const double a1 = box.min()[0] - c[0], a2 = box.max()[0] - c[0];
  const double b1 = box.min()[1] - c[1], b2 = box.max()[1] - c[1];
  const double u1 = std::max(a1, -R), u2 = std::min(a2, R);
  if (!(u2 > u1)) return 0.0;
  const double R2 = R * R;
  auto s = [&](double u) { return std::sqrt(std::max(R2 - u * u, 0.0)); };
  // primitive of sqrt(R^2 - u^2)
  auto S = [&](double u) { return 0.5 * (u * s(u) + R2 * std::asin(std::clamp(u / R, -1.0, 1.0))); };
  std::vector<double> cuts{u1, u2};
  for (double b : {b1, b2}) {
    if (std::abs(b) < R) {
      const double u = std::sqrt(R2 - b * b);
      for (double v : {-u, u}) {
        if (v > u1 && v < u2) cuts.push_back(v);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    const double sm = s(mid);
    const double top = std::min(b2, sm), bottom = std::max(b1, -sm);
    if (!(top > bottom)) continue;
    const double arc = S(hi) - S(lo);
    const double up = b2 < sm ? b2 * (hi - lo) : arc;
    const double down = b1 > -sm ? b1 * (hi - lo) : -arc;
    area += up - down;
  }
  return std::max(area, 0.0);
}

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, v = 0.0;
  while (i > 0) {
    v += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
    f *= inv;
  }
  return v;
}

VolumeEstimate qmc_ball_box(const AxisBox& box, const Point& c, double R, std::uint64_t seed) {
  static constexpr int kBases[kMaxDim] = {2, 3, 5, 7};
  constexpr int kShifts = 8;
  constexpr int kPoints = 1024;
  const int d = box.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double vol = box.volume();
  const double R2 = R * R;
  double mean = 0.0, sq = 0.0;
  for (int s = 0; s < kShifts; ++s) {
    std::array<double, kMaxDim> shift{};
    for (int i = 0; i < d; ++i) shift[i] = u(rng);
    int hits = 0;
    for (int k = 1; k <= kPoints; ++k) {
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) {
        double x = radical_inverse(static_cast<std::uint64_t>(k), kBases[i]) + shift[i];
        x -= std::floor(x);
        const double y = box.min()[i] + box.side(i) * x - c[i];
        r2 += y * y;
      }
      if (r2 <= R2) ++hits;
    }
    const double est = vol * hits / kPoints;
    mean += est;
    sq += est * est;
  }
  mean /= kShifts;
  const double var = std::max(sq / kShifts - mean * mean, 0.0);
  return {mean, std::sqrt(var / (kShifts - 1))};
}

}  // namespace

VolumeEstimate ball_box_volume(const AxisBox& box, const Point& center, double radius, std::uint64_t seed) {
  if (!(radius >= 0.0)) throw InputError("ball radius must be nonnegative");
  const double vol = box.volume();
  if (vol == 0.0 || box.distance_to(center) >= radius) return {};
  if (box.max_distance_to(center) <= radius) return {vol, 0.0};
  if (box.n() == 1) return {disk_rect_area(box, center, radius), 0.0};
  return qmc_ball_box(box, center, radius, seed);
}

VolumeEstimate ball_mass(const CellMeasure& mu, const Point& center, double radius, std::uint64_t seed) {
  VolumeEstimate out;
  double err2 = 0.0;
  for (const Cell& c : mu.cells()) {
    if (c.density == 0.0) continue;
    const VolumeEstimate v = ball_box_volume(c.box, center, radius, seed);
    out.value += c.density * v.value;
    err2 += c.density * c.density * v.error * v.error;
  }
  out.error = std::sqrt(err2);
  return out;
}

std::vector<double> dyadic_radii(double r_min, double r_max) {
  if (!(r_min > 0.0) || !(r_max >= r_min)) throw InputError("dyadic radii need 0 < r_min <= r_max");
  std::vector<double> out;
  for (double r = r_min;; r *= 2.0) {
    out.push_back(r);
    if (r >= r_max) break;
  }
  return out;
}

double maximal_function(const CellMeasure& mu, const Point& p, std::span<const double> radii, std::uint64_t seed) {
  if (radii.empty()) throw InputError("maximal function needs at least one radius");
  double best = 0.0;
  for (double r : radii) {
    if (!(r > 0.0)) throw InputError("radii must be positive");
    best = std::max(best, ball_mass(mu, p, r, seed).value / std::pow(r, mu.n()));
  }
  return best;
}

GrowthFamily mandated_growth_family(const std::vector<AxisBox>& cells, double diameter) {
  GrowthFamily fam;
  std::set<std::array<double, kMaxDim>> seen;
  double width = INFINITY;
  int n = 1;
  for (const AxisBox& b : cells) {
    n = b.n();
    std::vector<Point> pts = b.corners();
    pts.push_back(b.center());
    for (const Point& p : pts) {
      std::array<double, kMaxDim> key{};
      for (int i = 0; i < p.dim(); ++i) key[i] = p[i];
      if (seen.insert(key).second) fam.centers.push_back(p);
    }
    for (int i = 0; i < b.dim(); ++i) {
      if (b.side(i) > 0.0) width = std::min(width, b.side(i));
    }
  }
  (void)n;
  if (cells.empty() || !std::isfinite(width)) return fam;
  fam.radii = dyadic_radii(0.5 * width, std::max(2.0 * diameter, 0.5 * width));
  return fam;
}

GrowthRows growth_rows(const std::vector<AxisBox>& cells, const GrowthFamily& fam, std::uint64_t seed) {
  GrowthRows out;
  out.cells = cells.size();
  const std::size_t nr = fam.radii.size();
  const std::size_t rows = fam.centers.size() * nr;
  out.fraction.assign(rows * cells.size(), 0.0);
  out.radius.resize(rows);
  parallel_for(rows, [&](std::size_t k) {
    const Point& c = fam.centers[k / nr];
    const double r = fam.radii[k % nr];
    out.radius[k] = r;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const double vol = cells[j].volume();
      if (vol == 0.0 || cells[j].distance_to(c) > r) continue;
      const VolumeEstimate v = ball_box_volume(cells[j], c, r, seed + k);
      out.fraction[k * cells.size() + j] = std::min(1.0, (v.value + v.error) / vol);
    }
  });
  return out;
}

GrowthFamily mandated_growth_family(const CellMeasure& mu) {
  std::vector<AxisBox> boxes;
  for (const Cell& c : mu.cells()) boxes.push_back(c.box);
  return mandated_growth_family(boxes, mu.empty() ? 0.0 : mu.support().diameter());
}

GrowthCertificate growth_check(const CellMeasure& mu, double constant, std::span<const Point> centers,
                               std::span<const double> radii, std::uint64_t seed) {
  if (centers.empty() || radii.empty()) throw InputError("growth families must be nonempty");
  GrowthCertificate cert;
  cert.constant = constant;
  cert.centers.assign(centers.begin(), centers.end());
  cert.radii.assign(radii.begin(), radii.end());
  cert.worst_center = centers.front();
  cert.note = "dyadic radii: the supremum over all r > 0 is within a factor 2 of the reported ratio";

  if (!mu.empty()) {
    std::set<std::array<double, kMaxDim>> have;
    for (const Point& p : centers) {
      std::array<double, kMaxDim> key{};
      for (int i = 0; i < p.dim(); ++i) key[i] = p[i];
      have.insert(key);
    }
    const GrowthFamily need = mandated_growth_family(mu);
    for (const Point& p : need.centers) {
      std::array<double, kMaxDim> key{};
      for (int i = 0; i < p.dim(); ++i) key[i] = p[i];
      if (!have.count(key)) throw InputError("growth family violates the coverage rule: a cell corner or center is missing");
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (!(radii[i] > 0.0)) throw InputError("growth radii must be positive");
      if (i > 0 && !(radii[i] >= radii[i - 1])) throw InputError("growth radii must be sorted");
      if (i > 0 && radii[i] > 2.0 * radii[i - 1] * (1.0 + 1e-12)) {
        throw InputError("growth family violates the coverage rule: consecutive radii differ by more than 2");
      }
    }
    if (radii.front() > 0.5 * mu.min_cell_width() * (1.0 + 1e-12)) {
      throw InputError("growth family violates the coverage rule: smallest radius exceeds half the minimal cell width");
    }
    if (radii.back() < 2.0 * mu.support().diameter() * (1.0 - 1e-12)) {
      throw InputError("growth family violates the coverage rule: largest radius is below twice the diameter");
    }
  }

  const double dmax = mu.max_density();
  const int n = mu.n();
  const double omega = unit_ball_volume(n + 1);
  std::vector<double> active;
  for (double r : radii) {
    if (dmax > 0.0 && r > constant / (dmax * omega)) {
      active.push_back(r);
    } else {
      ++cert.pruned_radii;
    }
  }
  struct Best {
    double ratio = 0.0;
    double radius = 0.0;
    double err = 0.0;
  };
  std::vector<Best> per(centers.size());
  parallel_for(centers.size(), [&](std::size_t i) {
    for (double r : active) {
      const VolumeEstimate m = ball_mass(mu, centers[i], r, seed + i);
      const double ratio = m.value / std::pow(r, n);
      per[i].err = std::max(per[i].err, m.error / std::pow(r, n));
      if (ratio > per[i].ratio) {
        per[i].ratio = ratio;
        per[i].radius = r;
      }
    }
  });
  for (std::size_t i = 0; i < per.size(); ++i) {
    cert.max_volume_error = std::max(cert.max_volume_error, per[i].err);
    if (per[i].ratio > cert.worst_ratio) {
      cert.worst_ratio = per[i].ratio;
      cert.worst_center = centers[i];
      cert.worst_radius = per[i].radius;
    }
  }
  cert.valid = cert.worst_ratio <= constant;
  return cert;
}

GrowthCertificate growth_check(const CellMeasure& mu, double constant, std::uint64_t seed) {
  if (mu.empty()) {
    const Point origin(mu.n());
    const double r = 1.0;
    return growth_check(mu, constant, std::span<const Point>(&origin, 1), std::span<const double>(&r, 1), seed);
  }
  const GrowthFamily fam = mandated_growth_family(mu);
  return growth_check(mu, constant, fam.centers, fam.radii, seed);
}

}  // namespace calcap
