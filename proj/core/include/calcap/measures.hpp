#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "calcap/geometry.hpp"
#include "calcap/kernels.hpp"

namespace calcap {

struct Cell {
  AxisBox box;
  double density = 0.0;
};

/// Nonnegative piecewise-constant density on cells with disjoint interiors.
class CellMeasure {
 public:
  CellMeasure() = default;
  /// Validates densities; `check_disjoint` runs the pairwise interior test.
  CellMeasure(int n, std::vector<Cell> cells, bool check_disjoint = true);

  static CellMeasure lebesgue(const BoxUnionSet& set, double density = 1.0);
  static CellMeasure on_cubes(const std::vector<DyadicCube>& cubes, int n, std::span<const double> densities);

  int n() const { return n_; }
  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  double total_mass() const;
  double max_density() const;
  double min_cell_width() const;
  AxisBox bounding_box() const;
  BoxUnionSet support() const;
  std::vector<double> densities() const;

  CellMeasure scaled(double factor) const;
  CellMeasure with_densities(std::span<const double> densities) const;
  /// Cells of both measures side by side; interiors must stay disjoint.
  CellMeasure plus(const CellMeasure& other) const;
  /// Restriction to a box, cells clipped.
  CellMeasure restricted_to(const AxisBox& box) const;

 private:
  int n_ = 1;
  std::vector<Cell> cells_;
};

enum class PotentialMethod { Auto, Analytic, Quadrature };

/// ∫_cell K(p - y) dy for unit density. Analytic needs n = 1; Auto picks it when available.
double cell_potential(KernelKind kind, const AxisBox& cell, const Point& p, double tol = 1e-10,
                      PotentialMethod method = PotentialMethod::Auto);

/// K * μ (p) with absolute error <= tol.
double potential(KernelKind kind, const CellMeasure& mu, const Point& p, double tol = 1e-9,
                 PotentialMethod method = PotentialMethod::Auto);

/// Potentials at many points, evaluated in parallel.
std::vector<double> potential_many(KernelKind kind, const CellMeasure& mu, std::span<const Point> points,
                                   double tol = 1e-9, PotentialMethod method = PotentialMethod::Auto);

/// ∫ K(p - y) 1{|p - y| > eps} dμ(y).
double truncated_potential(KernelKind kind, const CellMeasure& mu, const Point& p, double eps, double tol = 1e-9);

/// ∫ K(p - y) ψ(|p - y| / τ) dμ(y).
double regularized_potential(KernelKind kind, const CellMeasure& mu, const Point& p, double tau,
                             const BumpProfile& bump, double tol = 1e-9);
double cell_regularized_potential(KernelKind kind, const AxisBox& cell, const Point& p, double tau,
                                  const BumpProfile& bump, double tol = 1e-10);

/// ∫_cell K(p - y) w(|p - y|) dy in the plane by polar coordinates about p, for a radial weight w vanishing beyond
/// the last kink radius. `primitive` is W(ρ) = ∫_0^ρ w. Kink radii mark where W is not smooth.
double radial_window_integral_2d(KernelKind kind, const AxisBox& cell, const Point& p,
                                 const std::function<double(double)>& primitive, std::span<const double> kink_radii,
                                 double tol = 1e-11);

struct VolumeEstimate {
  double value = 0.0;
  double error = 0.0;
};

/// Volume of box ∩ closed ball; exact in the plane, seeded randomized quasi-Monte-Carlo otherwise.
VolumeEstimate ball_box_volume(const AxisBox& box, const Point& center, double radius, std::uint64_t seed = 1);

/// μ(B_r(center)).
VolumeEstimate ball_mass(const CellMeasure& mu, const Point& center, double radius, std::uint64_t seed = 1);

/// Dyadic radii r_min 2^k up to the first one >= r_max.
std::vector<double> dyadic_radii(double r_min, double r_max);

/// max_r μ(B_r(p)) / r^n over the given radii.
double maximal_function(const CellMeasure& mu, const Point& p, std::span<const double> radii, std::uint64_t seed = 1);

struct GrowthFamily {
  std::vector<Point> centers;
  std::vector<double> radii;
};

/// All cell corners and centers, with dyadic radii from half the minimal cell width to twice the support diameter.
GrowthFamily mandated_growth_family(const CellMeasure& mu);
GrowthFamily mandated_growth_family(const std::vector<AxisBox>& cells, double diameter);

/// Ball-versus-cell coverage for every (center, radius) pair of a family, row index center * radii + radius.
/// Entry (k, j) is |B_k ∩ cell_j| / |cell_j|, rounded up by the Monte-Carlo error off the plane and capped at 1.
struct GrowthRows {
  std::size_t cells = 0;
  std::vector<double> fraction;  // row-major
  std::vector<double> radius;    // per row
  std::size_t rows() const { return radius.size(); }
};
GrowthRows growth_rows(const std::vector<AxisBox>& cells, const GrowthFamily& family, std::uint64_t seed = 7);

struct GrowthCertificate {
  double constant = 0.0;
  std::vector<Point> centers;
  std::vector<double> radii;
  double worst_ratio = 0.0;
  Point worst_center;
  double worst_radius = 0.0;
  /// Largest Monte-Carlo error among evaluated balls (0 in the plane).
  double max_volume_error = 0.0;
  /// Radii below constant / (D ω_{n+1}) satisfy the bound from the density cap alone and are skipped.
  int pruned_radii = 0;
  bool valid = false;
  std::string note;
};

/// Worst μ(B_r(x))/r^n over centers x radii. Throws InputError when the family misses a cell corner or center,
/// does not reach down to half the minimal cell width or up to twice the support diameter, or has a gap over 2.
GrowthCertificate growth_check(const CellMeasure& mu, double constant, std::span<const Point> centers,
                               std::span<const double> radii, std::uint64_t seed = 1);

/// Same check over the mandated family.
GrowthCertificate growth_check(const CellMeasure& mu, double constant = 1.0, std::uint64_t seed = 1);

}  // namespace calcap
