#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "calcap/geometry.hpp"
#include "calcap/lp.hpp"
#include "calcap/measures.hpp"

namespace calcap {

struct LpCapacityOptions {
  int generation = 4;
  DyadicLattice lattice;
  /// potential rows use the bound 1/(1 + safety)
  double safety = 0.1;
  /// constraint lattice spacing is cell side / points_per_cell
  int points_per_cell = 2;
  /// constraint points reach this many cells beyond E (sup-norm)
  int margin_cells = 2;
  /// the a posteriori check uses a lattice this many times finer
  int verify_refinement = 4;
  /// impose P and P* rows (the γ̃₊ variant) instead of P_sym rows
  bool both_kernels = false;
  double growth_constant = 1.0;
  LpOptions lp;
};

struct ConstraintReport {
  std::size_t cells = 0;
  std::size_t potential_rows = 0;
  std::size_t growth_rows = 0;
  std::size_t pruned_growth_rows = 0;
  std::size_t cap_rows = 0;
  double safety = 0.0;
  double solve_spacing = 0.0;
  double verify_spacing = 0.0;
  std::size_t verify_points = 0;
  double density_cap = 0.0;
  /// max potential of the witness on the solve lattice and on the finer lattice
  double max_potential_solve = 0.0;
  double max_potential_verify = 0.0;
  /// (max_potential_verify - 1)^+
  double max_violation = 0.0;
  double growth_worst_ratio = 0.0;
  int lp_iterations = 0;
  int lp_degenerate_pivots = 0;
  double lp_residual = 0.0;
  bool both_kernels = false;
};

struct LowerBound {
  double value = 0.0;
  CellMeasure witness;
  ConstraintReport report;
};

/// Maximizes μ(E_0) over densities on the generation-g dyadic cells meeting E (E_0, the dyadic regularization),
/// subject to potential rows on a lattice around E_0, growth rows μ(B) <= C r^n over cell corners and centers with
/// dyadic radii, and the density cap D_max = 1/(ω_{n+1} r_min). The witness is re-checked on a finer lattice.
LowerBound lower_bound_lp(const BoxUnionSet& set, const LpCapacityOptions& options = {});

struct DualityOptions {
  /// stop once the certified infimum is within this relative gap of the best sampled value
  double gap = 0.02;
  std::size_t max_boxes = 20'000'000;
  int initial_per_axis = 4;
  double potential_tol = 1e-10;
};

struct UpperBound {
  double value = 0.0;
  double reference_mass = 0.0;
  double best_sample = 0.0;
  double certified_inf = 0.0;
  Point argmin;
  std::size_t boxes = 0;
  double gap = 0.0;
};

/// Continuity modulus of P_sym * μ for density <= D: sup over |x - y| <= h of |u(x) - u(y)|, with R bounding the
/// distance from x to the support.
double potential_modulus(int n, double density_bound, double h, double reach);

/// μ_ref(E) / inf_E P_sym * μ_ref, where the infimum is certified by branch and bound over the boxes of E with the
/// continuity modulus. Throws ComputationError("reference measure potential too small on E") when the certified
/// infimum is not positive.
UpperBound upper_bound_duality(const BoxUnionSet& set, const CellMeasure& reference, const DualityOptions& options = {});

/// min over generations of Σ diam(Q)^n over the dyadic cover; the comparability constant is left out.
struct HausdorffContent {
  double value = 0.0;
  int best_generation = 0;
  std::vector<double> per_generation;
};
HausdorffContent hausdorff_content_upper(const BoxUnionSet& set, int first_generation, int last_generation,
                                         const DyadicLattice& lattice = {});

struct CapacityBracket {
  double lower = 0.0;
  double upper = 0.0;
  CellMeasure lower_witness;
  CellMeasure upper_reference;
  ConstraintReport constraint_report;
  UpperBound upper_detail;
  double hausdorff_content = 0.0;
  std::string capacity = "gamma_sym_plus";
};

/// Lower bound from the LP and upper bound from the duality argument with Lebesgue measure on E_0.
CapacityBracket estimate_capacity(const BoxUnionSet& set, const LpCapacityOptions& lp_options = {},
                                  const DualityOptions& dual_options = {});

struct SemiAdditivity {
  double union_value = 0.0;
  double sum_value = 0.0;
  double ratio = 0.0;
  std::vector<double> parts;
  /// empirical constant the ratio is compared with
  double constant = 4.0;
  bool within_constant = true;
};

/// lower_bound_lp(∪E_i) / Σ lower_bound_lp(E_i). Throws InputError("overlapping sets") when two sets share interior.
SemiAdditivity semi_additivity_probe(const std::vector<BoxUnionSet>& sets, const LpCapacityOptions& options = {},
                                     double constant = 4.0);

}  // namespace calcap
