#pragma once

#include <cstdint>
#include <vector>

#include "calcap/geometry.hpp"
#include "calcap/kernels.hpp"
#include "calcap/measures.hpp"

namespace calcap {

/// Candidate densities live on the cells of `candidate`; the energy uses the kernel P_sym(x) ψ(|x| / τ₀).
struct VariationalProblem {
  BoxUnionSet set;
  double tau0 = 0.0;
  BumpProfile bump;
  CellMeasure candidate;
  double growth_constant = 1.0;
  /// Gauss nodes per axis and cell for ∫|Sμ|² dμ; also the sub-cell count per axis of the inner-field cache
  int nodes_per_axis = 2;
};

/// Problem on the generation-g dyadic cells of E with the uniform start density, capped at the growth cap and
/// scaled into the growth constraints. tau0 <= 0 selects a quarter of the cell side.
VariationalProblem make_variational_problem(const BoxUnionSet& set, int generation, double tau0 = 0.0,
                                            double growth_constant = 1.0, const DyadicLattice& lattice = {});

struct Energy {
  double mass = 0.0;
  double energy = 0.0;
  double value = 0.0;  // F
};

/// F(μ) = μ(E)² / (μ(E) + ∫|Sμ|² dμ), with 0/0 = 0, for the candidate measure.
Energy functional_F(const VariationalProblem& problem);

struct AscentResult {
  CellMeasure mu0;
  double value = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double start_value = 0.0;
  /// F after the start and after every accepted step
  std::vector<double> trace;
  int accepted = 0;
  /// accepted steps toward the linearized maximizer over the constraint polytope
  int conditional_steps = 0;
  int rescalings = 0;
  double growth_worst_ratio = 0.0;
};

/// Projected gradient ascent on the cell densities with halving backtracking. After each step densities are clipped
/// to [0, D_max] and scaled into the growth rows; when no step size helps, a conditional-gradient step toward the
/// LP maximizer of the linearized functional is tried before stopping. Whenever the energy exceeds the mass the
/// measure is rescaled by sqrt(mass / energy), which raises F and leaves energy = mass. `seed` drives the Monte-Carlo
/// ball volumes off the plane only.
AscentResult maximize_F(const VariationalProblem& problem, int iterations, std::uint64_t seed = 1);

struct WhitneyPotentials {
  double maximal = 0.0;        // Mμ₀
  double single = 0.0;         // Sμ₀
  double iterated = 0.0;       // S_μ₀(Sμ₀)
  double weighted_maximal = 0.0;  // M(Sμ₀ dμ₀)
  double total() const { return maximal + single + iterated + weighted_maximal; }
};

/// Evaluates the four summands of the auxiliary potential. The inner field Sμ₀ is cached at the centers of a
/// sub-cell grid (nodes_per_axis per cell side) and held constant on each sub-cell.
class WhitneyField {
 public:
  WhitneyField(const CellMeasure& mu0, double tau0, const BumpProfile& bump = {}, int sub_per_axis = 2,
               std::uint64_t seed = 1);

  WhitneyPotentials at(const Point& p) const;
  std::vector<double> totals(std::span<const Point> points) const;
  const CellMeasure& weighted() const { return weighted_; }

 private:
  std::vector<double> radii_for(const Point& p) const;

  CellMeasure mu0_;
  CellMeasure weighted_;  // Sμ₀ dμ₀ on sub-cells
  double tau0_;
  BumpProfile bump_;
  std::uint64_t seed_;
  double min_width_ = 0.0;
};

WhitneyPotentials whitney_potentials(const CellMeasure& mu0, const Point& p, double tau0, const BumpProfile& bump = {});

}  // namespace calcap
