#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "calcap/capacity.hpp"
#include "calcap/geometry.hpp"
#include "calcap/variational.hpp"

namespace calcap {

/// Field samples on a uniform lattice with equal spacing on every axis, lexicographic with axis 0 slowest.
struct FieldGrid {
  Point origin;
  double spacing = 0.0;
  std::array<int, kMaxDim> nodes{};
  std::vector<double> values;

  int dim() const { return origin.dim(); }
  AxisBox domain() const;
  Point node(std::span<const int> index) const;
  /// Multilinear interpolation; 0 outside the domain.
  double interpolate(const Point& p) const;
};

/// Lattice over the bounding box of E grown by `margin` (diam(E) when negative), rounded out to whole steps.
FieldGrid sample_field(const std::function<double(const Point&)>& f, const BoxUnionSet& set, double spacing,
                       double margin = -1.0);
FieldGrid sample_field(const WhitneyField& field, const BoxUnionSet& set, double spacing, double margin = -1.0);

using MaskIndex = std::array<std::int64_t, kMaxDim>;

/// Open region as a union of closed mask cells of side `cell`, anchored at the field origin. Cells outside the
/// field domain are outside the region.
class RegionMask {
 public:
  RegionMask() = default;
  RegionMask(Point origin, double cell, std::array<std::int64_t, kMaxDim> dims, std::vector<std::uint8_t> in);

  int dim() const { return origin_.dim(); }
  const Point& origin() const { return origin_; }
  double cell() const { return cell_; }
  std::int64_t extent(int axis) const { return dims_[axis]; }
  std::size_t inside_count() const;
  bool in(const MaskIndex& idx) const;
  /// Number of inside cells with lo <= index < hi; indices beyond the mask count as outside.
  std::int64_t count(const MaskIndex& lo, const MaskIndex& hi) const;
  /// Cells whose closed box contains p.
  std::vector<MaskIndex> cells_at(const Point& p) const;
  /// Smallest level L with 2^L cells covering every extent.
  int top_level() const;

  double theta = 0.0;
  int shrinks = 0;
  /// P4 restriction radius (0 when unused)
  double restrict_radius = 0.0;

 private:
  std::size_t flat(const MaskIndex& idx) const;
  Point origin_;
  double cell_ = 0.0;
  std::array<std::int64_t, kMaxDim> dims_{};
  std::vector<std::uint8_t> in_;
  std::vector<std::int64_t> prefix_;  // (dims + 1) per axis
};

struct SuperlevelOptions {
  /// mask cells per field step along each axis (a power of two)
  int refine = 8;
  int max_shrinks = 40;
  /// when positive, the region is additionally cut to cells lying within this distance of E
  double restrict_radius = 0.0;
};

/// Cells where the interpolated field exceeds theta at every cell corner. If a cell containing a sample of E is
/// outside, theta is halved and the mask rebuilt. Throws ComputationError("potential does not dominate on E") when the
/// retries run out.
RegionMask superlevel_set(const FieldGrid& field, double theta, const BoxUnionSet& set,
                          const SuperlevelOptions& options = {});

/// Dyadic cube of the mask: side cell * 2^level, covering cells [index * 2^level, (index + 1) * 2^level).
struct MaskCube {
  int level = 0;
  MaskIndex index{};

  AxisBox box(const RegionMask& mask) const;
  /// cell-index bounds of the cube scaled by `factor` about its center, rounded outward or inward
  void scaled_range(double factor, bool outward, int dim, MaskIndex& lo, MaskIndex& hi) const;
  DyadicCube dyadic(const RegionMask& mask) const;
  friend bool operator<(const MaskCube& a, const MaskCube& b);
  friend bool operator==(const MaskCube& a, const MaskCube& b) = default;
};

struct WhitneyDecomposition {
  std::vector<MaskCube> cubes;
  /// the inclusion factor (20) and the complement factor (A = 40)
  double inner_factor = 20.0;
  double outer_factor = 40.0;
  /// cubes whose A-dilate misses the complement on the mask
  std::size_t outer_failures = 0;
  /// smallest factor F such that F Q meets the complement for every cube
  double worst_outer_factor = 0.0;
  /// single mask cells that could not host a cube (within about ten cells of the boundary)
  std::size_t unresolved_cells = 0;
};

/// Maximal dyadic mask cubes Q with 20Q inside the region (outward rounding, so never falsely asserted).
/// Throws InputError("unbounded region") when inside cells reach the mask edge.
WhitneyDecomposition whitney_decompose(const RegionMask& mask, double inner_factor = 20.0, double outer_factor = 40.0);

/// Largest multiplicity of {factor Q_j} over seeded random points in the mask domain and the cube centers.
int decomposition_overlap(const WhitneyDecomposition& decomposition, const RegionMask& mask, double factor, int samples,
                          std::uint64_t seed);

struct CoverStats {
  std::size_t count = 0;
  /// largest multiplicity of {5 Q_i} (Q_i the output cubes) at the sampled points
  int overlap5 = 0;
  double max_diam = 0.0;
  double max_diam_ratio = 0.0;  // max diam(Q_i) / diam(E)
  bool p1 = false;
  bool halves_disjoint = false;
  bool covers_samples = false;
  bool p4_hypothesis = false;
  bool p4 = false;
};

struct WhitneyCover {
  std::vector<MaskCube> selected;  // the Whitney cubes Q_j kept
  std::vector<AxisBox> cubes;      // Q_i = 2 Q_j
  double theta = 0.0;
  int theta_shrinks = 0;
  /// the superlevel set reached the sampled domain and was cut to its interior
  bool truncated = false;
  CoverStats stats;
  FieldGrid field;
  WhitneyDecomposition decomposition;
};

/// Keeps cubes with (5/4)Q ∩ E nonempty, then greedily extracts a subcover of the E samples in order of decreasing
/// side, then index. Throws ComputationError("E not covered") when a sample lies in no Whitney cube.
WhitneyCover select_cover(const WhitneyDecomposition& decomposition, const RegionMask& mask, const BoxUnionSet& set,
                          bool p4_hypothesis = false, int samples = 10000, std::uint64_t seed = 1);

/// Recomputes P1, half-cube disjointness, containment of random E points and the {5 Q_i} multiplicity.
CoverStats verify_cover(const WhitneyCover& cover, const BoxUnionSet& set, int samples, std::uint64_t seed);

struct WhitneyOptions {
  double field_spacing = 0.0;  // <= 0: diam(E) / 32
  double margin = -1.0;        // < 0: diam(E)
  int refine = 8;
  /// theta <= 0 picks half the minimum of the field over the E samples
  double theta = 0.0;
  bool p4_hypothesis = false;
  /// P4 neighbourhood radius as a fraction of diam(E)
  double p4_fraction = 1.0 / 40.0;
  int samples = 10000;
  std::uint64_t seed = 1;
};

/// Field, superlevel set, decomposition and selection for μ₀ on E.
WhitneyCover build_whitney_cover(const BoxUnionSet& set, const WhitneyField& field, const WhitneyOptions& options = {});

struct CapacitySum {
  double sum = 0.0;
  double whole = 0.0;
  double ratio = 0.0;
  std::vector<double> parts;
};

/// Σ lower_bound_lp(2Q_i ∩ E) against lower_bound_lp(E).
CapacitySum capacity_sum_probe(const WhitneyCover& cover, const BoxUnionSet& set, const LpCapacityOptions& options = {});

}  // namespace calcap
