#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace calcap {

inline constexpr int kMaxSpatialDim = 3;
inline constexpr int kMaxDim = kMaxSpatialDim + 1;

/// A point x̄ = (x, t) of R^n x R. Coordinates 0..n-1 are spatial, coordinate n is time.
class Point {
 public:
  Point() = default;
  /// Origin of R^{n+1}.
  explicit Point(int n);
  Point(std::span<const double> spatial, double time);
  /// Builds a point from n+1 coordinates, time last.
  static Point from_coords(std::span<const double> coords);
  /// Convenience for the plane case n = 1.
  static Point xt(double x, double t);

  int n() const { return n_; }
  int dim() const { return n_ + 1; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  double time() const { return c_[static_cast<std::size_t>(n_)]; }
  double spatial(int i) const { return c_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const { return {c_.data(), static_cast<std::size_t>(dim())}; }

  double norm() const;
  double norm2() const;

  Point operator-() const;
  Point& operator+=(const Point& o);
  Point& operator-=(const Point& o);
  Point& operator*=(double s);
  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend bool operator==(const Point& a, const Point& b);

 private:
  int n_ = 1;
  std::array<double, kMaxDim> c_{};
};

double distance(const Point& a, const Point& b);

/// Closed axis-parallel box [min, max]; zero thickness along any axis is allowed.
class AxisBox {
 public:
  AxisBox() = default;
  AxisBox(Point min_corner, Point max_corner);

  const Point& min() const { return lo_; }
  const Point& max() const { return hi_; }
  int n() const { return lo_.n(); }
  int dim() const { return lo_.dim(); }

  double side(int axis) const { return hi_[axis] - lo_[axis]; }
  double volume() const;
  double diameter() const;
  Point center() const;
  bool degenerate() const;
  bool degenerate_axis(int axis) const { return hi_[axis] == lo_[axis]; }
  bool contains(const Point& p) const;
  /// Euclidean distance from p to the box (0 inside), by coordinatewise clamping.
  double distance_to(const Point& p) const;
  /// Largest distance from p to a point of the box.
  double max_distance_to(const Point& p) const;
  /// Concentric box with every side multiplied by factor.
  AxisBox scaled_about_center(double factor) const;
  /// Box grown by margin on every side.
  AxisBox inflated(double margin) const;
  AxisBox translated(const Point& shift) const;
  AxisBox dilated(double factor) const;  // about the origin
  /// 2^dim corners, lexicographic with axis 0 slowest.
  std::vector<Point> corners() const;

  friend bool operator==(const AxisBox& a, const AxisBox& b) { return a.lo_ == b.lo_ && a.hi_ == b.hi_; }

 private:
  Point lo_;
  Point hi_;
};

/// Closed intersection of two boxes, if nonempty.
std::optional<AxisBox> intersect(const AxisBox& a, const AxisBox& b);
/// True when the boxes share interior in the sense used for set disjointness:
/// along every axis the intervals overlap with positive length, or one of them is a point inside the other.
bool boxes_overlap(const AxisBox& a, const AxisBox& b);

/// Finite union of closed boxes describing a compact set E.
class BoxUnionSet {
 public:
  BoxUnionSet() = default;
  BoxUnionSet(int n, std::vector<AxisBox> boxes);

  int n() const { return n_; }
  int dim() const { return n_ + 1; }
  const std::vector<AxisBox>& boxes() const { return boxes_; }
  bool empty() const { return boxes_.empty(); }

  AxisBox bounding_box() const;
  double diameter() const;
  bool contains(const Point& p) const;
  /// Sum of box volumes (exact when interiors are disjoint).
  double volume() const;
  BoxUnionSet dilated(double factor) const;
  BoxUnionSet translated(const Point& shift) const;
  /// Union of boxes intersected with a box; empty pieces are dropped.
  BoxUnionSet intersected_with(const AxisBox& box) const;
  /// Concatenation of two sets.
  BoxUnionSet united_with(const BoxUnionSet& other) const;
  /// Sample points of E: per box a tensor lattice with `per_axis` nodes along every nondegenerate axis.
  std::vector<Point> sample_points(int per_axis) const;

 private:
  int n_ = 1;
  std::vector<AxisBox> boxes_;
};

/// Λ(x̄) = dist(x̄, F) for a nonempty box union F.
double distance_to_set(const Point& p, const BoxUnionSet& set);

/// Max of |Λ(p) - Λ(q)| / |p - q| over seeded random pairs drawn around F (pairs with p = q skipped).
double lipschitz_check(const BoxUnionSet& set, int samples, std::uint64_t seed);

/// Tensor lattice of points over the box including its corners, lexicographic with axis 0 slowest.
std::vector<Point> grid(const AxisBox& box, std::span<const int> resolution);

/// Dyadic cube origin_shift + base_scale * 2^-generation * (index + [0,1)^{n+1}).
struct DyadicCube {
  int generation = 0;
  std::array<std::int64_t, kMaxDim> index{};
  int n = 1;
  Point origin_shift{1};
  double base_scale = 1.0;

  double side() const;
  /// Closed box of the cube.
  AxisBox box() const;
  DyadicCube parent() const;

  friend bool operator==(const DyadicCube& a, const DyadicCube& b);
  friend bool operator<(const DyadicCube& a, const DyadicCube& b);
};

struct DyadicLattice {
  double base_scale = 1.0;
  Point origin_shift{1};
  /// Upper bound on the number of cubes a single cover may return.
  std::size_t max_cubes = 1u << 20;
};

/// All cubes of a generation meeting E. Along nondegenerate box axes a cube must overlap with positive length;
/// along degenerate axes the half-open cube side must contain the coordinate, so each cube is counted once.
std::vector<DyadicCube> dyadic_cover(const BoxUnionSet& set, int generation, const DyadicLattice& lattice = {});

/// Boxes of a dyadic cover as a box union.
BoxUnionSet cover_as_set(const std::vector<DyadicCube>& cubes, int n);

/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);
/// Surface measure of the unit sphere S^{d-1} in R^d.
double unit_sphere_area(int d);

}  // namespace calcap
