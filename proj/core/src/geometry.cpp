#include "calcap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "calcap/errors.hpp"

namespace calcap {

namespace {

void check_n(int n) {
  if (n < 1 || n > kMaxSpatialDim) {
    throw InputError("spatial dimension must lie in [1, " + std::to_string(kMaxSpatialDim) + "], got " +
                     std::to_string(n));
  }
}

}  // namespace

Point::Point(int n) : n_(n) { check_n(n); }

Point::Point(std::span<const double> spatial, double time) : n_(static_cast<int>(spatial.size())) {
  check_n(n_);
  std::copy(spatial.begin(), spatial.end(), c_.begin());
  c_[spatial.size()] = time;
}

Point Point::from_coords(std::span<const double> coords) {
  if (coords.size() < 2) throw InputError("a point needs at least one spatial and one time coordinate");
  return Point(coords.first(coords.size() - 1), coords.back());
}

Point Point::xt(double x, double t) {
  Point p(1);
  p.c_[0] = x;
  p.c_[1] = t;
  return p;
}

double Point::norm2() const {
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) s += c_[i] * c_[i];
  return s;
}

double Point::norm() const {
  if (n_ == 1) return std::hypot(c_[0], c_[1]);
  return std::sqrt(norm2());
}

Point Point::operator-() const {
  Point r = *this;
  for (int i = 0; i < dim(); ++i) r.c_[i] = -r.c_[i];
  return r;
}

Point& Point::operator+=(const Point& o) {
  for (int i = 0; i < dim(); ++i) c_[i] += o.c_[i];
  return *this;
}

Point& Point::operator-=(const Point& o) {
  for (int i = 0; i < dim(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Point& Point::operator*=(double s) {
  for (int i = 0; i < dim(); ++i) c_[i] *= s;
  return *this;
}

bool operator==(const Point& a, const Point& b) {
  if (a.n_ != b.n_) return false;
  for (int i = 0; i < a.dim(); ++i) {
    if (a.c_[i] != b.c_[i]) return false;
  }
  return true;
}

double distance(const Point& a, const Point& b) { return (a - b).norm(); }

AxisBox::AxisBox(Point min_corner, Point max_corner) : lo_(min_corner), hi_(max_corner) {
  if (lo_.n() != hi_.n()) throw InputError("box corners have different dimensions");
  for (int i = 0; i < lo_.dim(); ++i) {
    if (!(lo_[i] <= hi_[i])) throw InputError("box min corner exceeds max corner along axis " + std::to_string(i));
  }
}

double AxisBox::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= side(i);
  return v;
}

double AxisBox::diameter() const { return (hi_ - lo_).norm(); }

Point AxisBox::center() const { return 0.5 * (lo_ + hi_); }

bool AxisBox::degenerate() const {
  for (int i = 0; i < dim(); ++i) {
    if (degenerate_axis(i)) return true;
  }
  return false;
}

bool AxisBox::contains(const Point& p) const {
  for (int i = 0; i < dim(); ++i) {
    if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
  }
  return true;
}

double AxisBox::distance_to(const Point& p) const {
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) {
    const double d = std::max({lo_[i] - p[i], 0.0, p[i] - hi_[i]});
    s += d * d;
  }
  return std::sqrt(s);
}

double AxisBox::max_distance_to(const Point& p) const {
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) {
    const double d = std::max(std::abs(p[i] - lo_[i]), std::abs(p[i] - hi_[i]));
    s += d * d;
  }
  return std::sqrt(s);
}

AxisBox AxisBox::scaled_about_center(double factor) const {
  const Point c = center();
  return AxisBox(c + factor * (lo_ - c), c + factor * (hi_ - c));
}

AxisBox AxisBox::inflated(double margin) const {
  Point lo = lo_;
  Point hi = hi_;
  for (int i = 0; i < dim(); ++i) {
    lo[i] -= margin;
    hi[i] += margin;
  }
  return AxisBox(lo, hi);
}

AxisBox AxisBox::translated(const Point& shift) const { return AxisBox(lo_ + shift, hi_ + shift); }

AxisBox AxisBox::dilated(double factor) const { return AxisBox(factor * lo_, factor * hi_); }

std::vector<Point> AxisBox::corners() const {
  const int d = dim();
  std::vector<Point> out;
  out.reserve(std::size_t{1} << d);
  for (int mask = 0; mask < (1 << d); ++mask) {
    Point p = lo_;
    for (int i = 0; i < d; ++i) {
      if (mask & (1 << (d - 1 - i))) p[i] = hi_[i];
    }
    out.push_back(p);
  }
  return out;
}

std::optional<AxisBox> intersect(const AxisBox& a, const AxisBox& b) {
  Point lo = a.min();
  Point hi = a.max();
  for (int i = 0; i < a.dim(); ++i) {
    lo[i] = std::max(a.min()[i], b.min()[i]);
    hi[i] = std::min(a.max()[i], b.max()[i]);
    if (lo[i] > hi[i]) return std::nullopt;
  }
  return AxisBox(lo, hi);
}

bool boxes_overlap(const AxisBox& a, const AxisBox& b) {
  for (int i = 0; i < a.dim(); ++i) {
    const double lo = std::max(a.min()[i], b.min()[i]);
    const double hi = std::min(a.max()[i], b.max()[i]);
    if (lo > hi) return false;
    const bool point_axis = a.degenerate_axis(i) || b.degenerate_axis(i);
    if (!point_axis && !(lo < hi)) return false;
  }
  return true;
}

BoxUnionSet::BoxUnionSet(int n, std::vector<AxisBox> boxes) : n_(n), boxes_(std::move(boxes)) {
  check_n(n);
  for (const auto& b : boxes_) {
    if (b.n() != n) throw InputError("box dimension does not match the set dimension");
  }
}

AxisBox BoxUnionSet::bounding_box() const {
  if (boxes_.empty()) throw InputError("empty set has no bounding box");
  Point lo = boxes_.front().min();
  Point hi = boxes_.front().max();
  for (const auto& b : boxes_) {
    for (int i = 0; i < dim(); ++i) {
      lo[i] = std::min(lo[i], b.min()[i]);
      hi[i] = std::max(hi[i], b.max()[i]);
    }
  }
  return AxisBox(lo, hi);
}

double BoxUnionSet::diameter() const {
  if (boxes_.empty()) return 0.0;
  // The diameter of a union of boxes is attained between box corners.
  double best = 0.0;
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    for (std::size_t j = i; j < boxes_.size(); ++j) {
      double s = 0.0;
      for (int k = 0; k < dim(); ++k) {
        const double d = std::max(boxes_[j].max()[k] - boxes_[i].min()[k], boxes_[i].max()[k] - boxes_[j].min()[k]);
        s += d * d;
      }
      best = std::max(best, s);
    }
  }
  return std::sqrt(best);
}

bool BoxUnionSet::contains(const Point& p) const {
  return std::any_of(boxes_.begin(), boxes_.end(), [&](const AxisBox& b) { return b.contains(p); });
}

double BoxUnionSet::volume() const {
  double v = 0.0;
  for (const auto& b : boxes_) v += b.volume();
  return v;
}

BoxUnionSet BoxUnionSet::dilated(double factor) const {
  std::vector<AxisBox> out;
  out.reserve(boxes_.size());
  for (const auto& b : boxes_) out.push_back(b.dilated(factor));
  return BoxUnionSet(n_, std::move(out));
}

BoxUnionSet BoxUnionSet::translated(const Point& shift) const {
  std::vector<AxisBox> out;
  out.reserve(boxes_.size());
  for (const auto& b : boxes_) out.push_back(b.translated(shift));
  return BoxUnionSet(n_, std::move(out));
}

BoxUnionSet BoxUnionSet::intersected_with(const AxisBox& box) const {
  std::vector<AxisBox> out;
  for (const auto& b : boxes_) {
    if (auto piece = intersect(b, box)) out.push_back(*piece);
  }
  return BoxUnionSet(n_, std::move(out));
}

BoxUnionSet BoxUnionSet::united_with(const BoxUnionSet& other) const {
  if (other.n() != n_) throw InputError("cannot unite sets of different dimensions");
  std::vector<AxisBox> out = boxes_;
  out.insert(out.end(), other.boxes_.begin(), other.boxes_.end());
  return BoxUnionSet(n_, std::move(out));
}

std::vector<Point> BoxUnionSet::sample_points(int per_axis) const {
  std::vector<Point> out;
  for (const auto& b : boxes_) {
    std::array<int, kMaxDim> res{};
    for (int i = 0; i < dim(); ++i) res[i] = b.degenerate_axis(i) ? 1 : std::max(per_axis, 2);
    std::array<int, kMaxDim> idx{};
    while (true) {
      Point p = b.min();
      for (int i = 0; i < dim(); ++i) {
        if (res[i] > 1) p[i] = b.min()[i] + b.side(i) * idx[i] / (res[i] - 1);
      }
      out.push_back(p);
      int axis = dim() - 1;
      while (axis >= 0 && ++idx[axis] == res[axis]) idx[axis--] = 0;
      if (axis < 0) break;
    }
  }
  return out;
}

double distance_to_set(const Point& p, const BoxUnionSet& set) {
  if (set.empty()) throw InputError("empty set has no distance function");
  double best = set.boxes().front().distance_to(p);
  for (const auto& b : set.boxes()) best = std::min(best, b.distance_to(p));
  return best;
}

double lipschitz_check(const BoxUnionSet& set, int samples, std::uint64_t seed) {
  if (samples < 2) throw InputError("lipschitz_check needs at least 2 samples");
  const AxisBox around = set.bounding_box().inflated(std::max(set.diameter(), 1.0));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] {
    Point p = around.min();
    for (int i = 0; i < p.dim(); ++i) p[i] = around.min()[i] + around.side(i) * unit(rng);
    return p;
  };
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Point p = draw();
    Point q = draw();
    if (k % 2 == 1) {
      // Nearby pairs probe the local slope.
      const double scale = std::pow(10.0, -6.0 * unit(rng));
      q = p + scale * (q - p);
    }
    const double gap = distance(p, q);
    if (gap == 0.0) continue;
    const double ratio = std::abs(distance_to_set(p, set) - distance_to_set(q, set)) / gap;
    worst = std::max(worst, ratio);
  }
  return worst;
}

std::vector<Point> grid(const AxisBox& box, std::span<const int> resolution) {
  const int d = box.dim();
  if (static_cast<int>(resolution.size()) != d) throw InputError("grid resolution needs one entry per axis");
  for (int r : resolution) {
    if (r < 2) throw InputError("grid resolution must be at least 2 along every axis");
  }
  std::vector<Point> out;
  std::array<int, kMaxDim> idx{};
  while (true) {
    Point p = box.min();
    for (int i = 0; i < d; ++i) p[i] = box.min()[i] + box.side(i) * idx[i] / (resolution[i] - 1);
    out.push_back(p);
    int axis = d - 1;
    while (axis >= 0 && ++idx[axis] == resolution[axis]) idx[axis--] = 0;
    if (axis < 0) break;
  }
  return out;
}

double DyadicCube::side() const { return base_scale * std::ldexp(1.0, -generation); }

AxisBox DyadicCube::box() const {
  const double s = side();
  Point lo(n);
  Point hi(n);
  for (int i = 0; i <= n; ++i) {
    lo[i] = origin_shift[i] + s * static_cast<double>(index[i]);
    hi[i] = origin_shift[i] + s * static_cast<double>(index[i] + 1);
  }
  return AxisBox(lo, hi);
}

DyadicCube DyadicCube::parent() const {
  DyadicCube p = *this;
  p.generation = generation - 1;
  for (int i = 0; i <= n; ++i) {
    const std::int64_t k = index[i];
    p.index[i] = k >= 0 ? k / 2 : -((-k + 1) / 2);
  }
  return p;
}

bool operator==(const DyadicCube& a, const DyadicCube& b) {
  return a.generation == b.generation && a.n == b.n && a.index == b.index && a.origin_shift == b.origin_shift &&
         a.base_scale == b.base_scale;
}

bool operator<(const DyadicCube& a, const DyadicCube& b) {
  if (a.generation != b.generation) return a.generation < b.generation;
  return a.index < b.index;
}

std::vector<DyadicCube> dyadic_cover(const BoxUnionSet& set, int generation, const DyadicLattice& lattice) {
  if (set.empty()) return {};
  const int d = set.dim();
  const double s = lattice.base_scale * std::ldexp(1.0, -generation);
  const Point origin = lattice.origin_shift.n() == set.n() ? lattice.origin_shift : Point(set.n());
  std::set<std::array<std::int64_t, kMaxDim>> seen;
  for (const auto& b : set.boxes()) {
    std::array<std::int64_t, kMaxDim> lo{};
    std::array<std::int64_t, kMaxDim> hi{};
    double count = 1.0;
    for (int i = 0; i < d; ++i) {
      const double a = (b.min()[i] - origin[i]) / s;
      const double c = (b.max()[i] - origin[i]) / s;
      if (b.degenerate_axis(i)) {
        lo[i] = hi[i] = static_cast<std::int64_t>(std::floor(a));
      } else {
        lo[i] = static_cast<std::int64_t>(std::floor(a));
        hi[i] = static_cast<std::int64_t>(std::ceil(c)) - 1;
      }
      count *= static_cast<double>(hi[i] - lo[i] + 1);
    }
    if (count + static_cast<double>(seen.size()) > static_cast<double>(lattice.max_cubes)) {
      throw InputError("dyadic cover exceeds the cube cap of " + std::to_string(lattice.max_cubes) +
                       " at generation " + std::to_string(generation));
    }
    std::array<std::int64_t, kMaxDim> idx = lo;
    while (true) {
      seen.insert(idx);
      int axis = d - 1;
      while (axis >= 0 && ++idx[axis] > hi[axis]) {
        idx[axis] = lo[axis];
        --axis;
      }
      if (axis < 0) break;
    }
  }
  std::vector<DyadicCube> out;
  out.reserve(seen.size());
  for (const auto& idx : seen) {
    DyadicCube q;
    q.generation = generation;
    q.index = idx;
    q.n = set.n();
    q.origin_shift = origin;
    q.base_scale = lattice.base_scale;
    out.push_back(q);
  }
  return out;
}

BoxUnionSet cover_as_set(const std::vector<DyadicCube>& cubes, int n) {
  std::vector<AxisBox> boxes;
  boxes.reserve(cubes.size());
  for (const auto& q : cubes) boxes.push_back(q.box());
  return BoxUnionSet(n, std::move(boxes));
}

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double unit_sphere_area(int d) { return d * unit_ball_volume(d); }

}  // namespace calcap
