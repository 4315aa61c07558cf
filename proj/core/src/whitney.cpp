#include "calcap/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "calcap/errors.hpp"
#include "calcap/parallel.hpp"

namespace calcap {

AxisBox FieldGrid::domain() const {
  Point hi = origin;
  for (int i = 0; i < dim(); ++i) hi[i] = origin[i] + spacing * (nodes[i] - 1);
  return AxisBox(origin, hi);
}

Point FieldGrid::node(std::span<const int> index) const {
  Point p = origin;
  for (int i = 0; i < dim(); ++i) p[i] = origin[i] + spacing * index[i];
  return p;
}

double FieldGrid::interpolate(const Point& p) const {
  const int d = dim();
  std::array<int, kMaxDim> base{};
  std::array<double, kMaxDim> frac{};
  for (int i = 0; i < d; ++i) {
    const double u = (p[i] - origin[i]) / spacing;
    if (u < 0.0 || u > nodes[i] - 1) return 0.0;
    int k = std::min(static_cast<int>(std::floor(u)), nodes[i] - 2);
    k = std::max(k, 0);
    base[i] = k;
    frac[i] = u - k;
  }
  double sum = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int i = 0; i < d; ++i) {
      const int bit = (corner >> (d - 1 - i)) & 1;
      w *= bit ? frac[i] : 1.0 - frac[i];
      flat = flat * nodes[i] + static_cast<std::size_t>(std::min(base[i] + bit, nodes[i] - 1));
    }
    if (w != 0.0) sum += w * values[flat];
  }
  return sum;
}

FieldGrid sample_field(const std::function<double(const Point&)>& f, const BoxUnionSet& set, double spacing,
                       double margin) {
  if (set.empty()) throw InputError("field sampling needs a nonempty set");
  if (!(spacing > 0.0)) throw InputError("field spacing must be positive");
  if (margin < 0.0) margin = set.diameter();
  const AxisBox bb = set.bounding_box();
  FieldGrid g;
  g.spacing = spacing;
  g.origin = bb.min();
  const int d = bb.dim();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) {
    g.origin[i] = bb.min()[i] - margin;
    const double extent = bb.side(i) + 2.0 * margin;
    g.nodes[i] = std::max(2, static_cast<int>(std::ceil(extent / spacing - 1e-9)) + 1);
    total *= static_cast<std::size_t>(g.nodes[i]);
  }
  if (total > (1u << 24)) throw InputError("field grid too large; increase the spacing");
  g.values.assign(total, 0.0);
  parallel_for(total, [&](std::size_t k) {
    std::array<int, kMaxDim> idx{};
    std::size_t rest = k;
    for (int i = d - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rest % g.nodes[i]);
      rest /= g.nodes[i];
    }
    g.values[k] = f(g.node(std::span<const int>(idx.data(), d)));
  });
  return g;
}

FieldGrid sample_field(const WhitneyField& field, const BoxUnionSet& set, double spacing, double margin) {
  return sample_field([&field](const Point& p) { return field.at(p).total(); }, set, spacing, margin);
}

RegionMask::RegionMask(Point origin, double cell, std::array<std::int64_t, kMaxDim> dims, std::vector<std::uint8_t> in)
    : origin_(origin), cell_(cell), dims_(dims), in_(std::move(in)) {
  const int d = dim();
  std::size_t total = 1, ptotal = 1;
  for (int i = 0; i < d; ++i) {
    total *= static_cast<std::size_t>(dims_[i]);
    ptotal *= static_cast<std::size_t>(dims_[i] + 1);
  }
  if (in_.size() != total) throw InputError("mask size does not match its extents");
  prefix_.assign(ptotal, 0);
  // prefix[i+1] holds the count over cells < i + 1 on every axis
  for (std::size_t k = 0; k < total; ++k) {
    if (!in_[k]) continue;
    std::size_t rest = k, flatp = 0, stride = 1;
    for (int i = d - 1; i >= 0; --i) {
      const std::size_t idx = rest % static_cast<std::size_t>(dims_[i]);
      rest /= static_cast<std::size_t>(dims_[i]);
      flatp += (idx + 1) * stride;
      stride *= static_cast<std::size_t>(dims_[i] + 1);
    }
    prefix_[flatp] = 1;
  }
  std::size_t stride = 1;
  for (int axis = d - 1; axis >= 0; --axis) {
    const std::size_t len = static_cast<std::size_t>(dims_[axis] + 1);
    for (std::size_t k = 0; k < ptotal; ++k) {
      if ((k / stride) % len != 0) prefix_[k] += prefix_[k - stride];
    }
    stride *= len;
  }
}

std::size_t RegionMask::flat(const MaskIndex& idx) const {
  std::size_t f = 0;
  for (int i = 0; i < dim(); ++i) f = f * static_cast<std::size_t>(dims_[i]) + static_cast<std::size_t>(idx[i]);
  return f;
}

std::size_t RegionMask::inside_count() const {
  return static_cast<std::size_t>(std::count(in_.begin(), in_.end(), std::uint8_t{1}));
}

bool RegionMask::in(const MaskIndex& idx) const {
  for (int i = 0; i < dim(); ++i) {
    if (idx[i] < 0 || idx[i] >= dims_[i]) return false;
  }
  return in_[flat(idx)] != 0;
}

std::int64_t RegionMask::count(const MaskIndex& lo_in, const MaskIndex& hi_in) const {
  const int d = dim();
  MaskIndex lo{}, hi{};
  for (int i = 0; i < d; ++i) {
    lo[i] = std::clamp<std::int64_t>(lo_in[i], 0, dims_[i]);
    hi[i] = std::clamp<std::int64_t>(hi_in[i], 0, dims_[i]);
    if (hi[i] <= lo[i]) return 0;
  }
  std::int64_t sum = 0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    std::size_t f = 0;
    int sign = 1;
    for (int i = 0; i < d; ++i) {
      const bool upper = (corner >> (d - 1 - i)) & 1;
      f = f * static_cast<std::size_t>(dims_[i] + 1) + static_cast<std::size_t>(upper ? hi[i] : lo[i]);
      if (!upper) sign = -sign;
    }
    sum += sign * prefix_[f];
  }
  return sum;
}

std::vector<MaskIndex> RegionMask::cells_at(const Point& p) const {
  const int d = dim();
  std::array<std::array<std::int64_t, 2>, kMaxDim> options{};
  std::array<int, kMaxDim> counts{};
  for (int i = 0; i < d; ++i) {
    const double u = (p[i] - origin_[i]) / cell_;
    const double f = std::floor(u);
    const auto k = static_cast<std::int64_t>(f);
    options[i][0] = k;
    counts[i] = 1;
    if (u == f) {
      options[i][1] = k - 1;
      counts[i] = 2;
    }
  }
  std::vector<MaskIndex> out;
  std::array<int, kMaxDim> pick{};
  while (true) {
    MaskIndex idx{};
    bool ok = true;
    for (int i = 0; i < d; ++i) {
      idx[i] = options[i][pick[i]];
      if (idx[i] < 0 || idx[i] >= dims_[i]) ok = false;
    }
    if (ok) out.push_back(idx);
    int k = d - 1;
    while (k >= 0 && ++pick[k] == counts[k]) pick[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

int RegionMask::top_level() const {
  std::int64_t m = 1;
  for (int i = 0; i < dim(); ++i) m = std::max(m, dims_[i]);
  int level = 0;
  while ((std::int64_t{1} << level) < m) ++level;
  return level;
}

RegionMask superlevel_set(const FieldGrid& field, double theta, const BoxUnionSet& set,
                          const SuperlevelOptions& opt) {
  if (!(theta >= 0.0)) throw InputError("threshold must be nonnegative");
  if (opt.refine < 1 || (opt.refine & (opt.refine - 1)) != 0) throw InputError("mask refinement must be a power of two");
  const int d = field.dim();
  const double cell = field.spacing / opt.refine;
  std::array<std::int64_t, kMaxDim> dims{};
  std::size_t total = 1, vtotal = 1;
  for (int i = 0; i < d; ++i) {
    dims[i] = static_cast<std::int64_t>(field.nodes[i] - 1) * opt.refine;
    total *= static_cast<std::size_t>(dims[i]);
    vtotal *= static_cast<std::size_t>(dims[i] + 1);
  }
  if (total > (std::size_t{1} << 27)) throw InputError("mask too large; lower the refinement");
  // interpolated field at every mask vertex
  std::vector<double> vert(vtotal);
  parallel_for(vtotal, [&](std::size_t k) {
    std::size_t rest = k;
    Point p = field.origin;
    for (int i = d - 1; i >= 0; --i) {
      const std::size_t len = static_cast<std::size_t>(dims[i] + 1);
      p[i] = field.origin[i] + cell * static_cast<double>(rest % len);
      rest /= len;
    }
    vert[k] = field.interpolate(p);
  });
  std::vector<double> cell_min(total);
  std::vector<std::uint8_t> near(total, 1);
  parallel_for(total, [&](std::size_t k) {
    std::size_t rest = k;
    std::array<std::size_t, kMaxDim> idx{};
    for (int i = d - 1; i >= 0; --i) {
      idx[i] = rest % static_cast<std::size_t>(dims[i]);
      rest /= static_cast<std::size_t>(dims[i]);
    }
    double m = INFINITY;
    for (int corner = 0; corner < (1 << d); ++corner) {
      std::size_t f = 0;
      for (int i = 0; i < d; ++i) {
        f = f * static_cast<std::size_t>(dims[i] + 1) + idx[i] + ((corner >> (d - 1 - i)) & 1);
      }
      m = std::min(m, vert[f]);
    }
    cell_min[k] = m;
    if (opt.restrict_radius > 0.0) {
      Point c = field.origin;
      for (int i = 0; i < d; ++i) c[i] = field.origin[i] + cell * (static_cast<double>(idx[i]) + 0.5);
      const double half_diag = 0.5 * cell * std::sqrt(static_cast<double>(d));
      near[k] = distance_to_set(c, set) + half_diag <= opt.restrict_radius;
    }
  });

  // E samples at about the mask resolution
  double longest = 0.0;
  for (const AxisBox& b : set.boxes()) {
    for (int i = 0; i < d; ++i) longest = std::max(longest, b.side(i));
  }
  const int per_axis = std::clamp(static_cast<int>(std::ceil(longest / cell)) + 1, 2, 2048);
  const std::vector<Point> samples = set.sample_points(per_axis);

  double th = theta;
  for (int attempt = 0; attempt <= opt.max_shrinks; ++attempt) {
    std::vector<std::uint8_t> in(total);
    for (std::size_t k = 0; k < total; ++k) in[k] = near[k] && cell_min[k] > th;
    RegionMask mask(field.origin, cell, dims, std::move(in));
    mask.theta = th;
    mask.shrinks = attempt;
    mask.restrict_radius = opt.restrict_radius;
    bool contains = true;
    for (const Point& p : samples) {
      const std::vector<MaskIndex> cells = mask.cells_at(p);
      if (cells.empty()) {
        contains = false;
        break;
      }
      for (const MaskIndex& c : cells) {
        if (!mask.in(c)) {
          contains = false;
          break;
        }
      }
      if (!contains) break;
    }
    if (contains) return mask;
    th *= 0.5;
    if (th < 1e-300) break;
  }
  throw ComputationError("potential does not dominate on E: no threshold down to " + std::to_string(th) +
                         " gives a region containing E");
}

AxisBox MaskCube::box(const RegionMask& mask) const {
  const double side = mask.cell() * std::ldexp(1.0, level);
  Point lo = mask.origin(), hi = mask.origin();
  for (int i = 0; i < mask.dim(); ++i) {
    lo[i] = mask.origin()[i] + side * static_cast<double>(index[i]);
    hi[i] = mask.origin()[i] + side * static_cast<double>(index[i] + 1);
  }
  return AxisBox(lo, hi);
}

void MaskCube::scaled_range(double factor, bool outward, int dim, MaskIndex& lo, MaskIndex& hi) const {
  const double s = std::ldexp(1.0, level);
  for (int i = 0; i < dim; ++i) {
    const double c = (static_cast<double>(index[i]) + 0.5) * s;
    const double a = c - 0.5 * factor * s, b = c + 0.5 * factor * s;
    lo[i] = static_cast<std::int64_t>(outward ? std::floor(a) : std::ceil(a));
    hi[i] = static_cast<std::int64_t>(outward ? std::ceil(b) : std::floor(b));
  }
}

DyadicCube MaskCube::dyadic(const RegionMask& mask) const {
  DyadicCube q;
  const int top = mask.top_level();
  q.n = mask.dim() - 1;
  q.generation = top - level;
  q.base_scale = mask.cell() * std::ldexp(1.0, top);
  q.origin_shift = mask.origin();
  for (int i = 0; i < mask.dim(); ++i) q.index[i] = index[i];
  return q;
}

bool operator<(const MaskCube& a, const MaskCube& b) {
  if (a.level != b.level) return a.level > b.level;
  return a.index < b.index;
}

namespace {

std::int64_t range_volume(const MaskIndex& lo, const MaskIndex& hi, int d) {
  std::int64_t v = 1;
  for (int i = 0; i < d; ++i) v *= std::max<std::int64_t>(0, hi[i] - lo[i]);
  return v;
}

bool range_inside(const RegionMask& mask, const MaskIndex& lo, const MaskIndex& hi) {
  for (int i = 0; i < mask.dim(); ++i) {
    if (lo[i] < 0 || hi[i] > mask.extent(i)) return false;
  }
  return mask.count(lo, hi) == range_volume(lo, hi, mask.dim());
}

}  // namespace

WhitneyDecomposition whitney_decompose(const RegionMask& mask, double inner_factor, double outer_factor) {
  const int d = mask.dim();
  if (!(inner_factor >= 1.0) || !(outer_factor >= inner_factor)) throw InputError("Whitney factors must satisfy 1 <= inner <= outer");
  // a region touching the mask edge continues past what the mask can see
  for (int axis = 0; axis < d; ++axis) {
    MaskIndex lo{}, hi{};
    for (int i = 0; i < d; ++i) hi[i] = mask.extent(i);
    hi[axis] = 1;
    if (mask.count(lo, hi) > 0) throw InputError("unbounded region: inside cells reach the mask edge");
    lo[axis] = mask.extent(axis) - 1;
    hi[axis] = mask.extent(axis);
    if (mask.count(lo, hi) > 0) throw InputError("unbounded region: inside cells reach the mask edge");
  }
  WhitneyDecomposition out;
  out.inner_factor = inner_factor;
  out.outer_factor = outer_factor;
  std::vector<MaskCube> stack{MaskCube{mask.top_level(), {}}};
  while (!stack.empty()) {
    const MaskCube q = stack.back();
    stack.pop_back();
    const std::int64_t s = std::int64_t{1} << q.level;
    MaskIndex lo{}, hi{};
    for (int i = 0; i < d; ++i) {
      lo[i] = q.index[i] * s;
      hi[i] = lo[i] + s;
    }
    const std::int64_t inside = mask.count(lo, hi);
    if (inside == 0) continue;
    q.scaled_range(inner_factor, true, d, lo, hi);
    if (range_inside(mask, lo, hi)) {
      out.cubes.push_back(q);
      continue;
    }
    if (q.level == 0) {
      out.unresolved_cells += static_cast<std::size_t>(inside);
      continue;
    }
    for (int child = 0; child < (1 << d); ++child) {
      MaskCube c{q.level - 1, {}};
      for (int i = 0; i < d; ++i) c.index[i] = 2 * q.index[i] + ((child >> (d - 1 - i)) & 1);
      stack.push_back(c);
    }
  }
  std::sort(out.cubes.begin(), out.cubes.end());
  // A Q must meet the complement; inward rounding so a hit is never claimed falsely
  for (const MaskCube& q : out.cubes) {
    double f = outer_factor;
    while (true) {
      MaskIndex lo{}, hi{};
      q.scaled_range(f, false, d, lo, hi);
      if (!range_inside(mask, lo, hi)) break;
      f += 1.0;
    }
    if (f > outer_factor) ++out.outer_failures;
    out.worst_outer_factor = std::max(out.worst_outer_factor, f);
  }
  return out;
}

namespace {

// Closed boxes bucketed per distinct first-axis side on a lattice of that side, so each box sits in at most 2^d
// buckets and a query touches one bucket per side class.
class BoxIndex {
 public:
  explicit BoxIndex(const std::vector<AxisBox>& boxes) : boxes_(boxes) {
    for (std::size_t k = 0; k < boxes_.size(); ++k) {
      const AxisBox& b = boxes_[k];
      const double side = b.side(0) > 0.0 ? b.side(0) : 1.0;
      auto it = std::find_if(classes_.begin(), classes_.end(), [&](const Class& c) { return c.side == side; });
      if (it == classes_.end()) {
        classes_.push_back(Class{side, b.min(), {}});
        it = std::prev(classes_.end());
      }
      Class& c = *it;
      const int d = b.dim();
      std::array<std::int64_t, kMaxDim> lo{}, hi{}, at{};
      for (int i = 0; i < d; ++i) {
        lo[i] = cell_of(c, b.min()[i], i);
        hi[i] = cell_of(c, b.max()[i], i);
        at[i] = lo[i];
      }
      while (true) {
        c.buckets[key(at, d)].push_back(k);
        int i = d - 1;
        while (i >= 0 && at[i] == hi[i]) at[i] = lo[i], --i;
        if (i < 0) break;
        ++at[i];
      }
    }
  }

  int multiplicity(const Point& p, bool stop_at_one = false) const {
    int m = 0;
    std::array<std::int64_t, kMaxDim> at{};
    for (const Class& c : classes_) {
      for (int i = 0; i < p.dim(); ++i) at[i] = cell_of(c, p[i], i);
      const auto it = c.buckets.find(key(at, p.dim()));
      if (it == c.buckets.end()) continue;
      for (std::size_t k : it->second) {
        if (boxes_[k].contains(p)) {
          ++m;
          if (stop_at_one) return m;
        }
      }
    }
    return m;
  }

 private:
  struct Class {
    double side;
    Point anchor;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  };
  static std::int64_t cell_of(const Class& c, double x, int i) {
    return static_cast<std::int64_t>(std::floor((x - c.anchor[i]) / c.side));
  }
  static std::uint64_t key(const std::array<std::int64_t, kMaxDim>& at, int d) {
    std::uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < d; ++i) {
      h ^= static_cast<std::uint64_t>(at[i]);
      h *= 1099511628211ull;
    }
    return h;
  }
  const std::vector<AxisBox>& boxes_;
  std::vector<Class> classes_;
};

bool meets_set(const AxisBox& box, const BoxUnionSet& set) {
  for (const AxisBox& b : set.boxes()) {
    if (intersect(box, b)) return true;
  }
  return false;
}

std::vector<Point> random_points_in_set(const BoxUnionSet& set, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> weights;
  for (const AxisBox& b : set.boxes()) weights.push_back(b.volume());
  if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) {
    std::fill(weights.begin(), weights.end(), 1.0);
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> out;
  for (int k = 0; k < count; ++k) {
    const AxisBox& b = set.boxes()[pick(rng)];
    Point p = b.min();
    for (int i = 0; i < b.dim(); ++i) p[i] = b.min()[i] + u(rng) * b.side(i);
    out.push_back(p);
  }
  return out;
}

}  // namespace

int decomposition_overlap(const WhitneyDecomposition& dec, const RegionMask& mask, double factor, int samples,
                          std::uint64_t seed) {
  const int d = mask.dim();
  std::vector<AxisBox> boxes;
  for (const MaskCube& q : dec.cubes) boxes.push_back(q.box(mask).scaled_about_center(factor));
  std::vector<Point> probe;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < samples; ++k) {
    Point p = mask.origin();
    for (int i = 0; i < d; ++i) p[i] = mask.origin()[i] + u(rng) * mask.cell() * static_cast<double>(mask.extent(i));
    probe.push_back(p);
  }
  for (const MaskCube& q : dec.cubes) probe.push_back(q.box(mask).center());
  std::vector<int> mult(probe.size(), 0);
  const BoxIndex index(boxes);
  parallel_for(probe.size(), [&](std::size_t k) { mult[k] = index.multiplicity(probe[k]); });
  return mult.empty() ? 0 : *std::max_element(mult.begin(), mult.end());
}

CoverStats verify_cover(const WhitneyCover& cover, const BoxUnionSet& set, int samples, std::uint64_t seed) {
  CoverStats st;
  st.count = cover.cubes.size();
  st.p4_hypothesis = cover.stats.p4_hypothesis;
  const int d = set.dim();
  st.p1 = true;
  for (const AxisBox& q : cover.cubes) {
    if (!meets_set(q.scaled_about_center(5.0 / 8.0), set)) st.p1 = false;
  }
  st.halves_disjoint = true;
  for (std::size_t a = 0; a < cover.selected.size() && st.halves_disjoint; ++a) {
    for (std::size_t b = a + 1; b < cover.selected.size(); ++b) {
      const MaskCube& p = cover.selected[a];
      const MaskCube& q = cover.selected[b];
      const std::int64_t sp = std::int64_t{1} << p.level, sq = std::int64_t{1} << q.level;
      bool overlap = true;
      for (int i = 0; i < d; ++i) {
        const std::int64_t p0 = p.index[i] * sp, q0 = q.index[i] * sq;
        if (!(p0 < q0 + sq && q0 < p0 + sp)) overlap = false;
      }
      if (overlap) {
        st.halves_disjoint = false;
        break;
      }
    }
  }
  st.covers_samples = true;
  const BoxIndex cubes(cover.cubes);
  for (const Point& p : random_points_in_set(set, samples, seed)) {
    if (cubes.multiplicity(p, true) == 0) {
      st.covers_samples = false;
      break;
    }
  }
  if (!cover.cubes.empty()) {
    std::vector<AxisBox> five;
    Point lo = cover.cubes.front().min(), hi = cover.cubes.front().max();
    for (const AxisBox& q : cover.cubes) {
      five.push_back(q.scaled_about_center(5.0));
      for (int i = 0; i < d; ++i) {
        lo[i] = std::min(lo[i], five.back().min()[i]);
        hi[i] = std::max(hi[i], five.back().max()[i]);
      }
    }
    std::vector<Point> probe = random_points_in_set(BoxUnionSet(set.n(), {AxisBox(lo, hi)}), samples, seed + 1);
    for (const AxisBox& q : cover.cubes) probe.push_back(q.center());
    const BoxIndex index(five);
    for (const Point& p : probe) st.overlap5 = std::max(st.overlap5, index.multiplicity(p));
  }
  const double diam = set.diameter();
  for (const AxisBox& q : cover.cubes) st.max_diam = std::max(st.max_diam, q.diameter());
  st.max_diam_ratio = diam > 0.0 ? st.max_diam / diam : INFINITY;
  st.p4 = st.max_diam_ratio <= 0.1;
  return st;
}

WhitneyCover select_cover(const WhitneyDecomposition& dec, const RegionMask& mask, const BoxUnionSet& set,
                          bool p4_hypothesis, int samples, std::uint64_t seed) {
  if (set.empty()) throw InputError("cover selection needs a nonempty set");
  const int d = mask.dim();
  WhitneyCover out;
  out.decomposition = dec;
  out.theta = mask.theta;
  out.theta_shrinks = mask.shrinks;

  // owner of every mask cell
  std::unordered_map<std::size_t, std::size_t> owner;
  std::vector<std::size_t> candidates;
  for (std::size_t c = 0; c < dec.cubes.size(); ++c) {
    const MaskCube& q = dec.cubes[c];
    if (!meets_set(q.box(mask).scaled_about_center(1.25), set)) continue;
    candidates.push_back(c);
    const std::int64_t s = std::int64_t{1} << q.level;
    MaskIndex idx{};
    std::array<std::int64_t, kMaxDim> off{};
    while (true) {
      std::size_t f = 0;
      for (int i = 0; i < d; ++i) {
        idx[i] = q.index[i] * s + off[i];
        f = f * static_cast<std::size_t>(mask.extent(i)) + static_cast<std::size_t>(idx[i]);
      }
      owner[f] = c;
      int k = d - 1;
      while (k >= 0 && ++off[k] == s) off[k--] = 0;
      if (k < 0) break;
    }
  }
  double min_side = INFINITY, longest = 0.0;
  for (std::size_t c : candidates) min_side = std::min(min_side, mask.cell() * std::ldexp(1.0, dec.cubes[c].level));
  for (const AxisBox& b : set.boxes()) {
    for (int i = 0; i < d; ++i) longest = std::max(longest, b.side(i));
  }
  if (!std::isfinite(min_side)) throw ComputationError("E not covered: no Whitney cube meets E");
  const int per_axis = std::clamp(static_cast<int>(std::ceil(4.0 * longest / min_side)) + 1, 2, 4096);
  const std::vector<Point> pts = set.sample_points(per_axis);

  std::unordered_map<std::size_t, std::vector<std::size_t>> by_cube;
  for (std::size_t s = 0; s < pts.size(); ++s) {
    bool found = false;
    for (const MaskIndex& cell : mask.cells_at(pts[s])) {
      std::size_t f = 0;
      for (int i = 0; i < d; ++i) f = f * static_cast<std::size_t>(mask.extent(i)) + static_cast<std::size_t>(cell[i]);
      auto it = owner.find(f);
      if (it == owner.end()) continue;
      std::vector<std::size_t>& list = by_cube[it->second];
      if (list.empty() || list.back() != s) list.push_back(s);
      found = true;
    }
    if (!found) throw ComputationError("E not covered: a sample of E lies in no Whitney cube");
  }
  std::vector<int> covered(pts.size(), 0);
  std::vector<std::size_t> kept;
  // decomposition cubes are sorted by decreasing side, then index
  for (std::size_t c : candidates) {
    auto it = by_cube.find(c);
    if (it == by_cube.end()) continue;
    bool needed = false;
    for (std::size_t s : it->second) needed = needed || covered[s] == 0;
    if (!needed) continue;
    for (std::size_t s : it->second) ++covered[s];
    kept.push_back(c);
  }
  // backward pass drops cubes made redundant by later picks (closed cubes share boundary samples)
  std::vector<std::uint8_t> drop(kept.size(), 0);
  for (std::size_t k = kept.size(); k-- > 0;) {
    const std::vector<std::size_t>& own = by_cube[kept[k]];
    if (std::all_of(own.begin(), own.end(), [&](std::size_t s) { return covered[s] > 1; })) {
      for (std::size_t s : own) --covered[s];
      drop[k] = 1;
    }
  }
  for (std::size_t k = 0; k < kept.size(); ++k) {
    if (drop[k]) continue;
    out.selected.push_back(dec.cubes[kept[k]]);
    out.cubes.push_back(dec.cubes[kept[k]].box(mask).scaled_about_center(2.0));
  }
  out.stats.p4_hypothesis = p4_hypothesis;
  out.stats = verify_cover(out, set, samples, seed);
  out.stats.p4_hypothesis = p4_hypothesis;
  return out;
}

WhitneyCover build_whitney_cover(const BoxUnionSet& set, const WhitneyField& field, const WhitneyOptions& opt) {
  if (set.empty()) throw InputError("Whitney cover needs a nonempty set");
  const double diam = set.diameter();
  if (!(diam > 0.0)) throw InputError("Whitney cover needs a set of positive diameter");
  const double spacing = opt.field_spacing > 0.0 ? opt.field_spacing : diam / 32.0;
  SuperlevelOptions so;
  so.refine = opt.refine;
  double margin = opt.margin < 0.0 ? diam : opt.margin;
  if (opt.p4_hypothesis) {
    so.restrict_radius = opt.p4_fraction * diam;
    // the field is only needed next to E; cells must resolve cubes well below the radius
    margin = std::min(margin, so.restrict_radius + 2.0 * spacing);
    while (spacing / so.refine > so.restrict_radius / 32.0 && so.refine < 1024) so.refine *= 2;
  }
  FieldGrid grid = sample_field(field, set, spacing, margin);
  double theta = opt.theta;
  if (!(theta > 0.0)) {
    const std::vector<Point> pts = set.sample_points(9);
    const std::vector<double> v = field.totals(pts);
    theta = 0.5 * *std::min_element(v.begin(), v.end());
  }
  RegionMask mask = superlevel_set(grid, theta, set, so);
  // the region may run past the sampled domain; keep its part strictly inside
  bool truncated = false;
  {
    const int d = mask.dim();
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(mask.extent(i));
    std::vector<std::uint8_t> in(total);
    for (std::size_t k = 0; k < total; ++k) {
      std::size_t rest = k;
      MaskIndex idx{};
      bool edge = false;
      for (int i = d - 1; i >= 0; --i) {
        idx[i] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(mask.extent(i)));
        rest /= static_cast<std::size_t>(mask.extent(i));
        if (idx[i] == 0 || idx[i] == mask.extent(i) - 1) edge = true;
      }
      in[k] = mask.in(idx) && !edge;
      if (mask.in(idx) && edge) truncated = true;
    }
    const double th = mask.theta, rr = mask.restrict_radius;
    const int sh = mask.shrinks;
    std::array<std::int64_t, kMaxDim> dims{};
    for (int i = 0; i < d; ++i) dims[i] = mask.extent(i);
    mask = RegionMask(mask.origin(), mask.cell(), dims, std::move(in));
    mask.theta = th;
    mask.shrinks = sh;
    mask.restrict_radius = rr;
  }
  const WhitneyDecomposition dec = whitney_decompose(mask);
  WhitneyCover cover = select_cover(dec, mask, set, opt.p4_hypothesis, opt.samples, opt.seed);
  cover.field = std::move(grid);
  cover.truncated = truncated;
  return cover;
}

CapacitySum capacity_sum_probe(const WhitneyCover& cover, const BoxUnionSet& set, const LpCapacityOptions& opt) {
  CapacitySum out;
  for (const AxisBox& q : cover.cubes) {
    const BoxUnionSet piece = set.intersected_with(q.scaled_about_center(2.0));
    const double v = piece.empty() ? 0.0 : lower_bound_lp(piece, opt).value;
    out.parts.push_back(v);
    out.sum += v;
  }
  out.whole = lower_bound_lp(set, opt).value;
  out.ratio = out.whole > 0.0 ? out.sum / out.whole : INFINITY;
  return out;
}

}  // namespace calcap
