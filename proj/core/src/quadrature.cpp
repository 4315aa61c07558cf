#include "calcap/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

#include <boost/math/special_functions/legendre.hpp>

#include "calcap/errors.hpp"

namespace calcap {

const GaussRule& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  if (order < 1 || order > 64) throw InputError("Gauss-Legendre order must be in [1, 64]");
  // legendre_p_zeros gives the nonnegative half of the roots
  const std::vector<double> half = boost::math::legendre_p_zeros<double>(order);
  GaussRule rule;
  for (double x : half) {
    const double dp = boost::math::legendre_p_prime(order, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
    if (x != 0.0) {
      rule.nodes.push_back(-x);
      rule.weights.push_back(w);
    }
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

namespace {

struct Orders {
  int high;
  int low;
};

Orders orders_for(int dim) {
  switch (dim) {
    case 1:
    case 2:
      return {10, 7};
    case 3:
      return {6, 4};
    default:
      return {5, 3};
  }
}

double tensor_rule(const Integrand& f, const AxisBox& box, const GaussRule& rule) {
  const int d = box.dim();
  const int q = static_cast<int>(rule.nodes.size());
  std::array<double, kMaxDim> half{}, mid{};
  double jac = 1.0;
  for (int i = 0; i < d; ++i) {
    half[i] = 0.5 * box.side(i);
    mid[i] = 0.5 * (box.min()[i] + box.max()[i]);
    jac *= half[i];
  }
  std::array<int, kMaxDim> idx{};
  Point y = box.min();
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      y[i] = mid[i] + half[i] * rule.nodes[idx[i]];
      w *= rule.weights[idx[i]];
    }
    sum += w * f(y);
    int k = d - 1;
    while (k >= 0 && ++idx[k] == q) idx[k--] = 0;
    if (k < 0) break;
  }
  return sum * jac;
}

bool is_corner(const AxisBox& box, const Point& p) {
  for (int i = 0; i < box.dim(); ++i) {
    if (p[i] != box.min()[i] && p[i] != box.max()[i]) return false;
  }
  return true;
}

struct Piece {
  double error;
  double value;
  AxisBox box;
  bool singular_corner;
  bool operator<(const Piece& o) const { return error < o.error; }
};

}  // namespace

CubatureResult integrate_box(const Integrand& f, const AxisBox& box, const std::optional<Singularity>& singular,
                             const CubatureOptions& options) {
  CubatureResult out;
  if (box.volume() == 0.0) return out;
  const int d = box.dim();
  const Orders ord = orders_for(d);
  const GaussRule& hi_rule = gauss_legendre(ord.high);
  const GaussRule& lo_rule = gauss_legendre(ord.low);
  const double sigma = unit_sphere_area(d);

  auto evaluate = [&](const AxisBox& b) -> Piece {
    const bool corner = singular && singular->coefficient > 0.0 && is_corner(b, singular->point);
    if (corner) {
      // a priori bound of a |y|^{-n} singularity over the box, which sits inside a ball of radius diag
      return {singular->coefficient * sigma * b.diameter(), 0.0, b, true};
    }
    const double qh = tensor_rule(f, b, hi_rule);
    const double ql = tensor_rule(f, b, lo_rule);
    return {std::abs(qh - ql), qh, b, false};
  };

  std::priority_queue<Piece> heap;
  // split along every coordinate plane of the singular point: it becomes a corner of the pieces touching it,
  // and the kink of P across {t = const} lands on piece faces even when the point lies outside
  std::vector<AxisBox> initial{box};
  if (singular) {
    for (int axis = 0; axis < d; ++axis) {
      const double c = singular->point[axis];
      std::vector<AxisBox> next;
      for (const AxisBox& b : initial) {
        if (c > b.min()[axis] && c < b.max()[axis]) {
          Point lo_max = b.max();
          lo_max[axis] = c;
          Point hi_min = b.min();
          hi_min[axis] = c;
          next.emplace_back(b.min(), lo_max);
          next.emplace_back(hi_min, b.max());
        } else {
          next.push_back(b);
        }
      }
      initial = std::move(next);
    }
  }
  double total = 0.0, total_err = 0.0;
  for (const AxisBox& b : initial) {
    Piece p = evaluate(b);
    total += p.value;
    total_err += p.error;
    heap.push(std::move(p));
  }
  int count = static_cast<int>(heap.size());
  int since_resum = 0;

  auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(total)); };

  while (total_err > target()) {
    if (count >= options.max_boxes) {
      throw QuadratureError("cubature did not converge within " + std::to_string(options.max_boxes) + " boxes",
                            total, total_err);
    }
    Piece top = heap.top();
    heap.pop();
    total -= top.value;
    total_err -= top.error;
    int axis = 0;
    for (int i = 1; i < d; ++i) {
      if (top.box.side(i) > top.box.side(axis)) axis = i;
    }
    const double c = 0.5 * (top.box.min()[axis] + top.box.max()[axis]);
    Point lo_max = top.box.max();
    lo_max[axis] = c;
    Point hi_min = top.box.min();
    hi_min[axis] = c;
    for (const AxisBox& child : {AxisBox(top.box.min(), lo_max), AxisBox(hi_min, top.box.max())}) {
      Piece p = evaluate(child);
      total += p.value;
      total_err += p.error;
      heap.push(std::move(p));
    }
    ++count;
    if (++since_resum == 4096) {
      // running sums drift after many subtractions
      since_resum = 0;
      std::priority_queue<Piece> copy = heap;
      total = 0.0;
      total_err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        total_err += copy.top().error;
        copy.pop();
      }
    }
  }
  double v = 0.0, e = 0.0;
  std::vector<double> values;
  values.reserve(heap.size());
  while (!heap.empty()) {
    values.push_back(heap.top().value);
    e += heap.top().error;
    heap.pop();
  }
  // smallest contributions first
  std::sort(values.begin(), values.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  for (double x : values) v += x;
  out.value = v;
  out.error = e;
  out.boxes = count;
  return out;
}

}  // namespace calcap
