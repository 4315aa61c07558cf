#include "calcap/rect2d.hpp"

#include <algorithm>
#include <cmath>

#include "calcap/errors.hpp"

namespace calcap {

NormalizedRect NormalizedRect::from_sides(double lx, double lt) {
  if (!(lx > 0.0) || !(lt > 0.0)) throw InputError("rectangle sides must be positive");
  return {lx / lt, lx, lt};
}

NormalizedRect NormalizedRect::unit_height(double r) {
  if (!(r > 0.0)) throw InputError("rectangle ratio r must be positive");
  return {r, r, 1.0};
}

namespace {

// x/2 ln(1 + s^2/x^2), continuous at x = 0
double log_term(double x, double s) {
  if (x == 0.0) return 0.0;
  const double q = s / x;
  if (std::abs(q) < 1.0) return 0.5 * x * std::log1p(q * q);
  return x * (std::log(std::hypot(x, s)) - std::log(std::abs(x)));
}

// potential at height s above the bottom edge of a strip [0,r] x [0,s]; arctan(x/s) is the
// continuous form of pi/2 sgn(x) - arctan(s/x)
double strip(double r, double x, double s) {
  if (s <= 0.0) return 0.0;
  return log_term(x, s) + log_term(r - x, s) + s * (std::atan(x / s) + std::atan((r - x) / s));
}

}  // namespace

double rect_potential(const NormalizedRect& rect, double x, double t) {
  const double r = rect.r;
  if (t <= 0.0) return 0.0;
  if (t <= 1.0) return strip(r, x, t);
  // above the rectangle the t > 1 branch is the difference of two strips
  return strip(r, x, t) - strip(r, x, t - 1.0);
}

double rect_potential(const NormalizedRect& rect, const Point& p) { return rect_potential(rect, p[0], p.time()); }

double rect_sym_potential(const NormalizedRect& rect, double x, double t) {
  return 0.5 * (rect_potential(rect, x, t) + rect_potential(rect, x, 1.0 - t));
}

double rect_sym_potential(const NormalizedRect& rect, const Point& p) {
  return rect_sym_potential(rect, p[0], p.time());
}

double rect_max_M(double r) {
  if (!(r > 0.0)) throw InputError("r must be positive");
  return 0.5 * r * std::log1p(4.0 / (r * r)) + 2.0 * std::atan(0.5 * r);
}

double rect_min_m(double r) {
  if (!(r > 0.0)) throw InputError("r must be positive");
  return 0.5 * r * std::log1p(1.0 / (r * r)) + std::atan(r);
}

double capacity_formula(double lx, double lt) {
  if (!(lx > 0.0) || !(lt > 0.0)) throw InputError("rectangle sides must be positive");
  const double q = lt / lx;
  return lt / (0.5 * std::log1p(q * q) + q * std::atan(lx / lt));
}

std::string to_string(AsymptoticRegime regime) {
  switch (regime) {
    case AsymptoticRegime::Thin:
      return "thin";
    case AsymptoticRegime::Transition:
      return "transition";
    case AsymptoticRegime::Wide:
      return "wide";
  }
  return "?";
}

AsymptoticBounds asymptotic_bounds(double r) {
  if (!(r > 0.0)) throw InputError("r must be positive");
  AsymptoticBounds b;
  b.value = r / rect_min_m(r);
  if (r <= 0.5) {
    const double l = std::abs(std::log(r));
    b.lower = 1.0 / (3.0 * l);
    b.upper = 1.0 / l;
    b.regime = AsymptoticRegime::Thin;
  } else if (r >= 1.0) {
    b.lower = 0.5 * r;
    b.upper = r;
    b.regime = AsymptoticRegime::Wide;
  } else {
    const double l = std::abs(std::log(r));
    b.lower = std::min(0.5 * r, 1.0 / (3.0 * l));
    b.upper = std::max(r, 1.0 / l);
    b.regime = AsymptoticRegime::Transition;
  }
  b.inside = b.lower <= b.value && b.value <= b.upper;
  return b;
}

double cell_potential_2d(KernelKind kind, const AxisBox& cell, const Point& p) {
  if (cell.n() != 1 || p.n() != 1) throw InputError("closed-form cell potential needs n = 1");
  const double lx = cell.side(0);
  const double lt = cell.side(1);
  if (lx <= 0.0 || lt <= 0.0) return 0.0;
  const NormalizedRect rect{lx / lt, lx, lt};
  const double x = (p[0] - cell.min()[0]) / lt;
  const double t = (p[1] - cell.min()[1]) / lt;
  switch (kind) {
    case KernelKind::P:
      return lt * rect_potential(rect, x, t);
    case KernelKind::P_CONJ:
      return lt * rect_potential(rect, x, 1.0 - t);
    case KernelKind::P_SYM:
      return lt * rect_sym_potential(rect, x, t);
  }
  return 0.0;
}

}  // namespace calcap
