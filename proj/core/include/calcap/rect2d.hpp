#pragma once

#include <string>

#include "calcap/geometry.hpp"
#include "calcap/kernels.hpp"

namespace calcap {

/// R_0 = [0, r] x [0, 1] obtained from an l_x by l_t rectangle by dilating with 1/l_t.
struct NormalizedRect {
  double r = 1.0;
  double lx = 1.0;
  double lt = 1.0;

  static NormalizedRect from_sides(double lx, double lt);
  static NormalizedRect unit_height(double r);
};

/// P * (Lebesgue on R_0) at (x, t).
double rect_potential(const NormalizedRect& rect, double x, double t);
double rect_potential(const NormalizedRect& rect, const Point& p);

/// P_sym * (Lebesgue on R_0) = (P*mu(x, t) + P*mu(x, 1 - t)) / 2.
double rect_sym_potential(const NormalizedRect& rect, double x, double t);
double rect_sym_potential(const NormalizedRect& rect, const Point& p);

/// max of P*mu, attained at (r/2, 1).
double rect_max_M(double r);
/// twice the vertex value of P_sym*mu; also P*mu at (r/2, 1/2).
double rect_min_m(double r);

/// l_t [ ln(1 + l_t^2/l_x^2)/2 + (l_t/l_x) arctan(l_x/l_t) ]^{-1}.
double capacity_formula(double lx, double lt);

enum class AsymptoticRegime { Thin, Transition, Wide };
std::string to_string(AsymptoticRegime regime);

struct AsymptoticBounds {
  double lower = 0.0;
  double upper = 0.0;
  AsymptoticRegime regime = AsymptoticRegime::Transition;
  double value = 0.0;  // r / m(r)
  bool inside = false;
};

/// Envelopes of r/m(r): [1/(3|ln r|), 1/|ln r|] for r <= 1/2, [r/2, r] for r >= 1, else the hull of the two.
AsymptoticBounds asymptotic_bounds(double r);

/// Potential of a general cell with unit density, obtained from the normalized formula by translation and scaling.
/// Only the plane case: the cell and p must have n = 1.
double cell_potential_2d(KernelKind kind, const AxisBox& cell, const Point& p);

}  // namespace calcap
