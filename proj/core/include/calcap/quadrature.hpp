#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "calcap/geometry.hpp"

namespace calcap {

struct CubatureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_boxes = 400000;
};

struct CubatureResult {
  double value = 0.0;
  double error = 0.0;
  int boxes = 0;
};

/// Weak point singularity of the integrand: |f(y)| <= coefficient * |y - point|^{-n} near `point`.
/// A coefficient <= 0 marks a bounded integrand that only needs the split along the point's coordinate planes.
struct Singularity {
  Point point;
  double coefficient = 1.0;
};

using Integrand = std::function<double(const Point&)>;

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

/// Globally adaptive tensor Gauss cubature of f over a box. The box is first split along the coordinate planes of the
/// singular point (inside or not) so that it only sits at subbox corners; such corner boxes carry the a priori bound
/// coefficient * sigma_{n+1} * diag as their error and are refined by bisection like any other box.
/// Throws QuadratureError when max_boxes is exhausted before the tolerance is met.
CubatureResult integrate_box(const Integrand& f, const AxisBox& box, const std::optional<Singularity>& singular = {},
                             const CubatureOptions& options = {});

}  // namespace calcap
