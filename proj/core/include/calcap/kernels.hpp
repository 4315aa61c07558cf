#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "calcap/geometry.hpp"

namespace calcap {

/// P(x̄) = t/|x̄|^{n+1} on {t > 0}, its conjugate P*(x̄) = P(-x̄), and the symmetric part (P + P*)/2.
enum class KernelKind { P, P_CONJ, P_SYM };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

/// Radial profile ψ: 0 on |x̄| <= inner, 1 on |x̄| >= outer, C^1 smoothstep in between.
class BumpProfile {
 public:
  BumpProfile() = default;
  BumpProfile(double inner_radius, double outer_radius);

  double inner_radius() const { return inner_; }
  double outer_radius() const { return outer_; }
  /// Degree of the transition polynomial (the cubic smoothstep 3u^2 - 2u^3).
  int degree() const { return 3; }

  /// ψ(ρ) for a radius ρ >= 0.
  double operator()(double radius) const;
  /// dψ/dρ.
  double derivative(double radius) const;
  /// sup |∇ψ| = 3 / (2 (outer - inner)).
  double gradient_bound() const;
  /// ∫_0^ρ (1 - ψ(s)) ds, constant for ρ >= outer.
  double complement_primitive(double radius) const;

 private:
  double inner_ = 0.5;
  double outer_ = 1.0;
};

/// Plain kernel value. Throws InputError("kernel singularity") at the origin.
double eval_kernel(KernelKind kind, const Point& x);

/// Kernel without the origin check; callers guarantee x ≠ 0.
double kernel_unchecked(KernelKind kind, const Point& x);

/// 1-Lipschitz suppression weight Λ, typically dist(·, F).
using LipschitzDist = std::function<double(const Point&)>;

/// K(x̄-ȳ) / (1 + K(x̄-ȳ)^2 Λ(x̄)^n Λ(ȳ)^n).
double eval_suppressed(KernelKind kind, const Point& x, const Point& y, const LipschitzDist& lambda);

/// Same, with the two Λ values supplied directly.
double suppressed_value(KernelKind kind, const Point& x, const Point& y, double lambda_x, double lambda_y);

/// K(x̄) ψ(|x̄|/τ); zero at the origin.
double eval_regularized(KernelKind kind, const Point& x, double tau, const BumpProfile& bump);

/// Largest sampled |K(x̄-ȳ) - K(x̄'-ȳ)| |x̄-ȳ|^{n+1} / |x̄-x̄'| over triples with |x̄-x̄'| <= |x̄-ȳ|/2.
double cz_smoothness_probe(KernelKind kind, int n, int samples, std::uint64_t seed);

/// The same probe for the suppressed kernel with weight Λ, perturbing the first argument.
double cz_smoothness_probe_suppressed(KernelKind kind, int n, const LipschitzDist& lambda, const AxisBox& region,
                                      int samples, std::uint64_t seed);

/// Largest sampled |Kψ_τ(x̄) - Kψ_τ(x̄')| |x̄|^{n+1} / |x̄-x̄'| with |x̄-x̄'| <= |x̄|/2 and |x̄|/τ log-uniform in [0.1, 10].
double regularized_cz_probe(KernelKind kind, int n, double tau, const BumpProfile& bump, int samples,
                            std::uint64_t seed);

}  // namespace calcap
