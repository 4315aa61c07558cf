#include "calcap/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "calcap/errors.hpp"

namespace calcap {

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::P:
      return "P";
    case KernelKind::P_CONJ:
      return "P_CONJ";
    case KernelKind::P_SYM:
      return "P_SYM";
  }
  return "?";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "P") return KernelKind::P;
  if (name == "P_CONJ" || name == "P*") return KernelKind::P_CONJ;
  if (name == "P_SYM" || name == "P_sy") return KernelKind::P_SYM;
  throw InputError("unknown kernel kind '" + name + "' (expected P, P_CONJ or P_SYM)");
}

BumpProfile::BumpProfile(double inner_radius, double outer_radius) : inner_(inner_radius), outer_(outer_radius) {
  if (!(inner_radius > 0.0 && inner_radius < outer_radius)) {
    throw InputError("bump profile needs 0 < inner_radius < outer_radius");
  }
}

double BumpProfile::operator()(double radius) const {
  if (radius <= inner_) return 0.0;
  if (radius >= outer_) return 1.0;
  const double u = (radius - inner_) / (outer_ - inner_);
  return u * u * (3.0 - 2.0 * u);
}

double BumpProfile::derivative(double radius) const {
  if (radius <= inner_ || radius >= outer_) return 0.0;
  const double w = outer_ - inner_;
  const double u = (radius - inner_) / w;
  return 6.0 * u * (1.0 - u) / w;
}

double BumpProfile::gradient_bound() const { return 1.5 / (outer_ - inner_); }

double BumpProfile::complement_primitive(double radius) const {
  if (radius <= inner_) return radius;
  const double w = outer_ - inner_;
  const double u = std::min((radius - inner_) / w, 1.0);
  // ∫_0^u (1 - 3v^2 + 2v^3) dv = u - u^3 + u^4/2
  return inner_ + w * (u - u * u * u + 0.5 * u * u * u * u);
}

double kernel_unchecked(KernelKind kind, const Point& x) {
  const int n = x.n();
  const double t = x.time();
  double t_eff = 0.0;
  switch (kind) {
    case KernelKind::P:
      if (t <= 0.0) return 0.0;
      t_eff = t;
      break;
    case KernelKind::P_CONJ:
      if (t >= 0.0) return 0.0;
      t_eff = -t;
      break;
    case KernelKind::P_SYM:
      t_eff = 0.5 * std::abs(t);
      break;
  }
  const double r = x.norm();
  return t_eff / std::pow(r, n + 1);
}

double eval_kernel(KernelKind kind, const Point& x) {
  if (x.norm2() == 0.0) throw InputError("kernel singularity");
  return kernel_unchecked(kind, x);
}

double suppressed_value(KernelKind kind, const Point& x, const Point& y, double lambda_x, double lambda_y) {
  const Point z = x - y;
  if (z.norm2() == 0.0) throw InputError("kernel singularity");
  const double k = kernel_unchecked(kind, z);
  const int n = x.n();
  const double damp = k * k * std::pow(lambda_x * lambda_y, n);
  return k / (1.0 + damp);
}

double eval_suppressed(KernelKind kind, const Point& x, const Point& y, const LipschitzDist& lambda) {
  return suppressed_value(kind, x, y, lambda(x), lambda(y));
}

double eval_regularized(KernelKind kind, const Point& x, double tau, const BumpProfile& bump) {
  if (!(tau > 0.0)) throw InputError("regularization scale tau must be positive");
  const double r = x.norm();
  const double psi = bump(r / tau);
  if (psi == 0.0) return 0.0;
  return kernel_unchecked(kind, x) * psi;
}

namespace {

Point random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Point p(n);
  double s = 0.0;
  do {
    for (int i = 0; i < p.dim(); ++i) p[i] = g(rng);
    s = p.norm();
  } while (s == 0.0);
  return p * (1.0 / s);
}

// Displacement with |h| <= bound, log-uniform in magnitude so that tiny steps are probed too.
Point random_step(int n, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double mag = bound * std::pow(10.0, -4.0 * u(rng));
  return random_unit(n, rng) * mag;
}

}  // namespace

double cz_smoothness_probe(KernelKind kind, int n, int samples, std::uint64_t seed) {
  if (samples < 1) throw InputError("cz_smoothness_probe needs at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    // Homogeneity makes the ratio scale invariant; still vary the scale to exercise rounding.
    const double scale = std::pow(10.0, 4.0 * u(rng) - 2.0);
    const Point z = random_unit(n, rng) * scale;
    const Point h = random_step(n, 0.5 * scale, rng);
    const double hn = h.norm();
    if (hn == 0.0) continue;
    const double diff = std::abs(kernel_unchecked(kind, z) - kernel_unchecked(kind, z + h));
    worst = std::max(worst, diff * std::pow(scale, n + 1) / hn);
  }
  return worst;
}

double cz_smoothness_probe_suppressed(KernelKind kind, int n, const LipschitzDist& lambda, const AxisBox& region,
                                      int samples, std::uint64_t seed) {
  if (samples < 1) throw InputError("cz_smoothness_probe needs at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] {
    Point p = region.min();
    for (int i = 0; i < p.dim(); ++i) p[i] = region.min()[i] + region.side(i) * u(rng);
    return p;
  };
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Point x = draw();
    const Point y = draw();
    const double gap = distance(x, y);
    if (gap == 0.0) continue;
    const Point xp = x + random_step(n, 0.5 * gap, rng);
    const double hn = distance(x, xp);
    if (hn == 0.0) continue;
    const double ly = lambda(y);
    const double diff =
        std::abs(suppressed_value(kind, x, y, lambda(x), ly) - suppressed_value(kind, xp, y, lambda(xp), ly));
    worst = std::max(worst, diff * std::pow(gap, n + 1) / hn);
  }
  return worst;
}

double regularized_cz_probe(KernelKind kind, int n, double tau, const BumpProfile& bump, int samples,
                            std::uint64_t seed) {
  if (samples < 1) throw InputError("regularized_cz_probe needs at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double r = tau * std::pow(10.0, 2.0 * u(rng) - 1.0);
    const Point x = random_unit(n, rng) * r;
    const Point h = random_step(n, 0.5 * r, rng);
    const double hn = h.norm();
    if (hn == 0.0) continue;
    const double diff = std::abs(eval_regularized(kind, x, tau, bump) - eval_regularized(kind, x + h, tau, bump));
    worst = std::max(worst, diff * std::pow(r, n + 1) / hn);
  }
  return worst;
}

}  // namespace calcap
