#include "spherint/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spherint/errors.hpp"
#include "spherint/quadrature.hpp"

namespace spherint {

Spectrum Spectrum::make(std::vector<double> eigenvalues, int beta) {
  if (eigenvalues.empty()) throw DomainError("Spectrum: empty eigenvalue list");
  for (double x : eigenvalues)
    if (!std::isfinite(x)) throw DomainError("Spectrum: non-finite eigenvalue");
  if (beta != 1 && beta != 2) throw DomainError("Spectrum: beta must be 1 or 2");
  std::sort(eigenvalues.begin(), eigenvalues.end());
  Spectrum s;
  s.lam_ = std::move(eigenvalues);
  s.beta_ = beta;
  return s;
}

double Spectrum::sup_abs() const {
  return std::max(std::abs(lam_.front()), std::abs(lam_.back()));
}

double Spectrum::mean() const {
  double s = 0.0;
  for (double x : lam_) s += x;
  return s / static_cast<double>(lam_.size());
}

double Spectrum::moment2() const {
  double s = 0.0;
  for (double x : lam_) s += x * x;
  return s / static_cast<double>(lam_.size());
}

Spectrum Spectrum::doubled() const {
  std::vector<double> d;
  d.reserve(2 * lam_.size());
  for (double x : lam_) {
    d.push_back(x);
    d.push_back(x);
  }
  Spectrum s;
  s.lam_ = std::move(d);
  s.beta_ = 1;
  return s;
}

Spectrum Spectrum::resampled(std::size_t n) const {
  if (n == 0) throw DomainError("Spectrum::resampled: n must be positive");
  const std::size_t m = lam_.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    std::size_t idx = static_cast<std::size_t>(p * static_cast<double>(m));
    if (idx >= m) idx = m - 1;
    out[k] = lam_[idx];
  }
  Spectrum s;
  s.lam_ = std::move(out);
  s.beta_ = beta_;
  return s;
}

Spectrum Spectrum::with_beta(int beta) const {
  if (beta != 1 && beta != 2) throw DomainError("Spectrum: beta must be 1 or 2");
  Spectrum s = *this;
  s.beta_ = beta;
  return s;
}

ThetaWindow ThetaWindow::of(const Spectrum& spec, double theta) {
  if (!std::isfinite(theta)) throw DomainError("ThetaWindow: non-finite theta");
  const double m = spec.sup_abs();
  ThetaWindow w;
  w.theta = theta;
  w.bound = 1.0 / (4.0 * m * m + 10.0 * m + 1.0);
  w.admissible = std::abs(theta) < w.bound;
  return w;
}

double hilbert(const Spectrum& spec, double z, int k) {
  if (k < 1) throw DomainError("hilbert: k must be >= 1");
  if (z >= spec.min() && z <= spec.max())
    throw DomainError("hilbert: z inside the spectral hull");
  double fact = 1.0;  // (k-1)!
  for (int j = 2; j < k; ++j) fact *= j;
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  double s = 0.0;
  for (double lam : spec.eigenvalues()) s += 1.0 / std::pow(z - lam, k);
  return sign * fact * s / static_cast<double>(spec.size());
}

namespace {

// H(w) - target and H'(w) in one pass.
std::pair<double, double> hilbert_with_derivative(const Spectrum& spec,
                                                  double w) {
  double h = 0.0, dh = 0.0;
  for (double lam : spec.eigenvalues()) {
    const double inv = 1.0 / (w - lam);
    h += inv;
    dh -= inv * inv;
  }
  const double n = static_cast<double>(spec.size());
  return {h / n, dh / n};
}

// Solves H(w) = target on the branch (lambda_max, inf) for target > 0 or
// (-inf, lambda_min) for target < 0. The bracket
//   [edge + 1/(target N), edge + 1/target]
// always contains the root: 1/(w - edge) bounds H between (1/N)/(w - edge)
// and 1/(w - edge) termwise on the branch.
double solve_hilbert_inverse(const Spectrum& spec, double target) {
  const double n = static_cast<double>(spec.size());
  const double edge = target > 0 ? spec.max() : spec.min();
  double lo = edge + 1.0 / (target * n);
  double hi = edge + 1.0 / target;
  if (target < 0) std::swap(lo, hi);

  auto residual = [&](double w) {
    return hilbert_with_derivative(spec, w).first - target;
  };
  // H is decreasing on both branches: residual >= 0 at lo, <= 0 at hi.
  const double tol = 1e-9 * std::abs(target);
  if (residual(lo) < -tol || residual(hi) > tol)
    throw ConvergenceError("solve_hilbert_inverse: bracket failure");
  double a = lo, b = hi;
  for (int it = 0; it < 80 && (b - a) > 1e-8 * std::max(1.0, std::abs(a)); ++it) {
    const double mid = 0.5 * (a + b);
    if (residual(mid) >= 0)
      a = mid;
    else
      b = mid;
  }
  double w = 0.5 * (a + b);
  for (int it = 0; it < 60; ++it) {
    auto [h, dh] = hilbert_with_derivative(spec, w);
    const double f = h - target;
    if (std::abs(f) <= 1e-16 * std::abs(target)) break;
    double next = w - f / dh;
    if (next <= lo || next >= hi) next = 0.5 * (a + b);
    if (next == w) break;
    w = next;
  }
  return w;
}

}  // namespace

TiltPoint solve_v(const Spectrum& spec, const ThetaWindow& window) {
  const double theta = window.theta;
  TiltPoint t;
  t.theta = theta;
  if (theta == 0.0) {
    t.v = spec.mean();
    return t;
  }
  if (spec.min() == spec.max()) {
    // Constant spectrum: H(w) = 1/(w - lambda0), so v = lambda0 exactly.
    t.v = spec.min();
    return t;
  }
  const double w = solve_hilbert_inverse(spec, 2.0 * theta);
  t.v = w - 1.0 / (2.0 * theta);

  // The subtraction above loses absolute accuracy once |1/(2 theta)| is
  // large; polish v directly on (1/N) sum 1/(1 - 2 theta lambda + 2 theta v)
  // = 1, which is cancellation-free in v.
  const double n = static_cast<double>(spec.size());
  for (int it = 0; it < 40; ++it) {
    double phi = -1.0, dphi = 0.0;
    for (double lam : spec.eigenvalues()) {
      const double d = 1.0 - 2.0 * theta * lam + 2.0 * theta * t.v;
      phi += (1.0 / d) / n;
      dphi -= (2.0 * theta / (d * d)) / n;
    }
    if (std::abs(phi) <= 1e-16) break;
    const double next = t.v - phi / dphi;
    if (next == t.v) break;
    t.v = next;
  }

  // As theta -> 0 the equation above determines v only to O(eps/theta);
  // the mean fixed point psi(v) = (1/N) sum lambda/d - v keeps a derivative
  // near -1 there and pins v absolutely. Use it as a second stage when the
  // conditioning allows.
  for (int it = 0; it < 40; ++it) {
    double psi = -t.v, dpsi = -1.0;
    for (double lam : spec.eigenvalues()) {
      const double d = 1.0 - 2.0 * theta * lam + 2.0 * theta * t.v;
      psi += (lam / d) / n;
      dpsi -= (2.0 * theta * lam / (d * d)) / n;
    }
    if (std::abs(dpsi) < 0.5 || std::abs(psi) <= 1e-16 * std::max(1.0, std::abs(t.v)))
      break;
    const double next = t.v - psi / dpsi;
    if (next == t.v) break;
    t.v = next;
  }
  double s1 = 0.0, sl = 0.0;
  for (double lam : spec.eigenvalues()) {
    const double d = 1.0 - 2.0 * theta * lam + 2.0 * theta * t.v;
    s1 += 1.0 / d;
    sl += lam / d;
  }
  t.residual_a1 = std::abs(s1 / n - 1.0);
  t.residual_mean = std::abs(sl / n - t.v);
  // Cannot happen on the stated branch; a violation means a numerical bug.
  if (t.residual_a1 > 1e-12 || t.residual_mean > 1e-10)
    throw ConvergenceError("solve_v: fixed-point residuals above tolerance");
  return t;
}

double a_coeff(const Spectrum& spec, const ThetaWindow& window,
               const TiltPoint& tilt, int k) {
  if (k < 1) throw DomainError("a_coeff: k must be >= 1");
  const double theta = window.theta;
  double s = 0.0;
  for (double lam : spec.eigenvalues()) {
    const double d = 1.0 - 2.0 * theta * lam + 2.0 * theta * tilt.v;
    if (d <= 0.0) throw DomainError("a_coeff: nonpositive denominator (wrong branch)");
    s += 1.0 / std::pow(d, k);
  }
  return s / static_cast<double>(spec.size());
}

FgPair f_g(const Spectrum& spec, const ThetaWindow& window,
           const TiltPoint& tilt) {
  const double theta = window.theta;
  double f = 0.0, g = 0.0;
  for (double lam : spec.eigenvalues()) {
    const double d = 1.0 - 2.0 * theta * lam + 2.0 * theta * tilt.v;
    if (d <= 0.0) throw DomainError("f_g: nonpositive denominator (wrong branch)");
    f += lam / (d * d);
    g += lam * lam / (d * d);
  }
  const double n = static_cast<double>(spec.size());
  return {f / n, g / n};
}

double r_transform(const Spectrum& spec, double z) {
  if (z == 0.0) throw DomainError("r_transform: z must be nonzero");
  if (spec.min() == spec.max()) return spec.min();
  const double w = solve_hilbert_inverse(spec, z);
  return w - 1.0 / z;
}

double r_integral(const Spectrum& spec, const ThetaWindow& window,
                  const TiltPoint& tilt) {
  const double theta = window.theta;
  if (theta == 0.0) return 0.0;
  double slog = 0.0;
  for (double lam : spec.eigenvalues()) {
    const double d = 1.0 - 2.0 * theta * lam + 2.0 * theta * tilt.v;
    if (d <= 0.0) throw DomainError("r_integral: nonpositive denominator");
    slog += std::log(d);
  }
  return theta * tilt.v - 0.5 * slog / static_cast<double>(spec.size());
}

double r_integral_quadrature(const Spectrum& spec, double theta) {
  if (theta == 0.0) return 0.0;
  auto r = [&](double s) { return r_transform(spec, s); };
  return 0.5 * quad::integrate_adaptive(r, 0.0, 2.0 * theta, 1e-11, 1e-13);
}

}  // namespace spherint
