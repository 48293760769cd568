#include "spherint/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "spherint/errors.hpp"

namespace spherint::quad {

namespace {

// Legendre P_n(x) and its derivative by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      std::tie(p, dp) = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    std::tie(p, dp) = legendre(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels, int n) {
  const GaussLegendre& rule = gauss_legendre(n);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    total += acc * 0.5 * h;
  }
  return total;
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol, double abs_tol,
                          int max_panels) {
  double prev = integrate(f, a, b, 1);
  for (int panels = 2; panels <= max_panels; panels *= 2) {
    const double cur = integrate(f, a, b, panels);
    if (std::abs(cur - prev) <= abs_tol + rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
  throw ConvergenceError("integrate_adaptive: no convergence at max panel count");
}

std::complex<double> integrate2d(
    const std::function<std::complex<double>(double, double)>& f, double lo,
    double hi, int panels, int n) {
  const GaussLegendre& rule = gauss_legendre(n);
  const double h = (hi - lo) / panels;
  std::complex<double> total = 0.0;
  std::vector<double> pts(static_cast<std::size_t>(panels) * n);
  std::vector<double> wts(pts.size());
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    for (int i = 0; i < n; ++i) {
      pts[p * n + i] = mid + 0.5 * h * rule.nodes[i];
      wts[p * n + i] = 0.5 * h * rule.weights[i];
    }
  }
  for (std::size_t ix = 0; ix < pts.size(); ++ix) {
    std::complex<double> row = 0.0;
    for (std::size_t iy = 0; iy < pts.size(); ++iy)
      row += wts[iy] * f(pts[ix], pts[iy]);
    total += wts[ix] * row;
  }
  return total;
}

}  // namespace spherint::quad
