#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "spherint/rng.hpp"
#include "spherint/spectrum.hpp"

namespace testutil {

// Deterministic uniform [-1, 1] spectrum of size n.
inline spherint::Spectrum random_spectrum(std::size_t n, std::uint64_t seed,
                                          int beta = 1) {
  spherint::SampleStream s(seed, 0);
  std::vector<double> lam(n);
  for (auto& x : lam) x = 2.0 * s.uniform() - 1.0;
  return spherint::Spectrum::make(std::move(lam), beta);
}

// Closed-form tilt point for the two-atom spectrum {-1, +1}:
// H(w) = w/(w^2 - 1) = 2 theta, root on the outer branch, v = w - 1/(2 theta).
inline double two_atom_v(double theta) {
  const double w = (1.0 + std::sqrt(1.0 + 16.0 * theta * theta)) / (4.0 * theta);
  return w - 1.0 / (2.0 * theta);
}

inline double semicircle_cdf(double t) {
  if (t <= -2.0) return 0.0;
  if (t >= 2.0) return 1.0;
  return 0.5 + t * std::sqrt(4.0 - t * t) / (4.0 * M_PI) + std::asin(t / 2.0) / M_PI;
}

// n quantiles of the semicircle law on [-2, 2].
inline spherint::Spectrum semicircle_spectrum(std::size_t n) {
  std::vector<double> lam(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    double lo = -2.0, hi = 2.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (semicircle_cdf(mid) < p ? lo : hi) = mid;
    }
    lam[k] = 0.5 * (lo + hi);
  }
  return spherint::Spectrum::make(std::move(lam));
}

inline spherint::Spectrum equispaced_spectrum(std::size_t n, int beta = 1) {
  std::vector<double> lam(n);
  for (std::size_t i = 0; i < n; ++i)
    lam[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  return spherint::Spectrum::make(std::move(lam), beta);
}

// Brute-force Schur polynomial: sum over semistandard tableaux of shape mu
// with entries in 1..n, rows weakly increasing, columns strictly increasing.
inline double schur_brute_force(const std::vector<long>& mu,
                                const std::vector<double>& x) {
  const std::size_t rows = mu.size();
  const std::size_t n = x.size();
  std::vector<std::vector<int>> tab(rows);
  for (std::size_t r = 0; r < rows; ++r) tab[r].assign(mu[r], 0);

  double total = 0.0;
  // Fill cells row-major within each row, recursing over (row, col).
  std::function<void(std::size_t, std::size_t, double)> fill =
      [&](std::size_t r, std::size_t c, double weight) {
        while (r < rows && mu[r] == 0) ++r, c = 0;
        if (r == rows) {
          total += weight;
          return;
        }
        if (c == static_cast<std::size_t>(mu[r])) {
          fill(r + 1, 0, weight);
          return;
        }
        int lo = 1;
        if (c > 0) lo = std::max(lo, tab[r][c - 1]);
        if (r > 0 && c < tab[r - 1].size()) lo = std::max(lo, tab[r - 1][c] + 1);
        for (int v = lo; v <= static_cast<int>(n); ++v) {
          tab[r][c] = v;
          fill(r, c + 1, weight * x[v - 1]);
        }
      };
  fill(0, 0, 1.0);
  return total;
}

}  // namespace testutil
