#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spherint/spectrum.hpp"

namespace spherint {

struct McConfig {
  std::size_t samples = 100000;  // >= 100
  std::uint64_t seed = 1;
  std::size_t batch = 16384;  // samples per stream; remainder in final batch
  bool jackknife = false;     // delete-one-batch stderr instead of delta method
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  bool log_domain = false;
  std::uint64_t seed = 0;
  std::size_t rejected = 0;
};

/// Per-batch partials for CSV export. For log-domain estimators `mean` is
/// the log of the batch weight mean and `m2` the squared relative spread
/// n*s2/s1^2 - 1; in plain domain they are the batch mean and the sum of
/// squared deviations.
struct BatchPartial {
  std::size_t batch = 0;
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
};

/// (1/N) log I_N(theta, B) by averaging W = exp(theta N sum lambda_i |e_i|^2)
/// over uniform sphere points (log-sum-exp accumulation, delta-method
/// stderr). beta = 2 runs the doubled spectrum at theta/2.
McEstimate naive_log_i(const Spectrum& spec, double theta, std::size_t n_dim,
                       const McConfig& cfg,
                       std::vector<BatchPartial>* partials = nullptr);

/// Unbiased estimator of the prefactor e^{-N J} I_N under the tilted measure
/// g_i = g~_i / sqrt(1 - 2 theta lambda_i + 2 theta v): averages
/// exp(-theta N gamma (gamma^ - v gamma)/(gamma + 1)). Mean tends to
/// m0 + m1/N + O(N^{-2}). Constant spectra give exactly 1 with stderr 0.
McEstimate tilted_estimate(const Spectrum& spec, const ThetaWindow& window,
                           std::size_t n_dim, const McConfig& cfg,
                           std::vector<BatchPartial>* partials = nullptr);

/// (1/N) log I via the closed-form exponent plus the tilted prefactor:
/// J + (1/N) log(tilted mean). Far lower variance than naive_log_i.
McEstimate log_i_tilted(const Spectrum& spec, double theta, std::size_t n_dim,
                        const McConfig& cfg);

struct SummaryStats {
  double mean = 0.0;
  double stddev = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Concentration diagnostics of gamma_N = (1/N) sum g_i^2 - 1 and
/// gamma^_N = (1/N) sum lambda_i g_i^2 - v under the tilted measure, with
/// exceedance rates of |gamma| > N^{-kappa1} and |gamma^| > N^{-kappa2}.
struct GammaStats {
  SummaryStats gamma;
  SummaryStats gamma_hat;
  double exceed_k1 = 0.0;
  double exceed_k2 = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  /// 1/2 > kappa1 > 2 kappa2 and 2 kappa1 + kappa2 > 1 (warning when false).
  bool kappa_ok = false;
  std::uint64_t seed = 0;
};

GammaStats gamma_stats(const Spectrum& spec, const ThetaWindow& window,
                       std::size_t n_dim, double kappa1, double kappa2,
                       const McConfig& cfg);

}  // namespace spherint
