#pragma once

#include <cstddef>
#include <vector>

namespace spherint {

/// Empirical spectrum of a real symmetric or Hermitian matrix: the sorted
/// eigenvalue list plus the ensemble symmetry class (beta = 1 orthogonal,
/// beta = 2 unitary). Repeated eigenvalues are fully supported.
class Spectrum {
 public:
  static Spectrum make(std::vector<double> eigenvalues, int beta = 1);

  const std::vector<double>& eigenvalues() const { return lam_; }
  int beta() const { return beta_; }
  std::size_t size() const { return lam_.size(); }
  double min() const { return lam_.front(); }
  double max() const { return lam_.back(); }
  /// M = max_i |lambda_i|.
  double sup_abs() const;
  double mean() const;
  double moment2() const;

  /// Each eigenvalue duplicated, beta = 1: the unitary-to-orthogonal
  /// reduction D_{2N}.
  Spectrum doubled() const;

  /// n quantiles of the empirical measure (lambda'_k = Q((k+1/2)/n)).
  /// The identity when n == size(); tiles {-1,+1} to N copies, etc.
  Spectrum resampled(std::size_t n) const;

  Spectrum with_beta(int beta) const;

 private:
  Spectrum() = default;
  std::vector<double> lam_;
  int beta_ = 1;
};

/// Validity window |theta| < 1/(4M^2 + 10M + 1) of the asymptotic expansion.
/// The transforms themselves are defined for all theta != 0; operations run
/// outside the window and the flag is advisory.
struct ThetaWindow {
  double theta = 0.0;
  double bound = 0.0;
  bool admissible = false;

  static ThetaWindow of(const Spectrum& spec, double theta);
};

/// Solution v(theta) = R(2 theta) of the tilt equation
/// H(v + 1/(2 theta)) = 2 theta, with the residuals of the two fixed-point
/// identities it satisfies:
///   (1/N) sum 1/(1 - 2 theta lambda_i + 2 theta v) = 1
///   (1/N) sum lambda_i/(1 - 2 theta lambda_i + 2 theta v) = v
struct TiltPoint {
  double v = 0.0;
  double theta = 0.0;
  double residual_a1 = 0.0;
  double residual_mean = 0.0;
};

/// k = 1: Hilbert transform H(z) = (1/N) sum 1/(z - lambda_i) off the
/// spectral hull. k >= 2: the (k-1)-th derivative of H at z, i.e.
/// (1/N) sum (-1)^{k-1}(k-1)!/(z - lambda_i)^k.
double hilbert(const Spectrum& spec, double z, int k = 1);

/// Root of the tilt equation on the branch matching sign(theta).
/// theta = 0 returns the analytic limit v = mean(lambda).
TiltPoint solve_v(const Spectrum& spec, const ThetaWindow& window);

/// A_k = (1/N) sum (1 - 2 theta lambda_i + 2 theta v)^{-k}. A_1 = 1 at the
/// tilt point. Throws DomainError if any denominator is <= 0 (wrong branch).
double a_coeff(const Spectrum& spec, const ThetaWindow& window,
               const TiltPoint& tilt, int k);

struct FgPair {
  double f = 0.0;  // (1/N) sum lambda_i / (.)^2
  double g = 0.0;  // (1/N) sum lambda_i^2 / (.)^2
};
FgPair f_g(const Spectrum& spec, const ThetaWindow& window,
           const TiltPoint& tilt);

/// R(z) = H^{-1}(z) - 1/z on the branch matching sign(z).
double r_transform(const Spectrum& spec, double z);

/// J(theta) = theta v - (1/2N) sum log(1 - 2 theta lambda_i + 2 theta v)
///          = (1/2) int_0^{2 theta} R(s) ds   (closed form).
double r_integral(const Spectrum& spec, const ThetaWindow& window,
                  const TiltPoint& tilt);

/// Reference path: (1/2) int_0^{2 theta} R(s) ds by adaptive quadrature of
/// r_transform. Cross-checks the closed form.
double r_integral_quadrature(const Spectrum& spec, double theta);

}  // namespace spherint
