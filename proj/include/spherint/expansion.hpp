#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "spherint/gauss_moments.hpp"
#include "spherint/spectrum.hpp"

namespace spherint {

/// Expansion data at (spectrum, theta): the tilt point, the normalized
/// Hilbert-derivative coefficients A_2..A_kmax, F, G, the exponent integral
/// J (beta convention: (1/2) int_0^{2 theta} R for beta = 1,
/// int_0^theta R for beta = 2) and the coefficients
///   m0 = 1/sqrt(A_2)
///   m1 = m0 ((3/2) A_4/A_2^2 - (5/3) A_3^2/A_2^3 + 1/6)   (beta = 1)
/// with m1 exactly halved for beta = 2.
struct ExpansionResult {
  int beta = 1;
  double theta = 0.0;
  double v = 0.0;
  std::vector<double> a;  // a[k] = A_k for k = 0..k_max (A_0 = A_1 = 1)
  double f = 0.0;
  double g = 0.0;
  double m0 = 1.0;
  double m1 = 0.0;
  double j = 0.0;
  bool admissible = true;

  double A(std::size_t k) const { return a.at(k); }
  int k_max() const { return static_cast<int>(a.size()) - 1; }
};

/// The beta = 2 case routes through the doubling map D_{2N} at theta/2, so
/// A_k = (1/N) sum (1 - theta lambda_i + theta v)^{-k} with v = R(theta).
ExpansionResult coefficients(const Spectrum& spec, const ThetaWindow& window,
                             int k_max = 6);

/// log I_N(theta, B) approximated as N J + log(m0) (order 0) or
/// N J + log(m0 + m1/N) (order 1). Throws ShapeError unless spec.size() == n.
double log_i_approx(const Spectrum& spec, const ThetaWindow& window,
                    std::size_t n, int order);

/// The 2x2 quadratic form K~(t) of the two-variable Gaussian reduction, with
/// A_2, F, G evaluated at (theta, v(theta)) and t the free prefactor
/// parameter. t = theta gives K, whose determinant equals A_2. Uses the
/// beta = 1 parameterization of the given spectrum.
ComplexQuadraticForm k_matrix(const Spectrum& spec, const ThetaWindow& window,
                              double t);

/// Cross-derivation of m1 from the appendix closed forms for f0, f1, f2 and
/// from Wick moments of the p0, p1, p2 polynomials with covariance K~^{-1}.
/// All entries are 1/N coefficients.
struct AppendixReport {
  double f0_coeff = 0.0;  // (7/6 - 3/A2 + 2A3/A2^2 - (5/3)A3^2/A2^3 + (3/2)A4/A2^2)/sqrt(A2)
  double f1_part = 0.0;   // -theta d/dt f1|_theta  = (-4 + 6/A2 - 2A3/A2^2)/sqrt(A2)
  double f2_part = 0.0;   // (theta^2/2 d2/dt2 + theta d/dt) f2|_theta = (3 - 3/A2)/sqrt(A2)
  double combined = 0.0;  // analytic t-derivatives of the closed forms
  double combined_central = 0.0;  // central differences at step 1e-5
  double m1 = 0.0;                // closed-form value
  double diff = 0.0;              // combined - m1
  double f0_coeff_wick = 0.0;
  double f1_part_wick = 0.0;
  double f2_part_wick = 0.0;
};

AppendixReport appendix_check(const Spectrum& spec, const ThetaWindow& window);

/// Richardson extraction of m_0..m_order from exact prefactor values
/// e^{-N J} I_N sampled at distinct N. Input pairs are (N, prefactor).
/// Error estimates come from dropping the smallest-N point of the tableau.
struct RichardsonResult {
  std::vector<double> m;
  std::vector<double> err;
};

RichardsonResult richardson_extract(
    const std::vector<std::pair<double, double>>& values, int order);

}  // namespace spherint
