#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace spherint::hciz {

/// Strictly increasing eigenvalue list; the HCIZ determinant formula needs
/// simple spectra. min_gap is checked against gap_tolerance at construction.
struct DistinctSpectrum {
  std::vector<double> values;
  double min_gap = 0.0;

  static DistinctSpectrum make(std::vector<double> values,
                               double gap_tolerance = 1e-8);
};

/// Weakly decreasing nonnegative integer parts, length N.
struct Partition {
  std::vector<long> parts;

  static Partition make(std::vector<long> parts);
  std::size_t n() const { return parts.size(); }
};

struct HcizResult {
  double log_value = 0.0;
  double value = 0.0;  // exp(log_value), +inf when not representable
  std::size_t n = 0;
  std::string method;
  int precision_bits = 0;  // 0 for the double path
};

/// HCIZ determinant formula for beta = 2 with simple spectra:
///   I_N(A, B) = (prod_{p=1}^{N-1} p!) det(e^{N a_i b_j})
///               / (N^{(N^2-N)/2} Delta(a) Delta(b)).
/// Log-domain evaluation with row scaling; flips to an adaptive-precision
/// MPFR determinant when the double path loses more than 12 digits.
HcizResult hciz_exact(const DistinctSpectrum& a, const DistinctSpectrum& b,
                      std::size_t n);

/// Rank-one limit A = diag(theta, 0, ..., 0): the degenerate rows are
/// eliminated analytically (divided differences turn them into the Taylor
/// rows (N b_j)^k / k!), cross-checked against an epsilon-perturbed
/// Richardson ladder. Throws DisagreementError if the two paths differ by
/// more than 1e-5 relative.
HcizResult rank_one_exact(double theta, const DistinctSpectrum& b,
                          std::size_t n);

/// Internal paths of rank_one_exact, exposed for verification.
double rank_one_log_divided_difference(double theta, const DistinctSpectrum& b,
                                       std::size_t n, int* precision_bits = nullptr);
double rank_one_log_epsilon_limit(double theta, const DistinctSpectrum& b,
                                  std::size_t n);

struct SchurResult {
  double value = 0.0;
  bool perturbed = false;  // coincident x entries nudged by relative 1e-7
};

/// Normalized Schur polynomial S_mu(x) / S_mu(1,...,1): bialternant
/// determinant over the Weyl dimension product. N <= 12.
SchurResult schur_ratio(const Partition& mu, std::vector<double> x);

struct SchurIdentitySides {
  double hciz_log = 0.0;
  double schur_route_log = 0.0;
};

/// Both routes to log I_N(A, B) when B's spectrum is the integer vector
/// lambda_i(B) = mu_i + N - i: the determinant formula, and the normalized
/// Schur ratio times prod (e^{N a_i} - e^{N a_j}) / (N a_i - N a_j).
SchurIdentitySides schur_identity(const DistinctSpectrum& a, const Partition& mu);

}  // namespace spherint::hciz
