#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "spherint/monte_carlo.hpp"
#include "spherint/spectrum.hpp"

namespace spherint::freeness {

/// Entry law of sqrt(N) X(i,j): mean zero, variance one.
enum class EntryLaw { gaussian, rademacher, uniform };

EntryLaw parse_law(const std::string& name);
std::string law_name(EntryLaw law);

struct WignerConfig {
  std::size_t n = 0;
  EntryLaw law = EntryLaw::gaussian;
  std::uint64_t seed = 1;
};

/// Symmetric N x N Wigner matrix, entries i <= j iid from the law scaled by
/// 1/sqrt(N). Deterministic per seed.
Eigen::MatrixXd sample_wigner(const WignerConfig& cfg);

/// Haar-orthogonal Q from the QR factorization of a Gaussian matrix with the
/// R-diagonal sign correction.
Eigen::MatrixXd sample_haar_orthogonal(std::size_t n, std::uint64_t seed);

/// Eigenvalues of a symmetric matrix, ascending (helper for matrix inputs).
std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m);

Eigen::MatrixXd diag_matrix(const Spectrum& spec);

struct ExperimentRow {
  std::size_t n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;        // lhs - rhs
  double std_error = 0.0;  // MC errors combined in quadrature
  double x_term = 0.0;     // (1/N) log I(theta, X_N) where applicable
};

struct ExperimentReport {
  double theta = 0.0;
  std::vector<ExperimentRow> rows;
  bool verdict = false;
  std::string notes;
};

enum class AdditivityMode {
  collapsed,    // single MC over independent sphere pairs (default)
  conjugation,  // per-sample Haar V, weight from B + V^T B~ V
};

/// Exact finite-N additivity (both sides of R_N(B + V^T B~ V) =
/// R_N(B) + R_N(B~) by Monte Carlo); verdict true iff |gap| <= 3 stderr.
ExperimentReport additivity_check(const Eigen::MatrixXd& b,
                                  const Eigen::MatrixXd& b_tilde, double theta,
                                  const McConfig& cfg,
                                  AdditivityMode mode = AdditivityMode::collapsed);

enum class LogIMethod { tilted, naive };

/// Asymptotic additivity under freeness: per N, sample X_N, set
/// A_N to the quantile resampling of a_spec, and compare
/// (1/N) log I(theta, A_N + X_N) with the sum of the separate terms.
/// |theta| <= 0.2 enforced unless allow_large_theta.
ExperimentReport freeness_experiment(const Spectrum& a_spec,
                                     const WignerConfig& wigner_template,
                                     double theta,
                                     const std::vector<std::size_t>& ns,
                                     const McConfig& cfg,
                                     LogIMethod method = LogIMethod::tilted,
                                     bool allow_large_theta = false);

struct LaplaceBoundReport {
  EntryLaw law = EntryLaw::gaussian;
  double supplied_c = 0.0;
  double c_min = 0.0;  // grid-searched minimal c satisfying both bounds
  bool pass_lower = false;
  bool pass_upper = false;
  std::size_t grid_points = 0;
};

/// Checks e^{t^2/2 - c|t|^3} <= E[e^{tX}] <= e^{t^2/2 + c|t|^3} on a grid in
/// [-1, 1] using the closed-form Laplace transforms of the three laws.
LaplaceBoundReport laplace_bound_check(EntryLaw law, double c,
                                       std::size_t grid_points = 101);

struct SphereMaxReport {
  std::size_t n = 0;
  double epsilon = 0.0;
  double threshold = 0.0;  // N^{-1/2+eps}
  double rate = 0.0;       // empirical P(max_i |e_i| > threshold)
  double fitted_c = 0.0;   // fitted at the reference size N = 256
  double bound = 0.0;      // N exp(-c N^{2 eps})
  bool verdict = false;    // rate <= bound
};

SphereMaxReport sphere_max_check(std::size_t n, double epsilon,
                                 const McConfig& cfg);

}  // namespace spherint::freeness
