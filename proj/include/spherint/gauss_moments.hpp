#pragma once

#include <array>
#include <complex>
#include <map>
#include <utility>

namespace spherint {

using cplx = std::complex<double>;

/// 2x2 complex symmetric quadratic form K. Gaussian-integral operations
/// require the real part to be positive definite.
struct ComplexQuadraticForm {
  cplx k00{1.0, 0.0};
  cplx k01{0.0, 0.0};  // == k10 by symmetry
  cplx k11{1.0, 0.0};

  static ComplexQuadraticForm make(cplx k00, cplx k01, cplx k11) {
    return {k00, k01, k11};
  }

  bool re_pd() const;
  cplx det() const { return k00 * k11 - k01 * k01; }
  /// Closed-form 2x2 inverse (the Wick covariance C = K^{-1}).
  ComplexQuadraticForm inverse() const;
};

/// Polynomial in two variables with complex coefficients, stored as a
/// (degree in x1, degree in x2) -> coefficient map.
class Poly2 {
 public:
  using Key = std::pair<int, int>;

  Poly2() = default;
  static Poly2 constant(cplx c);
  /// c1*x1 + c2*x2
  static Poly2 linear(cplx c1, cplx c2);
  static Poly2 monomial(int i, int j, cplx c);

  Poly2& operator+=(const Poly2& other);
  Poly2 operator+(const Poly2& other) const;
  Poly2 operator*(const Poly2& other) const;
  Poly2 operator*(cplx scale) const;
  Poly2 pow(int k) const;

  cplx eval(cplx x1, cplx x2) const;
  int max_total_degree() const;
  const std::map<Key, cplx>& terms() const { return terms_; }

 private:
  std::map<Key, cplx> terms_;
};

/// (2 pi)^{-1} int exp(-<x,Kx>/2) dx = det(K)^{-1/2} on the branch with
/// positive real part. Throws PositivityError if Re(K) is not PD.
cplx gaussian_norm(const ComplexQuadraticForm& k);

/// (2 pi)^{-1} int P(x) exp(-<x,Kx>/2) dx via Wick pairing with covariance
/// K^{-1}, times gaussian_norm(K). Monomials of odd total degree contribute
/// exactly zero. Throws DegreeOverflow above total degree 32.
cplx gaussian_moment(const ComplexQuadraticForm& k, const Poly2& p);

/// Slow reference paths: adaptive tensor Gauss-Legendre on [-12,12]^2,
/// refined until successive estimates differ by < 1e-9.
cplx quad_norm(const ComplexQuadraticForm& k);
cplx quad_moment(const ComplexQuadraticForm& k, const Poly2& p);

struct CovSides {
  cplx lhs;
  cplx rhs;
};

/// Both sides of the Gaussian change-of-variable identity
///   int F(x) e^{-<x,Kx>/2} dx = det(A) int F(Ay+b) e^{-<Ay+b, K(Ay+b)>/2} dy
/// for diagonal complex A with Re(a_i) > 0, evaluated by quadrature.
/// Self-test only.
CovSides change_of_variable_check(const ComplexQuadraticForm& k,
                                  std::array<cplx, 2> a_diag,
                                  std::array<cplx, 2> b, const Poly2& p);

}  // namespace spherint
