#include "spherint/gauss_moments.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "spherint/errors.hpp"
#include "spherint/quadrature.hpp"

namespace spherint {

namespace {
constexpr int kMaxDegree = 32;
constexpr double kQuadBox = 12.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

bool ComplexQuadraticForm::re_pd() const {
  const double a = k00.real();
  const double c = k11.real();
  const double b = k01.real();
  return a > 0.0 && a * c - b * b > 0.0;
}

ComplexQuadraticForm ComplexQuadraticForm::inverse() const {
  const cplx d = det();
  if (d == cplx(0.0, 0.0)) throw DomainError("ComplexQuadraticForm: singular");
  return {k11 / d, -k01 / d, k00 / d};
}

Poly2 Poly2::constant(cplx c) { return monomial(0, 0, c); }

Poly2 Poly2::linear(cplx c1, cplx c2) {
  Poly2 p;
  if (c1 != cplx(0.0)) p.terms_[{1, 0}] = c1;
  if (c2 != cplx(0.0)) p.terms_[{0, 1}] = c2;
  return p;
}

Poly2 Poly2::monomial(int i, int j, cplx c) {
  if (i < 0 || j < 0) throw DomainError("Poly2: negative degree");
  Poly2 p;
  if (c != cplx(0.0)) p.terms_[{i, j}] = c;
  return p;
}

Poly2& Poly2::operator+=(const Poly2& other) {
  for (const auto& [key, c] : other.terms_) terms_[key] += c;
  return *this;
}

Poly2 Poly2::operator+(const Poly2& other) const {
  Poly2 p = *this;
  p += other;
  return p;
}

Poly2 Poly2::operator*(const Poly2& other) const {
  Poly2 p;
  for (const auto& [ka, ca] : terms_)
    for (const auto& [kb, cb] : other.terms_)
      p.terms_[{ka.first + kb.first, ka.second + kb.second}] += ca * cb;
  return p;
}

Poly2 Poly2::operator*(cplx scale) const {
  Poly2 p;
  if (scale == cplx(0.0)) return p;
  for (const auto& [key, c] : terms_) p.terms_[key] = c * scale;
  return p;
}

Poly2 Poly2::pow(int k) const {
  if (k < 0) throw DomainError("Poly2::pow: negative exponent");
  Poly2 out = constant(1.0);
  for (int i = 0; i < k; ++i) out = out * (*this);
  return out;
}

cplx Poly2::eval(cplx x1, cplx x2) const {
  cplx s = 0.0;
  for (const auto& [key, c] : terms_) {
    cplx t = c;
    for (int i = 0; i < key.first; ++i) t *= x1;
    for (int j = 0; j < key.second; ++j) t *= x2;
    s += t;
  }
  return s;
}

int Poly2::max_total_degree() const {
  int d = 0;
  for (const auto& [key, c] : terms_)
    d = std::max(d, key.first + key.second);
  return d;
}

cplx gaussian_norm(const ComplexQuadraticForm& k) {
  if (!k.re_pd()) throw PositivityError("gaussian_norm: Re(K) not positive definite");
  cplx s = std::exp(-0.5 * std::log(k.det()));
  // Branch with positive real part, i.e. the product of the principal
  // 1/sqrt(1 + i d_k) factors.
  if (s.real() < 0.0) s = -s;
  return s;
}

namespace {

// E[x1^a x2^b] for a centered Gaussian pair with covariance C, by the
// Isserlis recursion. Zero for odd total degree.
cplx wick_monomial(int a, int b, const ComplexQuadraticForm& c,
                   std::vector<cplx>& memo, std::vector<bool>& have) {
  if (a < 0 || b < 0) return 0.0;
  if ((a + b) % 2 == 1) return 0.0;
  if (a == 0 && b == 0) return 1.0;
  const std::size_t idx = static_cast<std::size_t>(a) * (kMaxDegree + 1) + b;
  if (have[idx]) return memo[idx];
  cplx val;
  if (a >= 1) {
    val = static_cast<double>(a - 1) * c.k00 * wick_monomial(a - 2, b, c, memo, have) +
          static_cast<double>(b) * c.k01 * wick_monomial(a - 1, b - 1, c, memo, have);
  } else {
    val = static_cast<double>(b - 1) * c.k11 * wick_monomial(0, b - 2, c, memo, have);
  }
  memo[idx] = val;
  have[idx] = true;
  return val;
}

}  // namespace

cplx gaussian_moment(const ComplexQuadraticForm& k, const Poly2& p) {
  if (!k.re_pd()) throw PositivityError("gaussian_moment: Re(K) not positive definite");
  if (p.max_total_degree() > kMaxDegree)
    throw DegreeOverflow("gaussian_moment: total degree above 32");
  const ComplexQuadraticForm cov = k.inverse();
  std::vector<cplx> memo(static_cast<std::size_t>(kMaxDegree + 1) * (kMaxDegree + 1));
  std::vector<bool> have(memo.size(), false);
  cplx s = 0.0;
  for (const auto& [key, c] : p.terms())
    s += c * wick_monomial(key.first, key.second, cov, memo, have);
  return gaussian_norm(k) * s;
}

namespace {

cplx quad_integral(const std::function<cplx(double, double)>& f) {
  cplx prev;
  bool first = true;
  for (int panels = 2; panels <= 32; panels *= 2) {
    const cplx cur = quad::integrate2d(f, -kQuadBox, kQuadBox, panels);
    if (!first && std::abs(cur - prev) < 1e-9 * std::max(1.0, std::abs(cur)))
      return cur;
    prev = cur;
    first = false;
  }
  throw ConvergenceError("gauss quadrature reference: no convergence");
}

cplx gauss_weight(const ComplexQuadraticForm& k, cplx x, cplx y) {
  const cplx q = k.k00 * x * x + 2.0 * k.k01 * x * y + k.k11 * y * y;
  return std::exp(-0.5 * q);
}

}  // namespace

cplx quad_norm(const ComplexQuadraticForm& k) {
  if (!k.re_pd()) throw PositivityError("quad_norm: Re(K) not positive definite");
  return quad_integral([&](double x, double y) {
    return gauss_weight(k, x, y) / kTwoPi;
  });
}

cplx quad_moment(const ComplexQuadraticForm& k, const Poly2& p) {
  if (!k.re_pd()) throw PositivityError("quad_moment: Re(K) not positive definite");
  return quad_integral([&](double x, double y) {
    return p.eval(x, y) * gauss_weight(k, x, y) / kTwoPi;
  });
}

CovSides change_of_variable_check(const ComplexQuadraticForm& k,
                                  std::array<cplx, 2> a_diag,
                                  std::array<cplx, 2> b, const Poly2& p) {
  if (!k.re_pd())
    throw PositivityError("change_of_variable_check: Re(K) not positive definite");
  if (a_diag[0].real() <= 0.0 || a_diag[1].real() <= 0.0)
    throw DomainError("change_of_variable_check: Re(a_i) must be positive");
  CovSides sides;
  sides.lhs = quad_integral([&](double x, double y) {
    return p.eval(x, y) * gauss_weight(k, x, y);
  });
  const cplx det_a = a_diag[0] * a_diag[1];
  sides.rhs = det_a * quad_integral([&](double y1, double y2) {
                const cplx u = a_diag[0] * y1 + b[0];
                const cplx v = a_diag[1] * y2 + b[1];
                return p.eval(u, v) * gauss_weight(k, u, v);
              });
  return sides;
}

}  // namespace spherint
