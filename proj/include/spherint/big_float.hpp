#pragma once

#include <mpfr.h>

#include <algorithm>
#include <utility>

namespace spherint {

/// Minimal RAII wrapper over an mpfr_t at a fixed precision. Binary
/// operations evaluate at the max precision of the operands, round to
/// nearest. Only what the determinant oracle needs.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec = 128) {
    mpfr_init2(x_, prec);
    mpfr_set_zero(x_, 1);
  }
  BigFloat(double v, mpfr_prec_t prec) {
    mpfr_init2(x_, prec);
    mpfr_set_d(x_, v, MPFR_RNDN);
  }
  BigFloat(const BigFloat& other) {
    mpfr_init2(x_, mpfr_get_prec(other.x_));
    mpfr_set(x_, other.x_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& other) noexcept {
    mpfr_init2(x_, mpfr_get_prec(other.x_));
    mpfr_swap(x_, other.x_);
  }
  BigFloat& operator=(const BigFloat& other) {
    if (this != &other) {
      mpfr_set_prec(x_, mpfr_get_prec(other.x_));
      mpfr_set(x_, other.x_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& other) noexcept {
    mpfr_swap(x_, other.x_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(x_); }

  mpfr_prec_t prec() const { return mpfr_get_prec(x_); }
  double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }
  int sign() const { return mpfr_sgn(x_); }
  bool is_zero() const { return mpfr_zero_p(x_) != 0; }

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_add(r.x_, a.x_, b.x_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.x_, a.x_, b.x_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_mul(r.x_, a.x_, b.x_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_div(r.x_, a.x_, b.x_, MPFR_RNDN);
    return r;
  }
  BigFloat operator-() const {
    BigFloat r(prec());
    mpfr_neg(r.x_, x_, MPFR_RNDN);
    return r;
  }
  BigFloat& operator+=(const BigFloat& b) { return *this = *this + b; }
  BigFloat& operator-=(const BigFloat& b) { return *this = *this - b; }
  BigFloat& operator*=(const BigFloat& b) { return *this = *this * b; }
  BigFloat& operator/=(const BigFloat& b) { return *this = *this / b; }

  friend bool operator<(const BigFloat& a, const BigFloat& b) {
    return mpfr_cmp(a.x_, b.x_) < 0;
  }
  friend bool operator>(const BigFloat& a, const BigFloat& b) {
    return mpfr_cmp(a.x_, b.x_) > 0;
  }

  static BigFloat exp(const BigFloat& a) {
    BigFloat r(a.prec());
    mpfr_exp(r.x_, a.x_, MPFR_RNDN);
    return r;
  }
  static BigFloat log(const BigFloat& a) {
    BigFloat r(a.prec());
    mpfr_log(r.x_, a.x_, MPFR_RNDN);
    return r;
  }
  static BigFloat abs(const BigFloat& a) {
    BigFloat r(a.prec());
    mpfr_abs(r.x_, a.x_, MPFR_RNDN);
    return r;
  }

 private:
  mpfr_t x_;
};

}  // namespace spherint
