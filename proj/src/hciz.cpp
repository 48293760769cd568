#include "spherint/hciz.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "spherint/big_float.hpp"
#include "spherint/errors.hpp"

namespace spherint::hciz {

namespace {

constexpr int kMaxN = 64;
constexpr int kRankOneMaxN = 24;
constexpr double kDigitsLossSwitch = 12.0;  // double -> mpfr switch

double log_superfactorial(std::size_t n_minus_1) {
  // log prod_{p=1}^{n-1} p!
  double s = 0.0;
  for (std::size_t p = 1; p <= n_minus_1; ++p)
    s += std::lgamma(static_cast<double>(p) + 1.0);
  return s;
}

struct SignedLog {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;
};

// log |prod_{i<j}(x_j - x_i)| and its sign for ascending-sorted x (so the
// log is of the positive product); callers that need Delta = prod_{i<j}
// (x_i - x_j) fold in the (-1)^{n(n-1)/2} themselves. Parity cancels between
// Delta(a) and det row ordering, so working with ascending products is
// enough as long as both sides use the same node order.
SignedLog log_pair_product(const std::vector<double>& x) {
  SignedLog out;
  out.log_abs = 0.0;
  out.sign = 1;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double d = x[j] - x[i];
      if (d == 0.0) throw GapError("coincident nodes in Vandermonde product");
      out.log_abs += std::log(std::abs(d));
      if (d < 0.0) out.sign = -out.sign;
    }
  return out;
}

struct DetResult {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;
  double hadamard_log = 0.0;  // log prod_i ||row_i||_2
};

// Full-pivot LU determinant of a row-major n x n matrix (destroys m).
DetResult det_double(std::vector<double> m, std::size_t n) {
  DetResult res;
  res.sign = 1;
  res.log_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) norm2 += m[i * n + j] * m[i * n + j];
    res.hadamard_log += 0.5 * std::log(norm2);
  }
  std::vector<std::size_t> cols(n);
  for (std::size_t j = 0; j < n; ++j) cols[j] = j;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pr = k, pc = k;
    double best = 0.0;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j) {
        const double v = std::abs(m[i * n + cols[j]]);
        if (v > best) {
          best = v;
          pr = i;
          pc = j;
        }
      }
    if (best == 0.0) {
      res.sign = 0;
      return res;
    }
    if (pr != k) {
      for (std::size_t j = 0; j < n; ++j)
        std::swap(m[k * n + j], m[pr * n + j]);
      res.sign = -res.sign;
    }
    if (pc != k) {
      std::swap(cols[k], cols[pc]);
      res.sign = -res.sign;
    }
    const double piv = m[k * n + cols[k]];
    res.log_abs += std::log(std::abs(piv));
    if (piv < 0.0) res.sign = -res.sign;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m[i * n + cols[k]] / piv;
      for (std::size_t j = k + 1; j < n; ++j)
        m[i * n + cols[j]] -= f * m[k * n + cols[j]];
    }
  }
  return res;
}

// Partial-pivot LU determinant in MPFR; entries built by the generator at
// the working precision so nothing is pre-rounded through double.
SignedLog det_mpfr(
    const std::function<BigFloat(std::size_t, std::size_t, mpfr_prec_t)>& entry,
    std::size_t n, mpfr_prec_t prec) {
  std::vector<BigFloat> m;
  m.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.push_back(entry(i, j, prec));

  SignedLog res;
  res.log_abs = 0.0;
  res.sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pr = k;
    BigFloat best = BigFloat::abs(m[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      BigFloat v = BigFloat::abs(m[i * n + k]);
      if (v > best) {
        best = std::move(v);
        pr = i;
      }
    }
    if (best.is_zero()) {
      res.sign = 0;
      res.log_abs = -std::numeric_limits<double>::infinity();
      return res;
    }
    if (pr != k) {
      for (std::size_t j = 0; j < n; ++j)
        std::swap(m[k * n + j], m[pr * n + j]);
      res.sign = -res.sign;
    }
    const BigFloat& piv = m[k * n + k];
    res.log_abs += BigFloat::log(BigFloat::abs(piv)).to_double();
    if (piv.sign() < 0) res.sign = -res.sign;
    for (std::size_t i = k + 1; i < n; ++i) {
      const BigFloat f = m[i * n + k] / piv;
      for (std::size_t j = k + 1; j < n; ++j)
        m[i * n + j] -= f * m[k * n + j];
    }
  }
  return res;
}

// Precision ladder: evaluate at p and p + 96 bits until the two agree.
SignedLog det_mpfr_adaptive(
    const std::function<BigFloat(std::size_t, std::size_t, mpfr_prec_t)>& entry,
    std::size_t n, mpfr_prec_t start_bits, int* precision_used) {
  mpfr_prec_t p = std::max<mpfr_prec_t>(start_bits, 192);
  for (int iter = 0; iter < 10; ++iter) {
    const SignedLog lo = det_mpfr(entry, n, p);
    const SignedLog hi = det_mpfr(entry, n, p + 96);
    if (lo.sign == hi.sign && lo.sign != 0 &&
        std::abs(lo.log_abs - hi.log_abs) <=
            1e-12 * std::max(1.0, std::abs(hi.log_abs))) {
      if (precision_used) *precision_used = static_cast<int>(p + 96);
      return hi;
    }
    p *= 2;
    if (p > (mpfr_prec_t(1) << 16))
      throw ConvergenceError("hciz determinant: precision ladder exhausted");
  }
  throw ConvergenceError("hciz determinant: precision ladder exhausted");
}

struct LogEval {
  double log_value;
  std::string method;
  int precision_bits;
};

// Determinant-formula core for I_N(A,B) in log domain (no gap
// checks; callers validate). Nodes need not be sorted; parity cancels.
LogEval hciz_log_core(const std::vector<double>& a, const std::vector<double>& b,
                      std::size_t n) {
  const double dn = static_cast<double>(n);
  std::vector<double> rowshift(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      best = std::max(best, dn * a[i] * b[j]);
    rowshift[i] = best;
  }

  const SignedLog da = log_pair_product(a);
  const SignedLog db = log_pair_product(b);
  const double log_cn = log_superfactorial(n - 1);
  const double log_npow = 0.5 * dn * (dn - 1.0) * std::log(dn);
  double shift_sum = 0.0;
  for (double r : rowshift) shift_sum += r;

  // Double path first.
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i * n + j] = std::exp(dn * a[i] * b[j] - rowshift[i]);
  const DetResult dd = det_double(std::move(m), n);
  const double loss_digits =
      (dd.hadamard_log - dd.log_abs) / std::numbers::ln10;

  SignedLog det;
  LogEval out;
  if (dd.sign != 0 && loss_digits < kDigitsLossSwitch) {
    det.log_abs = dd.log_abs;
    det.sign = dd.sign;
    out.method = "determinant/double";
    out.precision_bits = 0;
  } else {
    const double loss_bits = std::isfinite(dd.log_abs)
                                 ? (dd.hadamard_log - dd.log_abs) / std::numbers::ln2
                                 : 512.0;
    const mpfr_prec_t start =
        static_cast<mpfr_prec_t>(std::max(192.0, loss_bits + 96.0));
    auto entry = [&](std::size_t i, std::size_t j, mpfr_prec_t prec) {
      BigFloat e = BigFloat(dn, prec) * BigFloat(a[i], prec) * BigFloat(b[j], prec) -
                   BigFloat(rowshift[i], prec);
      return BigFloat::exp(e);
    };
    int bits = 0;
    det = det_mpfr_adaptive(entry, n, start, &bits);
    out.method = "determinant/mpfr";
    out.precision_bits = bits;
  }

  const int total_sign = det.sign * da.sign * db.sign;
  if (total_sign <= 0)
    throw ConvergenceError("hciz_exact: nonpositive value (determinant lost)");
  out.log_value =
      log_cn + shift_sum + det.log_abs - log_npow - da.log_abs - db.log_abs;
  return out;
}

HcizResult finish(const LogEval& ev, std::size_t n) {
  if (!std::isfinite(ev.log_value))
    throw OverflowError("hciz: log value not representable");
  HcizResult res;
  res.log_value = ev.log_value;
  res.value = ev.log_value < 709.0 ? std::exp(ev.log_value)
                                   : std::numeric_limits<double>::infinity();
  res.n = n;
  res.method = ev.method;
  res.precision_bits = ev.precision_bits;
  return res;
}

}  // namespace

DistinctSpectrum DistinctSpectrum::make(std::vector<double> values,
                                        double gap_tolerance) {
  if (values.empty()) throw DomainError("DistinctSpectrum: empty list");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("DistinctSpectrum: non-finite value");
  std::sort(values.begin(), values.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < values.size(); ++i)
    gap = std::min(gap, values[i] - values[i - 1]);
  if (values.size() > 1 && gap < gap_tolerance)
    throw GapError("DistinctSpectrum: minimal gap below tolerance");
  DistinctSpectrum s;
  s.min_gap = gap;
  s.values = std::move(values);
  return s;
}

Partition Partition::make(std::vector<long> parts) {
  if (parts.empty()) throw DomainError("Partition: empty");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] < 0) throw DomainError("Partition: negative part");
    if (i > 0 && parts[i] > parts[i - 1])
      throw DomainError("Partition: parts must be weakly decreasing");
  }
  Partition p;
  p.parts = std::move(parts);
  return p;
}

HcizResult hciz_exact(const DistinctSpectrum& a, const DistinctSpectrum& b,
                      std::size_t n) {
  if (a.values.size() != n || b.values.size() != n)
    throw ShapeError("hciz_exact: spectra must have length n");
  if (n == 0 || n > kMaxN) throw DomainError("hciz_exact: n out of range (1..64)");
  if (n == 1) {
    LogEval ev{a.values[0] * b.values[0], "scalar", 0};
    return finish(ev, 1);
  }
  return finish(hciz_log_core(a.values, b.values, n), n);
}

double rank_one_log_divided_difference(double theta, const DistinctSpectrum& b,
                                       std::size_t n, int* precision_bits) {
  const double dn = static_cast<double>(n);
  const std::vector<double>& bv = b.values;
  if (n == 1) {
    if (precision_bits) *precision_bits = 0;
    return theta * bv[0];
  }

  // Row shift for the exponential row only.
  double r0 = -std::numeric_limits<double>::infinity();
  for (double x : bv) r0 = std::max(r0, dn * theta * x);

  auto entry = [&](std::size_t i, std::size_t j, mpfr_prec_t prec) {
    if (i == 0) {
      BigFloat e = BigFloat(dn, prec) * BigFloat(theta, prec) *
                       BigFloat(bv[j], prec) -
                   BigFloat(r0, prec);
      return BigFloat::exp(e);
    }
    // (n b_j)^{i-1} / (i-1)!
    BigFloat base = BigFloat(dn, prec) * BigFloat(bv[j], prec);
    BigFloat pow(1.0, prec);
    for (std::size_t k = 1; k < i; ++k) pow *= base;
    BigFloat fact(1.0, prec);
    for (std::size_t k = 2; k < i; ++k) fact *= BigFloat(static_cast<double>(k), prec);
    return pow / fact;
  };

  // Needed precision: the determinant cancels from Hadamard scale down to
  // roughly theta^{n-1} P(b) n^{(n^2-n)/2} / (c_n e^{r0}).
  const SignedLog db = log_pair_product(bv);
  const double log_cn = log_superfactorial(n - 1);
  const double log_npow = 0.5 * dn * (dn - 1.0) * std::log(dn);
  const double det_scale_est = -log_cn + log_npow + db.log_abs +
                               (dn - 1.0) * std::log(std::abs(theta)) - r0;
  double bmax = 0.0;
  for (double x : bv) bmax = std::max(bmax, std::abs(x));
  double had_log = 0.5 * std::log(dn);  // exponential row after shifting
  for (std::size_t k = 0; k + 1 < n; ++k)
    had_log += 0.5 * std::log(dn) +
               static_cast<double>(k) * std::log(std::max(1.0, dn * bmax)) -
               std::lgamma(static_cast<double>(k) + 1.0);
  const mpfr_prec_t start = static_cast<mpfr_prec_t>(std::max(
      192.0, (had_log - det_scale_est) / std::numbers::ln2 + 128.0));

  int bits = 0;
  const SignedLog det = det_mpfr_adaptive(entry, n, start, &bits);
  if (precision_bits) *precision_bits = bits;

  // I = c_n det(M) / ((-theta)^{n-1} n^{(n^2-n)/2} P(b)): the divided-
  // difference parity (-1)^{(n-1)(n-2)/2} and the Delta(b) -> P(b)
  // reordering parity (-1)^{n(n-1)/2} combine to (-1)^{n-1}.
  const int denom_sign = ((n - 1) % 2 == 1 && theta > 0.0) ? -1 : 1;
  const int total_sign = det.sign * denom_sign * db.sign;
  if (total_sign <= 0)
    throw ConvergenceError("rank_one_exact: nonpositive value (determinant lost)");
  return log_cn + r0 + det.log_abs - (dn - 1.0) * std::log(std::abs(theta)) -
         log_npow - db.log_abs;
}

double rank_one_log_epsilon_limit(double theta, const DistinctSpectrum& b,
                                  std::size_t n) {
  if (n == 1) return theta * b.values[0];
  const double eps0 =
      std::min(1e-3, std::abs(theta) / (4.0 * static_cast<double>(n)));
  constexpr int kMaxRung = 8;
  std::vector<std::vector<double>> tableau;
  double prev_diag = 0.0;
  for (int k = 0; k < kMaxRung; ++k) {
    const double eps = eps0 / static_cast<double>(1 << k);
    std::vector<double> a(n);
    a[0] = theta;
    for (std::size_t i = 1; i < n; ++i) a[i] = static_cast<double>(i) * eps;
    std::sort(a.begin(), a.end());
    const LogEval ev = hciz_log_core(a, b.values, n);

    std::vector<double> row(static_cast<std::size_t>(k) + 1);
    row[0] = ev.log_value;
    for (int m = 1; m <= k; ++m) {
      const double w = static_cast<double>(1 << m);
      row[m] = (w * row[m - 1] - tableau[k - 1][m - 1]) / (w - 1.0);
    }
    tableau.push_back(row);
    const double diag = row.back();
    if (k >= 2 && std::abs(diag - prev_diag) <= 5e-8 * std::max(1.0, std::abs(diag)))
      return diag;
    prev_diag = diag;
  }
  return tableau.back().back();
}

HcizResult rank_one_exact(double theta, const DistinctSpectrum& b,
                          std::size_t n) {
  if (b.values.size() != n)
    throw ShapeError("rank_one_exact: spectrum must have length n");
  if (n == 0 || n > static_cast<std::size_t>(kRankOneMaxN))
    throw DomainError("rank_one_exact: n out of range (1..24)");
  if (theta == 0.0) throw DomainError("rank_one_exact: theta must be nonzero");

  int bits = 0;
  const double log_dd = rank_one_log_divided_difference(theta, b, n, &bits);
  const double log_eps = rank_one_log_epsilon_limit(theta, b, n);
  if (std::abs(log_dd - log_eps) > 1e-5)
    throw DisagreementError(
        "rank_one_exact: divided-difference and epsilon paths disagree");

  LogEval ev{log_dd, "rank-one divided-difference/mpfr", bits};
  return finish(ev, n);
}

SchurResult schur_ratio(const Partition& mu, std::vector<double> x) {
  const std::size_t n = mu.n();
  if (x.size() != n) throw ShapeError("schur_ratio: |x| must equal |mu|");
  if (n > 12) throw DomainError("schur_ratio: n above 12");
  for (double v : x)
    if (v <= 0.0) throw DomainError("schur_ratio: x must be positive");

  SchurResult out;
  // Nudge coincident entries by relative 1e-7 rather than evaluating the
  // confluent bialternant.
  std::vector<double> xs = x;
  std::sort(xs.begin(), xs.end());
  double min_rel_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < n; ++i)
    min_rel_gap = std::min(min_rel_gap, (xs[i] - xs[i - 1]) / xs[i]);
  if (n > 1 && min_rel_gap < 1e-7) {
    for (std::size_t i = 0; i < n; ++i)
      x[i] *= 1.0 + 1e-7 * static_cast<double>(i + 1);
    out.perturbed = true;
    std::vector<double> xs2 = x;
    std::sort(xs2.begin(), xs2.end());
    for (std::size_t i = 1; i < n; ++i)
      if ((xs2[i] - xs2[i - 1]) / xs2[i] < 1e-9)
        throw DegenerateInput("schur_ratio: coincident x beyond perturbation");
  }

  auto det_of = [n](const std::function<double(std::size_t, std::size_t)>& gen) {
    std::vector<double> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m[i * n + j] = gen(i, j);
    const DetResult d = det_double(std::move(m), n);
    if (d.sign == 0) return 0.0;
    return static_cast<double>(d.sign) * std::exp(d.log_abs);
  };

  const double num = det_of([&](std::size_t i, std::size_t j) {
    const double e = static_cast<double>(mu.parts[j]) + static_cast<double>(n) -
                     static_cast<double>(j) - 1.0;
    return std::pow(x[i], e);
  });
  const double den = det_of([&](std::size_t i, std::size_t j) {
    return std::pow(x[i], static_cast<double>(n) - static_cast<double>(j) - 1.0);
  });

  // Weyl dimension: S_mu(1^n) = prod_{i<j} (mu_i - i - mu_j + j)/(j - i).
  double dim = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dim *= static_cast<double>(mu.parts[i] - static_cast<long>(i) -
                                 mu.parts[j] + static_cast<long>(j)) /
             static_cast<double>(j - i);

  out.value = num / den / dim;
  return out;
}

SchurIdentitySides schur_identity(const DistinctSpectrum& a, const Partition& mu) {
  const std::size_t n = mu.n();
  if (a.values.size() != n)
    throw ShapeError("schur_identity: |a| must equal |mu|");
  const double dn = static_cast<double>(n);

  // lambda_i(B) = mu_i + n - i, strictly decreasing integers.
  std::vector<double> bvals(n);
  for (std::size_t i = 0; i < n; ++i)
    bvals[i] = static_cast<double>(mu.parts[i]) + dn - static_cast<double>(i + 1);
  const DistinctSpectrum b = DistinctSpectrum::make(bvals);

  SchurIdentitySides sides;
  sides.hciz_log = hciz_exact(a, b, n).log_value;

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(dn * a.values[i]);
  const SchurResult ratio = schur_ratio(mu, x);
  double log_factor = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[j] - x[i];
      const double dl = dn * (a.values[j] - a.values[i]);
      log_factor += std::log(std::abs(dx)) - std::log(std::abs(dl));
    }
  sides.schur_route_log = std::log(ratio.value) + log_factor;
  return sides;
}

}  // namespace spherint::hciz
