#include "spherint/expansion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "spherint/errors.hpp"

namespace spherint {

namespace {

// K~(t) prefactor blocks built from A_2, F, G:
//   alpha = (1-v)^2 A2 + 2(1-v)F + G
//   gamma = (1-v^2) A2 + 2vF - G
//   delta = (1+v)^2 A2 - 2(1+v)F + G
struct KBlocks {
  double alpha, gamma, delta;
};

KBlocks k_blocks(double v, double a2, double f, double g) {
  KBlocks b;
  b.alpha = (1.0 - v) * (1.0 - v) * a2 + 2.0 * (1.0 - v) * f + g;
  b.gamma = (1.0 - v * v) * a2 + 2.0 * v * f - g;
  b.delta = (1.0 + v) * (1.0 + v) * a2 - 2.0 * (1.0 + v) * f + g;
  return b;
}

double det_ktilde(const KBlocks& b, double t) {
  return (1.0 + t * b.alpha) * (1.0 - t * b.delta) + t * t * b.gamma * b.gamma;
}

// beta = 1 expansion at (spec, theta) in the 2theta parameterization.
ExpansionResult orthogonal_coefficients(const Spectrum& spec,
                                        const ThetaWindow& window, int k_max) {
  ExpansionResult res;
  res.beta = 1;
  res.theta = window.theta;
  res.admissible = window.admissible;
  res.a.assign(static_cast<std::size_t>(k_max) + 1, 1.0);
  if (window.theta == 0.0) {
    res.v = spec.mean();
    res.f = spec.mean();
    res.g = spec.moment2();
    return res;
  }
  const TiltPoint tilt = solve_v(spec, window);
  res.v = tilt.v;
  for (int k = 2; k <= k_max; ++k)
    res.a[static_cast<std::size_t>(k)] = a_coeff(spec, window, tilt, k);
  const FgPair fg = f_g(spec, window, tilt);
  res.f = fg.f;
  res.g = fg.g;
  const double a2 = res.a[2], a3 = res.a[3], a4 = res.a[4];
  res.m0 = 1.0 / std::sqrt(a2);
  res.m1 = res.m0 * (1.5 * a4 / (a2 * a2) - (5.0 / 3.0) * a3 * a3 / (a2 * a2 * a2) + 1.0 / 6.0);
  res.j = r_integral(spec, window, tilt);
  return res;
}

}  // namespace

ExpansionResult coefficients(const Spectrum& spec, const ThetaWindow& window,
                             int k_max) {
  if (k_max < 4) throw DomainError("coefficients: k_max must be >= 4");
  if (spec.beta() == 1) return orthogonal_coefficients(spec, window, k_max);

  // Unitary case: I_N^{(2)}(theta, B) = I_{2N}^{(1)}(theta/2, D_{2N}).
  const Spectrum d = spec.doubled();
  ThetaWindow half = window;
  half.theta = 0.5 * window.theta;
  half.admissible = window.admissible;
  ExpansionResult res = orthogonal_coefficients(d, half, k_max);
  res.beta = 2;
  res.theta = window.theta;
  res.m1 *= 0.5;
  res.j *= 2.0;  // int_0^theta R = 2 * [(1/2) int_0^theta R]
  return res;
}

double log_i_approx(const Spectrum& spec, const ThetaWindow& window,
                    std::size_t n, int order) {
  if (n == 0) throw DomainError("log_i_approx: n must be positive");
  if (spec.size() != n)
    throw ShapeError("log_i_approx: spectrum length must equal n");
  if (order != 0 && order != 1)
    throw DomainError("log_i_approx: order must be 0 or 1");
  const ExpansionResult res = coefficients(spec, window);
  const double nn = static_cast<double>(n);
  const double pref = order == 0 ? res.m0 : res.m0 + res.m1 / nn;
  if (pref <= 0.0)
    throw DomainError("log_i_approx: nonpositive order-1 prefactor");
  return nn * res.j + std::log(pref);
}

ComplexQuadraticForm k_matrix(const Spectrum& spec, const ThetaWindow& window,
                              double t) {
  // Orthogonal-case object: always the beta = 1 parameterization.
  const TiltPoint tilt = solve_v(spec, window);
  const double a2 = a_coeff(spec, window, tilt, 2);
  const FgPair fg = f_g(spec, window, tilt);
  const KBlocks b = k_blocks(tilt.v, a2, fg.f, fg.g);
  const cplx i(0.0, 1.0);
  return ComplexQuadraticForm::make(1.0 + t * b.alpha, -i * t * b.gamma,
                                    1.0 - t * b.delta);
}

namespace {

struct AppendixContext {
  double theta;
  double v;
  double a2, a3, a4;
  KBlocks blocks;
  // Per-eigenvalue pieces of the linear forms i(1-v+lambda_i)x1 + (1+v-lambda_i)x2
  // weighted by 1/(1 - 2 theta lambda_i + 2 theta v)^m.
  const Spectrum* spec;
};

ComplexQuadraticForm ktilde_form(const AppendixContext& ctx, double t) {
  const cplx i(0.0, 1.0);
  return ComplexQuadraticForm::make(1.0 + t * ctx.blocks.alpha,
                                    -i * t * ctx.blocks.gamma,
                                    1.0 - t * ctx.blocks.delta);
}

// T_{k,m} = (1/N) sum_i (i(1-v+lambda_i) x1 + (1+v-lambda_i) x2)^k / d_i^m
Poly2 t_poly(const AppendixContext& ctx, int k, int m) {
  const cplx i(0.0, 1.0);
  Poly2 sum;
  const double n = static_cast<double>(ctx.spec->size());
  for (double lam : ctx.spec->eigenvalues()) {
    const double d = 1.0 - 2.0 * ctx.theta * lam + 2.0 * ctx.theta * ctx.v;
    const Poly2 lin = Poly2::linear(i * (1.0 - ctx.v + lam), 1.0 + ctx.v - lam);
    sum += lin.pow(k) * (1.0 / (n * std::pow(d, m)));
  }
  return sum;
}

double wick_f0_coeff(const AppendixContext& ctx) {
  const double th = ctx.theta;
  const Poly2 p0 = t_poly(ctx, 4, 4) * (th * th / 2.0) +
                   t_poly(ctx, 3, 3).pow(2) * (th * th * th / 9.0);
  return gaussian_moment(ktilde_form(ctx, th), p0).real();
}

// N f1(t) via Wick moments of p1(t) against K~(t).
double wick_nf1(const AppendixContext& ctx, double t) {
  const Poly2 p1 = t_poly(ctx, 1, 2) * t_poly(ctx, 3, 3) * (2.0 * t * t / 3.0) +
                   t_poly(ctx, 2, 3) * (2.0 * t);
  return gaussian_moment(ktilde_form(ctx, t), p1).real();
}

// N f2(t) via Wick moments of p2(t) against K~(t).
double wick_nf2(const AppendixContext& ctx, double t) {
  const Poly2 p2 = Poly2::constant(2.0 * ctx.a2) +
                   t_poly(ctx, 1, 2).pow(2) * (2.0 * t);
  return gaussian_moment(ktilde_form(ctx, t), p2).real();
}

// Value and first two derivatives at t0 of the polynomial through
// (ts[i], ys[i]), by Newton divided differences and Horner with derivative
// accumulation.
std::array<double, 3> poly_derivatives_at(const std::vector<double>& ts,
                                          const std::vector<double>& ys,
                                          double t0) {
  const std::size_t m = ts.size();
  std::vector<double> dd = ys;
  for (std::size_t level = 1; level < m; ++level)
    for (std::size_t i = m - 1; i >= level; --i)
      dd[i] = (dd[i] - dd[i - 1]) / (ts[i] - ts[i - level]);
  double v = dd[m - 1], d1 = 0.0, d2 = 0.0;
  for (std::size_t j = m - 1; j-- > 0;) {
    const double w = t0 - ts[j];
    d2 = d2 * w + 2.0 * d1;
    d1 = d1 * w + v;
    v = v * w + dd[j];
  }
  return {v, d1, d2};
}

// Exact t-derivatives of nf(t) = R(t) det(t)^{-s} where R = nf det^s is a
// polynomial in t (the Wick moments are rational with det^{s} denominators).
// R is recovered by interpolation at spaced nodes, so no subtractive
// cancellation enters the derivatives.
struct RationalDerivatives {
  double value, d1, d2;
};

template <class Fn>
RationalDerivatives wick_derivatives(const AppendixContext& ctx, double s,
                                     Fn&& nf, double t0) {
  const double delta = 0.5 * std::abs(ctx.theta);
  static constexpr double kNodes[6] = {-1.0, -0.6, -0.2, 0.2, 0.6, 1.0};
  std::vector<double> ts(6), ys(6);
  for (int i = 0; i < 6; ++i) {
    ts[i] = t0 + delta * kNodes[i];
    ys[i] = nf(ts[i]) * std::pow(det_ktilde(ctx.blocks, ts[i]), s);
  }
  const auto r = poly_derivatives_at(ts, ys, t0);
  const KBlocks& b = ctx.blocks;
  const double det = det_ktilde(b, t0);
  const double ddet = b.alpha - b.delta - 2.0 * t0 * b.alpha * b.delta +
                      2.0 * t0 * b.gamma * b.gamma;
  const double d2det = 2.0 * (b.gamma * b.gamma - b.alpha * b.delta);
  const double p = std::pow(det, -s);
  RationalDerivatives out;
  out.value = r[0] * p;
  out.d1 = r[1] * p - s * r[0] * p / det * ddet;
  out.d2 = r[2] * p - 2.0 * s * r[1] * p / det * ddet -
           s * r[0] * (p / det * d2det - (s + 1.0) * p / (det * det) * ddet * ddet);
  return out;
}

// Appendix closed form for N f1(t).
double closed_nf1(const AppendixContext& ctx, double t) {
  const double th = ctx.theta;
  const double q = 2.0 * t * ctx.a2 * ctx.a2 - ctx.a3 * (t - 2.0 * th) -
                   ctx.a2 * (t + 2.0 * th);
  const double det = det_ktilde(ctx.blocks, t);
  return 2.0 * t * (t - th) * q / (th * th * th * std::pow(det, 2.5));
}

// Appendix closed form for N f2(t).
double closed_nf2(const AppendixContext& ctx, double t) {
  return 2.0 * ctx.a2 / std::pow(det_ktilde(ctx.blocks, t), 1.5);
}

}  // namespace

AppendixReport appendix_check(const Spectrum& spec, const ThetaWindow& window) {
  AppendixReport rep;
  const double th = window.theta;
  if (th == 0.0) return rep;

  const TiltPoint tilt = solve_v(spec, window);
  AppendixContext ctx;
  ctx.theta = th;
  ctx.v = tilt.v;
  ctx.a2 = a_coeff(spec, window, tilt, 2);
  ctx.a3 = a_coeff(spec, window, tilt, 3);
  ctx.a4 = a_coeff(spec, window, tilt, 4);
  const FgPair fg = f_g(spec, window, tilt);
  ctx.blocks = k_blocks(ctx.v, ctx.a2, fg.f, fg.g);
  ctx.spec = &spec;

  const double a2 = ctx.a2, a3 = ctx.a3, a4 = ctx.a4;
  const double s = 1.0 / std::sqrt(a2);
  rep.f0_coeff = s * (7.0 / 6.0 - 3.0 / a2 + 2.0 * a3 / (a2 * a2) -
                      (5.0 / 3.0) * a3 * a3 / (a2 * a2 * a2) +
                      1.5 * a4 / (a2 * a2));
  rep.m1 = s * (1.5 * a4 / (a2 * a2) -
                (5.0 / 3.0) * a3 * a3 / (a2 * a2 * a2) + 1.0 / 6.0);

  // Analytic t-derivatives. The (t - theta) factor of f1 vanishes at theta,
  // so only its derivative survives:
  //   d/dt N f1|_theta = 2 theta q(theta) / (theta^3 A2^{5/2}),
  //   q(theta) = theta (2 A2^2 + A3 - 3 A2).
  rep.f1_part = -2.0 * (2.0 * a2 * a2 + a3 - 3.0 * a2) / std::pow(a2, 2.5);
  {
    const KBlocks& b = ctx.blocks;
    const double det = det_ktilde(b, th);
    const double ddet = b.alpha - b.delta - 2.0 * th * b.alpha * b.delta +
                        2.0 * th * b.gamma * b.gamma;
    const double d2det = 2.0 * (b.gamma * b.gamma - b.alpha * b.delta);
    const double nf2 = 2.0 * a2;
    const double d1 = -1.5 * nf2 * std::pow(det, -2.5) * ddet;
    const double d2 = (15.0 / 4.0) * nf2 * std::pow(det, -3.5) * ddet * ddet -
                      1.5 * nf2 * std::pow(det, -2.5) * d2det;
    rep.f2_part = 0.5 * th * th * d2 + th * d1;
  }
  rep.combined = rep.f0_coeff + rep.f1_part + rep.f2_part;
  rep.diff = rep.combined - rep.m1;

  // Central differences at step 1e-5 on the closed forms.
  const double h = 1e-5;
  {
    const double d1 = (closed_nf1(ctx, th + h) - closed_nf1(ctx, th - h)) / (2.0 * h);
    const double f2p = (closed_nf2(ctx, th + h) - closed_nf2(ctx, th - h)) / (2.0 * h);
    const double f2pp = (closed_nf2(ctx, th + h) - 2.0 * closed_nf2(ctx, th) +
                         closed_nf2(ctx, th - h)) / (h * h);
    rep.combined_central =
        rep.f0_coeff - th * d1 + 0.5 * th * th * f2pp + th * f2p;
  }

  // Wick re-derivation from the p0, p1, p2 moments. N f1 det^{5/2} and
  // N f2 det^{3/2} are polynomials in t, so the derivatives come from an
  // exact interpolation rather than difference quotients.
  rep.f0_coeff_wick = wick_f0_coeff(ctx);
  {
    const auto d1 = wick_derivatives(
        ctx, 2.5, [&](double t) { return wick_nf1(ctx, t); }, th);
    rep.f1_part_wick = -th * d1.d1;
    const auto d2 = wick_derivatives(
        ctx, 1.5, [&](double t) { return wick_nf2(ctx, t); }, th);
    rep.f2_part_wick = 0.5 * th * th * d2.d2 + th * d2.d1;
  }
  return rep;
}

RichardsonResult richardson_extract(
    const std::vector<std::pair<double, double>>& values, int order) {
  if (order < 0) throw DomainError("richardson_extract: negative order");
  if (values.size() < static_cast<std::size_t>(order) + 2)
    throw DomainError("richardson_extract: need at least order + 2 points");

  std::vector<std::pair<double, double>> pts;  // (x = 1/N, y)
  pts.reserve(values.size());
  for (const auto& [n, y] : values) {
    if (n <= 0.0) throw DomainError("richardson_extract: N must be positive");
    pts.emplace_back(1.0 / n, y);
  }
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].first - pts[i - 1].first < 1e-12)
      throw IllConditioned("richardson_extract: N values too close");

  // Newton interpolation through all points, then monomial coefficients in x.
  auto fit = [](const std::vector<std::pair<double, double>>& p) {
    const std::size_t m = p.size();
    std::vector<double> dd(m);
    for (std::size_t i = 0; i < m; ++i) dd[i] = p[i].second;
    for (std::size_t level = 1; level < m; ++level)
      for (std::size_t i = m - 1; i >= level; --i)
        dd[i] = (dd[i] - dd[i - 1]) / (p[i].first - p[i - level].first);
    // Horner expansion of the Newton form into monomials.
    std::vector<double> coeff(m, 0.0);
    coeff[0] = dd[m - 1];
    std::size_t deg = 0;
    for (std::size_t k = m - 1; k-- > 0;) {
      const double xk = p[k].first;
      // coeff <- coeff * (x - xk) + dd[k]
      for (std::size_t j = deg + 2; j-- > 1;)
        coeff[j] = coeff[j - 1] - xk * coeff[j];
      coeff[0] = dd[k] - xk * coeff[0];
      ++deg;
    }
    return coeff;
  };

  const std::vector<double> full = fit(pts);
  std::vector<std::pair<double, double>> dropped(pts.begin(), pts.end() - 1);
  const std::vector<double> part = fit(dropped);

  RichardsonResult res;
  for (int j = 0; j <= order; ++j) {
    const std::size_t k = static_cast<std::size_t>(j);
    const double mj = k < full.size() ? full[k] : 0.0;
    const double pj = k < part.size() ? part[k] : 0.0;
    res.m.push_back(mj);
    res.err.push_back(std::abs(mj - pj));
  }
  return res;
}

}  // namespace spherint
