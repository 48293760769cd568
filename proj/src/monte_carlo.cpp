#include "spherint/monte_carlo.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "spherint/errors.hpp"
#include "spherint/expansion.hpp"
#include "spherint/parallel.hpp"
#include "spherint/rng.hpp"

namespace spherint {

namespace {

// Shifted log-sum accumulator: s1 = sum exp(lw - shift), s2 = sum exp(2(lw - shift)).
struct LogAcc {
  double shift = -std::numeric_limits<double>::infinity();
  double s1 = 0.0;
  double s2 = 0.0;
  std::size_t n = 0;
  std::size_t rejected = 0;

  void add(double lw) {
    if (lw > shift) {
      if (n > 0) {
        const double r = std::exp(shift - lw);
        s1 *= r;
        s2 *= r * r;
      }
      shift = lw;
    }
    const double e = std::exp(lw - shift);
    s1 += e;
    s2 += e * e;
    ++n;
  }

  static LogAcc merge(const LogAcc& a, const LogAcc& b) {
    if (a.n == 0) {
      LogAcc out = b;
      out.rejected += a.rejected;
      return out;
    }
    if (b.n == 0) {
      LogAcc out = a;
      out.rejected += b.rejected;
      return out;
    }
    LogAcc out;
    out.shift = std::max(a.shift, b.shift);
    const double ra = std::exp(a.shift - out.shift);
    const double rb = std::exp(b.shift - out.shift);
    out.s1 = a.s1 * ra + b.s1 * rb;
    out.s2 = a.s2 * ra * ra + b.s2 * rb * rb;
    out.n = a.n + b.n;
    out.rejected = a.rejected + b.rejected;
    return out;
  }
};

void check_config(const McConfig& cfg) {
  if (cfg.samples < 100) throw DomainError("McConfig: samples must be >= 100");
  if (cfg.batch == 0) throw DomainError("McConfig: batch must be positive");
}

// Runs fn over all sample indices, accumulating per batch and merging with a
// fixed pairwise tree. fn returns the log-weight or nullopt (rejected).
template <class Fn>
LogAcc accumulate_log(const McConfig& cfg, Fn&& fn,
                      std::vector<BatchPartial>* partials, bool log_domain,
                      std::vector<LogAcc>* blocks_out = nullptr) {
  const std::size_t blocks = (cfg.samples + cfg.batch - 1) / cfg.batch;
  std::vector<LogAcc> acc(blocks);
  par::for_each_block(blocks, [&](std::size_t b) {
    const std::size_t begin = b * cfg.batch;
    const std::size_t end = std::min(begin + cfg.batch, cfg.samples);
    LogAcc local;
    for (std::size_t s = begin; s < end; ++s) {
      const std::optional<double> lw = fn(s);
      if (lw)
        local.add(*lw);
      else
        ++local.rejected;
    }
    acc[b] = local;
  });
  if (partials) {
    partials->clear();
    partials->reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      const LogAcc& a = acc[b];
      BatchPartial row;
      row.batch = b;
      row.n = a.n;
      if (a.n > 0) {
        if (log_domain) {
          row.mean = a.shift + std::log(a.s1 / static_cast<double>(a.n));
          row.m2 = static_cast<double>(a.n) * a.s2 / (a.s1 * a.s1) - 1.0;
        } else {
          const double mean = std::exp(a.shift) * a.s1 / static_cast<double>(a.n);
          row.mean = mean;
          row.m2 = std::exp(2.0 * a.shift) *
                   (a.s2 - a.s1 * a.s1 / static_cast<double>(a.n));
        }
      }
      partials->push_back(row);
    }
  }
  if (blocks_out) *blocks_out = acc;
  return par::tree_reduce(std::move(acc), LogAcc::merge);
}

// Relative spread of the weights: sd(W) / (sqrt(n) mean(W)), shift-free.
double relative_stderr(const LogAcc& a) {
  if (a.n < 2) return 0.0;
  const double n = static_cast<double>(a.n);
  double var_rel = n * a.s2 / (a.s1 * a.s1) - 1.0;  // n Var_pop / mean^2 ... times n
  if (var_rel < 0.0) var_rel = 0.0;
  return std::sqrt(var_rel / (n - 1.0));
}

double log_mean(const LogAcc& a) {
  return a.shift + std::log(a.s1 / static_cast<double>(a.n));
}

// Delete-one-batch jackknife stderr of the log of the mean.
double jackknife_log_stderr(const std::vector<LogAcc>& acc, const LogAcc& total) {
  std::size_t blocks = 0;
  for (const auto& a : acc)
    if (a.n > 0) ++blocks;
  if (blocks < 2) return 0.0;
  double sum = 0.0, sumsq = 0.0;
  for (const auto& a : acc) {
    if (a.n == 0) continue;
    const double r = std::exp(a.shift - total.shift);
    const double s1 = total.s1 - a.s1 * r;
    const double n = static_cast<double>(total.n - a.n);
    const double loo = total.shift + std::log(s1 / n);
    sum += loo;
    sumsq += loo * loo;
  }
  const double b = static_cast<double>(blocks);
  const double mean = sum / b;
  double var = (b - 1.0) / b * (sumsq - b * mean * mean);
  if (var < 0.0) var = 0.0;
  return std::sqrt(var);
}

struct TiltedSetup {
  std::vector<double> lam;       // working (possibly doubled) spectrum
  std::vector<double> inv_sd;    // 1/sqrt(d_i)
  std::vector<double> centered;  // lambda_i - v
  double theta_eff = 0.0;
  double v = 0.0;
  std::size_t dims = 0;
};

TiltedSetup tilted_setup(const Spectrum& spec, double theta) {
  TiltedSetup s;
  const Spectrum working = spec.beta() == 2 ? spec.doubled() : spec;
  s.theta_eff = spec.beta() == 2 ? 0.5 * theta : theta;
  s.lam = working.eigenvalues();
  s.dims = s.lam.size();
  const ThetaWindow w = ThetaWindow::of(working, s.theta_eff);
  s.v = solve_v(working, w).v;
  s.inv_sd.resize(s.dims);
  s.centered.resize(s.dims);
  for (std::size_t i = 0; i < s.dims; ++i) {
    const double d = 1.0 - 2.0 * s.theta_eff * s.lam[i] + 2.0 * s.theta_eff * s.v;
    if (d <= 0.0) throw DomainError("tilted measure: nonpositive variance factor");
    s.inv_sd[i] = 1.0 / std::sqrt(d);
    s.centered[i] = s.lam[i] - s.v;
  }
  return s;
}

}  // namespace

McEstimate naive_log_i(const Spectrum& spec, double theta, std::size_t n_dim,
                       const McConfig& cfg, std::vector<BatchPartial>* partials) {
  check_config(cfg);
  if (spec.size() != n_dim)
    throw ShapeError("naive_log_i: spectrum length must equal N");
  const Spectrum working = spec.beta() == 2 ? spec.doubled() : spec;
  const std::vector<double>& lam = working.eigenvalues();
  const std::size_t dims = lam.size();
  const double scale = theta * static_cast<double>(n_dim);

  auto sample = [&](std::size_t s) -> std::optional<double> {
    SampleStream g(cfg.seed, s);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < dims; ++i) {
      const double x = g.normal();
      const double x2 = x * x;
      den += x2;
      num += lam[i] * x2;
    }
    return scale * num / den;
  };
  std::vector<LogAcc> blocks;
  const LogAcc total = accumulate_log(cfg, sample, partials, true,
                                      cfg.jackknife ? &blocks : nullptr);

  McEstimate est;
  est.log_domain = true;
  est.seed = cfg.seed;
  est.n = total.n;
  est.rejected = total.rejected;
  const double n_inv = 1.0 / static_cast<double>(n_dim);
  est.mean = log_mean(total) * n_inv;
  est.std_error = cfg.jackknife
                      ? jackknife_log_stderr(blocks, total) * n_inv
                      : relative_stderr(total) * n_inv;
  return est;
}

McEstimate tilted_estimate(const Spectrum& spec, const ThetaWindow& window,
                           std::size_t n_dim, const McConfig& cfg,
                           std::vector<BatchPartial>* partials) {
  check_config(cfg);
  if (spec.size() != n_dim)
    throw ShapeError("tilted_estimate: spectrum length must equal N");
  const TiltedSetup setup = tilted_setup(spec, window.theta);
  const double dims = static_cast<double>(setup.dims);

  auto sample = [&](std::size_t s) -> std::optional<double> {
    SampleStream g(cfg.seed, s);
    double sum_sq = 0.0, sum_centered = 0.0;
    for (std::size_t i = 0; i < setup.dims; ++i) {
      const double x = g.normal() * setup.inv_sd[i];
      const double x2 = x * x;
      sum_sq += x2;
      sum_centered += setup.centered[i] * x2;
    }
    const double gamma = sum_sq / dims - 1.0;
    if (gamma <= -1.0 + 1e-9) return std::nullopt;  // singular weight guard
    const double resid = sum_centered / dims;  // gamma^ - v gamma
    return -setup.theta_eff * dims * gamma * resid / (gamma + 1.0);
  };
  std::vector<LogAcc> blocks;
  const LogAcc total = accumulate_log(cfg, sample, partials, false,
                                      cfg.jackknife ? &blocks : nullptr);

  McEstimate est;
  est.log_domain = false;
  est.seed = cfg.seed;
  est.n = total.n;
  est.rejected = total.rejected;
  est.mean = std::exp(log_mean(total));
  est.std_error = cfg.jackknife
                      ? est.mean * jackknife_log_stderr(blocks, total)
                      : est.mean * relative_stderr(total);
  return est;
}

McEstimate log_i_tilted(const Spectrum& spec, double theta, std::size_t n_dim,
                        const McConfig& cfg) {
  const ThetaWindow window = ThetaWindow::of(spec, theta);
  const McEstimate pre = tilted_estimate(spec, window, n_dim, cfg);
  const ExpansionResult res = coefficients(spec, window);
  McEstimate est = pre;
  est.log_domain = true;
  const double n_inv = 1.0 / static_cast<double>(n_dim);
  est.mean = res.j + std::log(pre.mean) * n_inv;
  est.std_error = pre.std_error / pre.mean * n_inv;
  return est;
}

namespace {

// Two-channel Welford accumulator with exceedance counters.
struct GammaAcc {
  std::size_t n = 0;
  double mean_g = 0.0, m2_g = 0.0;
  double mean_h = 0.0, m2_h = 0.0;
  std::size_t exceed1 = 0, exceed2 = 0;
  std::size_t rejected = 0;

  void add(double g, double h, bool e1, bool e2) {
    ++n;
    const double dn = static_cast<double>(n);
    double d = g - mean_g;
    mean_g += d / dn;
    m2_g += d * (g - mean_g);
    d = h - mean_h;
    mean_h += d / dn;
    m2_h += d * (h - mean_h);
    if (e1) ++exceed1;
    if (e2) ++exceed2;
  }

  static GammaAcc merge(const GammaAcc& a, const GammaAcc& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    GammaAcc out;
    out.n = a.n + b.n;
    const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
    const double nn = na + nb;
    double d = b.mean_g - a.mean_g;
    out.mean_g = a.mean_g + d * nb / nn;
    out.m2_g = a.m2_g + b.m2_g + d * d * na * nb / nn;
    d = b.mean_h - a.mean_h;
    out.mean_h = a.mean_h + d * nb / nn;
    out.m2_h = a.m2_h + b.m2_h + d * d * na * nb / nn;
    out.exceed1 = a.exceed1 + b.exceed1;
    out.exceed2 = a.exceed2 + b.exceed2;
    out.rejected = a.rejected + b.rejected;
    return out;
  }
};

SummaryStats summarize(double mean, double m2, std::size_t n) {
  SummaryStats s;
  s.mean = mean;
  s.n = n;
  if (n > 1) {
    s.stddev = std::sqrt(m2 / static_cast<double>(n - 1));
    s.std_error = s.stddev / std::sqrt(static_cast<double>(n));
  }
  return s;
}

}  // namespace

GammaStats gamma_stats(const Spectrum& spec, const ThetaWindow& window,
                       std::size_t n_dim, double kappa1, double kappa2,
                       const McConfig& cfg) {
  check_config(cfg);
  if (spec.size() != n_dim)
    throw ShapeError("gamma_stats: spectrum length must equal N");
  const TiltedSetup setup = tilted_setup(spec, window.theta);
  const double dims = static_cast<double>(setup.dims);
  const double thr1 = std::pow(dims, -kappa1);
  const double thr2 = std::pow(dims, -kappa2);

  const std::size_t blocks = (cfg.samples + cfg.batch - 1) / cfg.batch;
  std::vector<GammaAcc> acc(blocks);
  par::for_each_block(blocks, [&](std::size_t b) {
    const std::size_t begin = b * cfg.batch;
    const std::size_t end = std::min(begin + cfg.batch, cfg.samples);
    GammaAcc local;
    for (std::size_t s = begin; s < end; ++s) {
      SampleStream g(cfg.seed, s);
      double sum_sq = 0.0, sum_centered = 0.0;
      for (std::size_t i = 0; i < setup.dims; ++i) {
        const double x = g.normal() * setup.inv_sd[i];
        const double x2 = x * x;
        sum_sq += x2;
        sum_centered += setup.centered[i] * x2;
      }
      const double gamma = sum_sq / dims - 1.0;
      const double resid = sum_centered / dims;
      const double gamma_hat = resid + setup.v * gamma;
      local.add(gamma, gamma_hat, std::abs(gamma) > thr1,
                std::abs(gamma_hat) > thr2);
    }
    acc[b] = local;
  });
  const GammaAcc total = par::tree_reduce(std::move(acc), GammaAcc::merge);

  GammaStats stats;
  stats.gamma = summarize(total.mean_g, total.m2_g, total.n);
  stats.gamma_hat = summarize(total.mean_h, total.m2_h, total.n);
  stats.exceed_k1 = static_cast<double>(total.exceed1) / static_cast<double>(total.n);
  stats.exceed_k2 = static_cast<double>(total.exceed2) / static_cast<double>(total.n);
  stats.kappa1 = kappa1;
  stats.kappa2 = kappa2;
  stats.kappa_ok = kappa1 < 0.5 && kappa1 > 2.0 * kappa2 &&
                   2.0 * kappa1 + kappa2 > 1.0;
  stats.seed = cfg.seed;
  return stats;
}

}  // namespace spherint
