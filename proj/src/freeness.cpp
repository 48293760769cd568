#include "spherint/freeness.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "spherint/errors.hpp"
#include "spherint/parallel.hpp"
#include "spherint/rng.hpp"

namespace spherint::freeness {

EntryLaw parse_law(const std::string& name) {
  if (name == "gaussian") return EntryLaw::gaussian;
  if (name == "rademacher") return EntryLaw::rademacher;
  if (name == "uniform") return EntryLaw::uniform;
  throw UnknownLaw("unknown entry law: " + name);
}

std::string law_name(EntryLaw law) {
  switch (law) {
    case EntryLaw::gaussian: return "gaussian";
    case EntryLaw::rademacher: return "rademacher";
    case EntryLaw::uniform: return "uniform";
  }
  return "?";
}

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

double draw_entry(SampleStream& s, EntryLaw law) {
  switch (law) {
    case EntryLaw::gaussian: return s.normal();
    case EntryLaw::rademacher: return s.uniform() < 0.5 ? -1.0 : 1.0;
    case EntryLaw::uniform: return kSqrt3 * (2.0 * s.uniform() - 1.0);
  }
  return 0.0;
}

}  // namespace

Eigen::MatrixXd sample_wigner(const WignerConfig& cfg) {
  if (cfg.n == 0) throw DomainError("sample_wigner: n must be positive");
  const auto n = static_cast<Eigen::Index>(cfg.n);
  Eigen::MatrixXd x(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n));
  SampleStream stream(cfg.seed, 0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = scale * draw_entry(stream, cfg.law);
      x(i, j) = v;
      x(j, i) = v;
    }
  return x;
}

Eigen::MatrixXd sample_haar_orthogonal(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("sample_haar_orthogonal: n must be positive");
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd g(m, m);
  SampleStream stream(seed, 0);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = stream.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Sign correction: Q diag(sign(R_ii)) makes the factorization unique and
  // the law exactly Haar.
  for (Eigen::Index j = 0; j < m; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ShapeError("symmetric_eigenvalues: not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("symmetric_eigenvalues: eigensolver failed");
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

Eigen::MatrixXd diag_matrix(const Spectrum& spec) {
  const auto n = static_cast<Eigen::Index>(spec.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = spec.eigenvalues()[i];
  return m;
}

namespace {

McEstimate combined_sphere_log_i(const std::vector<double>& lam_b,
                                 const std::vector<double>& lam_bt,
                                 double theta, const McConfig& cfg) {
  // One stream per sample: first |B| normals give e, the next |B~| give the
  // independent second sphere point.
  const std::size_t nb = lam_b.size();
  const std::size_t nt = lam_bt.size();
  const double scale = theta * static_cast<double>(nb);

  struct Acc {
    double shift = -std::numeric_limits<double>::infinity();
    double s1 = 0.0, s2 = 0.0;
    std::size_t n = 0;
  };
  const std::size_t blocks = (cfg.samples + cfg.batch - 1) / cfg.batch;
  std::vector<Acc> acc(blocks);
  par::for_each_block(blocks, [&](std::size_t bi) {
    const std::size_t begin = bi * cfg.batch;
    const std::size_t end = std::min(begin + cfg.batch, cfg.samples);
    Acc local;
    for (std::size_t s = begin; s < end; ++s) {
      SampleStream g(cfg.seed, s);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < nb; ++i) {
        const double x = g.normal();
        den += x * x;
        num += lam_b[i] * x * x;
      }
      double lw = scale * num / den;
      num = den = 0.0;
      for (std::size_t i = 0; i < nt; ++i) {
        const double x = g.normal();
        den += x * x;
        num += lam_bt[i] * x * x;
      }
      lw += theta * static_cast<double>(nt) * num / den;
      if (lw > local.shift) {
        if (local.n > 0) {
          const double r = std::exp(local.shift - lw);
          local.s1 *= r;
          local.s2 *= r * r;
        }
        local.shift = lw;
      }
      const double e = std::exp(lw - local.shift);
      local.s1 += e;
      local.s2 += e * e;
      ++local.n;
    }
    acc[bi] = local;
  });
  const Acc total = par::tree_reduce(std::move(acc), [](const Acc& a, const Acc& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    Acc out;
    out.shift = std::max(a.shift, b.shift);
    const double ra = std::exp(a.shift - out.shift);
    const double rb = std::exp(b.shift - out.shift);
    out.s1 = a.s1 * ra + b.s1 * rb;
    out.s2 = a.s2 * ra * ra + b.s2 * rb * rb;
    out.n = a.n + b.n;
    return out;
  });

  McEstimate est;
  est.log_domain = true;
  est.seed = cfg.seed;
  est.n = total.n;
  const double n = static_cast<double>(total.n);
  const double inv_dim = 1.0 / static_cast<double>(nb);
  est.mean = (total.shift + std::log(total.s1 / n)) * inv_dim;
  double var_rel = n * total.s2 / (total.s1 * total.s1) - 1.0;
  if (var_rel < 0.0) var_rel = 0.0;
  est.std_error = std::sqrt(var_rel / (n - 1.0)) * inv_dim;
  return est;
}

McEstimate conjugation_log_i(const Eigen::MatrixXd& b,
                             const Eigen::MatrixXd& bt, double theta,
                             const McConfig& cfg) {
  const auto n = b.rows();
  const std::size_t nd = static_cast<std::size_t>(n);
  const double scale = theta * static_cast<double>(nd);

  struct Acc {
    double shift = -std::numeric_limits<double>::infinity();
    double s1 = 0.0, s2 = 0.0;
    std::size_t n = 0;
  };
  const std::size_t blocks = (cfg.samples + cfg.batch - 1) / cfg.batch;
  std::vector<Acc> acc(blocks);
  par::for_each_block(blocks, [&](std::size_t bi) {
    const std::size_t begin = bi * cfg.batch;
    const std::size_t end = std::min(begin + cfg.batch, cfg.samples);
    Acc local;
    Eigen::MatrixXd g(n, n), q, m;
    Eigen::VectorXd e(n);
    for (std::size_t s = begin; s < end; ++s) {
      SampleStream stream(cfg.seed, s);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = stream.normal();
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
      q = qr.householderQ();
      const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
      for (Eigen::Index j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
      m = b + q.transpose() * bt * q;
      for (Eigen::Index i = 0; i < n; ++i) e(i) = stream.normal();
      e.normalize();
      const double lw = scale * e.dot(m * e);
      if (lw > local.shift) {
        if (local.n > 0) {
          const double rr = std::exp(local.shift - lw);
          local.s1 *= rr;
          local.s2 *= rr * rr;
        }
        local.shift = lw;
      }
      const double w = std::exp(lw - local.shift);
      local.s1 += w;
      local.s2 += w * w;
      ++local.n;
    }
    acc[bi] = local;
  });
  const Acc total = par::tree_reduce(std::move(acc), [](const Acc& a, const Acc& c) {
    if (a.n == 0) return c;
    if (c.n == 0) return a;
    Acc out;
    out.shift = std::max(a.shift, c.shift);
    const double ra = std::exp(a.shift - out.shift);
    const double rc = std::exp(c.shift - out.shift);
    out.s1 = a.s1 * ra + c.s1 * rc;
    out.s2 = a.s2 * ra * ra + c.s2 * rc * rc;
    out.n = a.n + c.n;
    return out;
  });

  McEstimate est;
  est.log_domain = true;
  est.seed = cfg.seed;
  est.n = total.n;
  const double cnt = static_cast<double>(total.n);
  const double inv_dim = 1.0 / static_cast<double>(nd);
  est.mean = (total.shift + std::log(total.s1 / cnt)) * inv_dim;
  double var_rel = cnt * total.s2 / (total.s1 * total.s1) - 1.0;
  if (var_rel < 0.0) var_rel = 0.0;
  est.std_error = std::sqrt(var_rel / (cnt - 1.0)) * inv_dim;
  return est;
}

}  // namespace

ExperimentReport additivity_check(const Eigen::MatrixXd& b,
                                  const Eigen::MatrixXd& b_tilde, double theta,
                                  const McConfig& cfg, AdditivityMode mode) {
  if (b.rows() != b.cols() || b_tilde.rows() != b_tilde.cols() ||
      b.rows() != b_tilde.rows())
    throw ShapeError("additivity_check: matrices must be square and same size");
  const std::size_t n = static_cast<std::size_t>(b.rows());

  const std::vector<double> lam_b = symmetric_eigenvalues(b);
  const std::vector<double> lam_bt = symmetric_eigenvalues(b_tilde);

  McEstimate lhs;
  if (mode == AdditivityMode::collapsed) {
    McConfig sub = cfg;
    sub.seed = derive_seed(cfg.seed, 0);
    lhs = combined_sphere_log_i(lam_b, lam_bt, theta, sub);
  } else {
    McConfig sub = cfg;
    sub.seed = derive_seed(cfg.seed, 0);
    lhs = conjugation_log_i(b, b_tilde, theta, sub);
  }

  McConfig cfg_b = cfg;
  cfg_b.seed = derive_seed(cfg.seed, 1);
  const McEstimate est_b =
      naive_log_i(Spectrum::make(lam_b), theta, n, cfg_b);
  McConfig cfg_bt = cfg;
  cfg_bt.seed = derive_seed(cfg.seed, 2);
  const McEstimate est_bt =
      naive_log_i(Spectrum::make(lam_bt), theta, n, cfg_bt);

  ExperimentRow row;
  row.n = n;
  row.lhs = lhs.mean;
  row.rhs = est_b.mean + est_bt.mean;
  row.gap = row.lhs - row.rhs;
  row.std_error = std::sqrt(lhs.std_error * lhs.std_error +
                            est_b.std_error * est_b.std_error +
                            est_bt.std_error * est_bt.std_error);

  ExperimentReport rep;
  rep.theta = theta;
  rep.rows.push_back(row);
  rep.verdict = std::abs(row.gap) <= 3.0 * row.std_error;
  rep.notes = mode == AdditivityMode::collapsed
                  ? "collapsed single-MC over independent sphere pairs"
                  : "per-sample Haar conjugation";
  return rep;
}

ExperimentReport freeness_experiment(const Spectrum& a_spec,
                                     const WignerConfig& wigner_template,
                                     double theta,
                                     const std::vector<std::size_t>& ns,
                                     const McConfig& cfg, LogIMethod method,
                                     bool allow_large_theta) {
  if (std::abs(theta) > 0.2 && !allow_large_theta)
    throw DomainError("freeness_experiment: |theta| <= 0.2 (override available)");
  if (ns.empty()) throw DomainError("freeness_experiment: empty size list");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1])
      throw DomainError("freeness_experiment: sizes must be increasing");

  auto estimate = [&](const Spectrum& spec, std::size_t n, std::uint64_t seed) {
    McConfig sub = cfg;
    sub.seed = seed;
    return method == LogIMethod::tilted
               ? log_i_tilted(spec, theta, n, sub)
               : naive_log_i(spec, theta, n, sub);
  };

  ExperimentReport rep;
  rep.theta = theta;
  bool trend_ok = true;
  for (std::size_t idx = 0; idx < ns.size(); ++idx) {
    const std::size_t n = ns[idx];
    const Spectrum a_n = a_spec.resampled(n);
    WignerConfig wc = wigner_template;
    wc.n = n;
    wc.seed = derive_seed(wigner_template.seed, 1000 + n);
    const Eigen::MatrixXd x = sample_wigner(wc);
    const Eigen::MatrixXd sum = diag_matrix(a_n) + x;

    const Spectrum spec_sum = Spectrum::make(symmetric_eigenvalues(sum));
    const Spectrum spec_x = Spectrum::make(symmetric_eigenvalues(x));

    const McEstimate lhs = estimate(spec_sum, n, derive_seed(cfg.seed, 3 * n));
    const McEstimate rhs_a = estimate(a_n, n, derive_seed(cfg.seed, 3 * n + 1));
    const McEstimate rhs_x = estimate(spec_x, n, derive_seed(cfg.seed, 3 * n + 2));

    ExperimentRow row;
    row.n = n;
    row.lhs = lhs.mean;
    row.rhs = rhs_a.mean + rhs_x.mean;
    row.gap = row.lhs - row.rhs;
    row.std_error = std::sqrt(lhs.std_error * lhs.std_error +
                              rhs_a.std_error * rhs_a.std_error +
                              rhs_x.std_error * rhs_x.std_error);
    row.x_term = rhs_x.mean;
    if (idx > 0) {
      const ExperimentRow& prev = rep.rows.back();
      if (std::abs(row.gap) >
          std::abs(prev.gap) + 2.0 * (row.std_error + prev.std_error))
        trend_ok = false;
    }
    rep.rows.push_back(row);
  }
  rep.verdict = trend_ok && std::abs(rep.rows.back().gap) <= 0.01;
  rep.notes = std::string("log I estimated by ") +
              (method == LogIMethod::tilted ? "tilted change of measure"
                                            : "naive sphere average") +
              "; wigner law " + law_name(wigner_template.law);
  return rep;
}

namespace {

double log_laplace(EntryLaw law, double t) {
  switch (law) {
    case EntryLaw::gaussian:
      return 0.5 * t * t;
    case EntryLaw::rademacher:
      return std::log(std::cosh(t));
    case EntryLaw::uniform: {
      // uniform on [-sqrt(3), sqrt(3)]: E e^{tX} = sinh(sqrt(3) t)/(sqrt(3) t)
      const double u = kSqrt3 * t;
      if (std::abs(u) < 1e-8) return u * u / 6.0;
      return std::log(std::sinh(std::abs(u)) / std::abs(u));
    }
  }
  return 0.0;
}

}  // namespace

LaplaceBoundReport laplace_bound_check(EntryLaw law, double c,
                                       std::size_t grid_points) {
  if (grid_points < 3) throw DomainError("laplace_bound_check: grid too small");
  LaplaceBoundReport rep;
  rep.law = law;
  rep.supplied_c = c;
  rep.grid_points = grid_points;
  rep.pass_lower = true;
  rep.pass_upper = true;
  double c_min = 0.0;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double t = -1.0 + 2.0 * static_cast<double>(i) /
                                static_cast<double>(grid_points - 1);
    if (t == 0.0) continue;
    const double ll = log_laplace(law, t);
    const double quad = 0.5 * t * t;
    const double cube = std::abs(t * t * t);
    // lower: quad - c cube <= ll  <=>  c >= (quad - ll)/cube
    // upper: ll <= quad + c cube  <=>  c >= (ll - quad)/cube
    c_min = std::max(c_min, (quad - ll) / cube);
    c_min = std::max(c_min, (ll - quad) / cube);
    if (quad - c * cube > ll + 1e-15) rep.pass_lower = false;
    if (ll > quad + c * cube + 1e-15) rep.pass_upper = false;
  }
  rep.c_min = c_min;
  return rep;
}

SphereMaxReport sphere_max_check(std::size_t n, double epsilon,
                                 const McConfig& cfg) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw DomainError("sphere_max_check: epsilon must be in (0, 1/2)");
  if (n == 0) throw DomainError("sphere_max_check: n must be positive");

  auto exceed_rate = [&](std::size_t dim, std::uint64_t seed) {
    const double threshold =
        std::pow(static_cast<double>(dim), -0.5 + epsilon);
    const std::size_t blocks = (cfg.samples + cfg.batch - 1) / cfg.batch;
    std::vector<std::size_t> counts(blocks, 0);
    par::for_each_block(blocks, [&](std::size_t bi) {
      const std::size_t begin = bi * cfg.batch;
      const std::size_t end = std::min(begin + cfg.batch, cfg.samples);
      std::size_t cnt = 0;
      for (std::size_t s = begin; s < end; ++s) {
        SampleStream g(seed, s);
        double maxabs = 0.0, norm2 = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
          const double x = g.normal();
          norm2 += x * x;
          maxabs = std::max(maxabs, std::abs(x));
        }
        if (maxabs / std::sqrt(norm2) > threshold) ++cnt;
      }
      counts[bi] = cnt;
    });
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    return static_cast<double>(total) / static_cast<double>(cfg.samples);
  };

  SphereMaxReport rep;
  rep.n = n;
  rep.epsilon = epsilon;
  rep.threshold = std::pow(static_cast<double>(n), -0.5 + epsilon);
  rep.rate = exceed_rate(n, cfg.seed);

  // The bound only asserts that some c exists: fit it at N = 256.
  constexpr std::size_t kRefN = 256;
  const double ref_rate = exceed_rate(kRefN, derive_seed(cfg.seed, 99));
  const double ref_pow = std::pow(static_cast<double>(kRefN), 2.0 * epsilon);
  const double floor_rate = 1.0 / static_cast<double>(cfg.samples);
  rep.fitted_c =
      std::log(static_cast<double>(kRefN) / std::max(ref_rate, floor_rate)) /
      ref_pow;
  rep.bound = static_cast<double>(n) *
              std::exp(-rep.fitted_c *
                       std::pow(static_cast<double>(n), 2.0 * epsilon));
  rep.verdict = rep.rate <= rep.bound;
  return rep;
}

}  // namespace spherint::freeness
