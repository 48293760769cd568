// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "spherint/errors.hpp"
#include "spherint/expansion.hpp"
#include "spherint/freeness.hpp"
#include "spherint/gauss_moments.hpp"
#include "spherint/hciz.hpp"
#include "spherint/monte_carlo.hpp"
#include "spherint/parallel.hpp"
#include "spherint/rng.hpp"
#include "spherint/spectrum.hpp"

using namespace spherint;
namespace fr = spherint::freeness;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, double seconds,
            const std::string& detail) {
  std::printf("%s | criterion %2d: %s (%s) [%.2fs]\n", pass ? "PASS" : "FAIL",
              idx, name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

template <class Fn>
void criterion(int idx, const std::string& name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = fn();
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(idx, name, pass, secs, detail);
}

struct Corpus {
  std::vector<Spectrum> spectra;
  std::vector<double> thetas{0.02, -0.02, 0.05, -0.05};
};

Corpus make_corpus() {
  Corpus c;
  const std::size_t sizes[] = {2, 4, 16, 64};
  std::uint64_t seed = 1;
  for (std::size_t n : sizes)
    for (int rep = 0; rep < 25; ++rep)
      c.spectra.push_back(testutil::random_spectrum(n, seed++ * 7919 + n));
  return c;
}

std::pair<bool, std::string> c1_identity_suite(const Corpus& corpus) {
  double worst_a1 = 0, worst_fg = 0, worst_det = 0, worst_j = 0;
  for (const auto& s : corpus.spectra) {
    for (double th : corpus.thetas) {
      const auto w = ThetaWindow::of(s, th);
      const auto t = solve_v(s, w);
      const double a1 = std::abs(a_coeff(s, w, t, 1) - 1.0);
      const double a2 = a_coeff(s, w, t, 2);
      const auto fg = f_g(s, w, t);
      const double f_id = -1 / (2 * th) + (1 + 2 * th * t.v) * a2 / (2 * th);
      const double g_id = -(1 + 4 * th * t.v) / (4 * th * th) +
                          (1 + 2 * th * t.v) * (1 + 2 * th * t.v) * a2 /
                              (4 * th * th);
      const double fg_res =
          std::max(std::abs(fg.f - f_id), std::abs(fg.g - g_id));
      const double det_res =
          std::abs(k_matrix(s, w, th).det() - cplx(a2, 0.0));
      const double j_res = std::abs(r_integral(s, w, t) -
                                    r_integral_quadrature(s, th));
      worst_a1 = std::max(worst_a1, a1);
      worst_fg = std::max(worst_fg, fg_res);
      worst_det = std::max(worst_det, det_res);
      worst_j = std::max(worst_j, j_res);
    }
  }
  const bool pass = worst_a1 <= 1e-12 && worst_fg <= 1e-10 &&
                    worst_det <= 1e-10 && worst_j <= 1e-8;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "max residuals: A1 %.1e, F/G %.1e, detK %.1e, J %.1e",
                worst_a1, worst_fg, worst_det, worst_j);
  return {pass, buf};
}

std::pair<bool, std::string> c2_appendix(const Corpus& corpus) {
  double worst_comb = 0, worst_wick = 0;
  for (const auto& s : corpus.spectra) {
    for (double th : corpus.thetas) {
      const auto rep = appendix_check(s, ThetaWindow::of(s, th));
      worst_comb = std::max(worst_comb, std::abs(rep.diff));
      worst_wick =
          std::max(worst_wick, std::abs(rep.f2_part_wick - rep.f2_part));
    }
  }
  const bool pass = worst_comb <= 1e-10 && worst_wick <= 1e-8;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "max |combined - m1| %.1e, wick f2 %.1e",
                worst_comb, worst_wick);
  return {pass, buf};
}

ComplexQuadraticForm random_form(std::uint64_t seed) {
  SampleStream s(seed, 0);
  const double phi = 3.141592653589793 * s.uniform();
  const double c = std::cos(phi), sn = std::sin(phi);
  const double e1 = 0.4 + 1.6 * s.uniform();
  const double e2 = 0.4 + 1.6 * s.uniform();
  return ComplexQuadraticForm::make(
      {c * c * e1 + sn * sn * e2, 0.5 * (2 * s.uniform() - 1)},
      {c * sn * (e1 - e2), 0.5 * (2 * s.uniform() - 1)},
      {sn * sn * e1 + c * c * e2, 0.5 * (2 * s.uniform() - 1)});
}

std::pair<bool, std::string> c3_wick_vs_quadrature() {
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto k = random_form(seed * 101);
    SampleStream coeffs(seed, 1);
    Poly2 p = Poly2::constant(0.0);
    // a random polynomial of total degree 6
    for (const auto& [i, j] : std::vector<std::pair<int, int>>{
             {6, 0}, {4, 2}, {3, 3}, {2, 2}, {1, 1}, {0, 4}, {2, 0}, {0, 0}})
      p += Poly2::monomial(i, j, {2 * coeffs.uniform() - 1, 2 * coeffs.uniform() - 1});

    const cplx n_wick = gaussian_norm(k);
    const cplx n_quad = quad_norm(k);
    worst = std::max(worst, std::abs(n_wick - n_quad) / std::abs(n_wick));
    const cplx m_wick = gaussian_moment(k, p);
    const cplx m_quad = quad_moment(k, p);
    worst = std::max(worst,
                     std::abs(m_wick - m_quad) / std::max(1.0, std::abs(m_wick)));
  }
  char buf[80];
  std::snprintf(buf, sizeof(buf), "max relative error %.2e over 50 forms", worst);
  return {worst <= 1e-6, buf};
}

std::pair<bool, std::string> c4_expansion_rate() {
  std::vector<double> eps;
  for (std::size_t n : {6u, 12u, 24u}) {
    const auto spec = testutil::equispaced_spectrum(n, 2);
    const auto res = coefficients(spec, ThetaWindow::of(spec, 0.05));
    const auto exact = hciz::rank_one_exact(
        0.05, hciz::DistinctSpectrum::make(spec.eigenvalues()), n);
    const double pref =
        std::exp(exact.log_value - static_cast<double>(n) * res.j);
    eps.push_back(std::abs(pref - (res.m0 + res.m1 / static_cast<double>(n))));
  }
  const double r1 = eps[0] / eps[1], r2 = eps[1] / eps[2];
  char buf[100];
  std::snprintf(buf, sizeof(buf), "eps ratios %.2f and %.2f, want [2.5, 6]", r1, r2);
  return {r1 >= 2.5 && r1 <= 6.0 && r2 >= 2.5 && r2 <= 6.0, buf};
}

McEstimate c5_run(std::uint64_t threads) {
  const auto spec = Spectrum::make({-1.0, 1.0}).resampled(64);
  McConfig cfg;
  cfg.samples = 1000000;
  cfg.seed = 5;
  par::set_max_threads(threads);
  const auto est = tilted_estimate(spec, ThetaWindow::of(spec, 0.1), 64, cfg);
  par::set_max_threads(0);
  return est;
}

std::pair<bool, std::string> c5_tilted() {
  const auto spec = Spectrum::make({-1.0, 1.0}).resampled(64);
  const auto res = coefficients(spec, ThetaWindow::of(spec, 0.1));
  const auto est = c5_run(1);
  const double want = res.m0 + res.m1 / 64.0;
  const double z = std::abs(est.mean - want) / est.std_error;

  const auto atom = Spectrum::make({0.4}).resampled(64);
  McConfig cfg;
  cfg.samples = 100000;
  const auto exact = tilted_estimate(atom, ThetaWindow::of(atom, 0.1), 64, cfg);

  char buf[140];
  std::snprintf(buf, sizeof(buf),
                "z = %.2f, stderr %.2e <= 2e-3; constant: mean %.17g stderr %.17g",
                z, est.std_error, exact.mean, exact.std_error);
  const bool pass = z <= 3.0 && est.std_error <= 2e-3 && exact.mean == 1.0 &&
                    exact.std_error == 0.0;
  return {pass, buf};
}

Spectrum c6_spectrum() {
  // random distinct spectrum in [-1, 1]
  return Spectrum::make(
      {-0.91, -0.63, -0.34, -0.12, 0.08, 0.37, 0.66, 0.88}, 2);
}

McEstimate c6_run(std::uint64_t threads) {
  McConfig cfg;
  cfg.samples = 1000000;
  cfg.seed = 11;
  par::set_max_threads(threads);
  const auto est = naive_log_i(c6_spectrum(), 0.1, 8, cfg);
  par::set_max_threads(0);
  return est;
}

std::pair<bool, std::string> c6_oracle_triangle() {
  const auto spec = c6_spectrum();
  const auto exact = hciz::rank_one_exact(
      0.1, hciz::DistinctSpectrum::make(spec.eigenvalues()), 8);
  const auto mc = c6_run(1);
  const double z = std::abs(mc.mean - exact.log_value / 8.0) / mc.std_error;
  const double approx = log_i_approx(spec, ThetaWindow::of(spec, 0.1), 8, 1);
  const double approx_gap = std::abs(approx - exact.log_value) / 8.0;
  char buf[100];
  std::snprintf(buf, sizeof(buf), "MC z = %.2f, |approx-exact|/N = %.2e", z,
                approx_gap);
  return {z <= 3.0 && approx_gap <= 0.002, buf};
}

std::pair<bool, std::string> c7_hciz_properties() {
  const auto a = hciz::DistinctSpectrum::make(
      {-0.85, -0.55, -0.25, -0.05, 0.15, 0.45, 0.65, 0.95});
  const auto b = hciz::DistinctSpectrum::make(
      {-0.9, -0.6, -0.4, -0.1, 0.2, 0.4, 0.7, 0.8});
  const auto ab = hciz::hciz_exact(a, b, 8);
  const auto ba = hciz::hciz_exact(b, a, 8);
  const double sym =
      std::abs(ab.log_value - ba.log_value) / std::max(1.0, std::abs(ab.log_value));

  double shift_res = 0, path_res = 0;
  for (std::size_t n : {6u, 12u}) {
    const auto spec = testutil::equispaced_spectrum(n);
    const auto base = hciz::DistinctSpectrum::make(spec.eigenvalues());
    std::vector<double> moved = spec.eigenvalues();
    for (auto& x : moved) x += 0.37;
    const double lhs =
        hciz::rank_one_exact(0.05, hciz::DistinctSpectrum::make(moved), n).log_value;
    const double rhs = hciz::rank_one_exact(0.05, base, n).log_value +
                       static_cast<double>(n) * 0.05 * 0.37;
    shift_res = std::max(shift_res, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));

    const double dd = hciz::rank_one_log_divided_difference(0.05, base, n);
    const double ep = hciz::rank_one_log_epsilon_limit(0.05, base, n);
    path_res = std::max(path_res, std::abs(dd - ep) / std::max(1.0, std::abs(dd)));
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "symmetry %.1e, shift %.1e, paths %.1e", sym,
                shift_res, path_res);
  return {sym <= 1e-10 && shift_res <= 1e-10 && path_res <= 1e-6, buf};
}

std::pair<bool, std::string> c8_schur() {
  SampleStream rng(31, 0);
  double worst_id = 0, worst_tab = 0;
  int cases = 0;
  for (std::size_t n : {2u, 3u, 4u}) {
    // all partitions of length n with parts <= 4
    std::vector<long> parts(n, 0);
    std::function<void(std::size_t, long)> enumerate = [&](std::size_t pos, long maxp) {
      if (pos == n) {
        const auto mu = hciz::Partition::make(parts);
        std::vector<double> avals(n), x(n);
        for (auto& v : avals) v = 0.8 * rng.uniform() - 0.4;
        const auto sides =
            hciz::schur_identity(hciz::DistinctSpectrum::make(avals), mu);
        worst_id = std::max(worst_id,
                            std::abs(sides.hciz_log - sides.schur_route_log) /
                                std::max(1.0, std::abs(sides.hciz_log)));
        for (auto& v : x) v = 0.25 + 1.75 * rng.uniform();
        const double brute = testutil::schur_brute_force(parts, x);
        double dim = 1.0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j)
            dim *= static_cast<double>(parts[i] - static_cast<long>(i) -
                                       parts[j] + static_cast<long>(j)) /
                   static_cast<double>(j - i);
        const double ratio = hciz::schur_ratio(mu, x).value;
        worst_tab = std::max(worst_tab, std::abs(ratio - brute / dim) /
                                            std::max(1.0, std::abs(ratio)));
        ++cases;
        return;
      }
      for (long p = 0; p <= maxp; ++p) {
        parts[pos] = p;
        enumerate(pos + 1, p);
      }
    };
    enumerate(0, 4);
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%d partitions: identity %.1e, tableau %.1e",
                cases, worst_id, worst_tab);
  return {worst_id <= 1e-8 && worst_tab <= 1e-10, buf};
}

fr::ExperimentReport c9_run(std::uint64_t threads) {
  const auto spec = Spectrum::make({-1.0, 1.0}).resampled(8);
  McConfig cfg;
  cfg.samples = 1000000;
  cfg.seed = 9;
  par::set_max_threads(threads);
  const auto rep = fr::additivity_check(fr::diag_matrix(spec),
                                        fr::diag_matrix(spec), 0.1, cfg);
  par::set_max_threads(0);
  return rep;
}

std::pair<bool, std::string> c9_additivity() {
  const auto rep = c9_run(1);
  const auto& row = rep.rows[0];
  char buf[100];
  std::snprintf(buf, sizeof(buf), "gap %.2e vs 3 stderr %.2e", row.gap,
                3.0 * row.std_error);
  return {std::abs(row.gap) <= 3.0 * row.std_error, buf};
}

fr::ExperimentReport c10_run(std::uint64_t threads) {
  const auto a = Spectrum::make({-1.0, 1.0});
  fr::WignerConfig wc{0, fr::EntryLaw::gaussian, 1};
  McConfig cfg;
  cfg.samples = 200000;
  cfg.seed = 2;
  par::set_max_threads(threads);
  const auto rep = fr::freeness_experiment(a, wc, 0.1, {32, 128, 512}, cfg);
  par::set_max_threads(0);
  return rep;
}

std::pair<bool, std::string> c10_freeness() {
  const auto rep = c10_run(1);
  bool trend = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (std::abs(rep.rows[i].gap) >
        std::abs(rep.rows[i - 1].gap) +
            2.0 * (rep.rows[i].std_error + rep.rows[i - 1].std_error))
      trend = false;
  const double final_gap = std::abs(rep.rows.back().gap);
  const double x512 = rep.rows.back().x_term;
  char buf[140];
  std::snprintf(buf, sizeof(buf),
                "gaps %.1e/%.1e/%.1e, final %.1e <= 0.01, x512 %.4f in 0.01+-0.003",
                rep.rows[0].gap, rep.rows[1].gap, rep.rows[2].gap, final_gap, x512);
  const bool pass = trend && final_gap <= 0.01 && std::abs(x512 - 0.01) <= 0.003;
  return {pass, buf};
}

std::pair<bool, std::string> c11_laplace() {
  const auto g = fr::laplace_bound_check(fr::EntryLaw::gaussian, 0.0, 101);
  const auto probe = fr::laplace_bound_check(fr::EntryLaw::rademacher, 0.0, 101);
  const auto r =
      fr::laplace_bound_check(fr::EntryLaw::rademacher, probe.c_min + 1e-12, 101);
  const auto r_fine =
      fr::laplace_bound_check(fr::EntryLaw::rademacher, probe.c_min + 1e-12, 1001);
  const bool stable = r.pass_lower == r_fine.pass_lower &&
                      r.pass_upper == r_fine.pass_upper;
  char buf[140];
  std::snprintf(buf, sizeof(buf),
                "gaussian c=0 %s; rademacher c_min %.5f passes %s; stable %s",
                g.pass_lower && g.pass_upper ? "ok" : "FAIL", probe.c_min,
                r.pass_lower && r.pass_upper ? "ok" : "FAIL",
                stable ? "ok" : "FAIL");
  const bool cmin_sane = std::abs(probe.c_min - 0.067) < 0.005;
  return {g.pass_lower && g.pass_upper && r.pass_lower && r.pass_upper &&
              stable && cmin_sane,
          buf};
}

std::pair<bool, std::string> c12_reproducibility() {
  const auto a5 = c5_run(1), b5 = c5_run(4);
  const auto a6 = c6_run(1), b6 = c6_run(4);
  const auto a9 = c9_run(1), b9 = c9_run(4);
  const auto a10 = c10_run(1), b10 = c10_run(4);
  const bool eq5 = a5.mean == b5.mean && a5.std_error == b5.std_error;
  const bool eq6 = a6.mean == b6.mean && a6.std_error == b6.std_error;
  const bool eq9 = a9.rows[0].gap == b9.rows[0].gap &&
                   a9.rows[0].std_error == b9.rows[0].std_error;
  bool eq10 = a10.rows.size() == b10.rows.size();
  for (std::size_t i = 0; eq10 && i < a10.rows.size(); ++i)
    eq10 = a10.rows[i].lhs == b10.rows[i].lhs &&
           a10.rows[i].rhs == b10.rows[i].rhs;
  char buf[100];
  std::snprintf(buf, sizeof(buf), "bitwise serial==parallel: c5 %d c6 %d c9 %d c10 %d",
                eq5, eq6, eq9, eq10);
  return {eq5 && eq6 && eq9 && eq10, buf};
}

}  // namespace

int main() {
  const Corpus corpus = make_corpus();
  criterion(1, "identity suite", [&] { return c1_identity_suite(corpus); });
  criterion(2, "appendix m1 identity", [&] { return c2_appendix(corpus); });
  criterion(3, "wick engine vs quadrature", [] { return c3_wick_vs_quadrature(); });
  criterion(4, "expansion N^-2 rate", [] { return c4_expansion_rate(); });
  criterion(5, "tilted MC vs m0 + m1/N", [] { return c5_tilted(); });
  criterion(6, "oracle triangle", [] { return c6_oracle_triangle(); });
  criterion(7, "hciz symmetry/shift/paths", [] { return c7_hciz_properties(); });
  criterion(8, "schur identity", [] { return c8_schur(); });
  criterion(9, "exact additivity", [] { return c9_additivity(); });
  criterion(10, "freeness experiment", [] { return c10_freeness(); });
  criterion(11, "laplace bounds", [] { return c11_laplace(); });
  criterion(12, "reproducibility", [] { return c12_reproducibility(); });

  if (g_failures == 0)
    std::printf("all 12 acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
