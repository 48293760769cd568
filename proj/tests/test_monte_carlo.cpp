#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "spherint/errors.hpp"
#include "spherint/expansion.hpp"
#include "spherint/hciz.hpp"
#include "spherint/monte_carlo.hpp"
#include "spherint/parallel.hpp"
#include "spherint/rng.hpp"

using namespace spherint;

TEST_CASE("philox known-answer vectors") {
  auto z = Philox4x32::encrypt({0, 0, 0, 0}, {0, 0});
  CHECK(z[0] == 0x6627e8d5u);
  CHECK(z[1] == 0xe169c58du);
  CHECK(z[2] == 0xbc57ac4cu);
  CHECK(z[3] == 0x9b00dbd8u);
  auto f = Philox4x32::encrypt({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                               {0xffffffffu, 0xffffffffu});
  CHECK(f[0] == 0x408f276du);
  CHECK(f[1] == 0x41c83b0eu);
  CHECK(f[2] == 0xa20bc7c6u);
  CHECK(f[3] == 0x6d5451fdu);
  auto p = Philox4x32::encrypt({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                               {0xa4093822u, 0x299f31d0u});
  CHECK(p[0] == 0xd16cfe09u);
  CHECK(p[1] == 0x94fdccebu);
  CHECK(p[2] == 0x5001e420u);
  CHECK(p[3] == 0x24126ea1u);
}

TEST_CASE("sample stream moments and determinism") {
  SampleStream a(123, 7);
  SampleStream b(123, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());

  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  SampleStream s(9, 0);
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    sum += x;
    sumsq += x * x;
  }
  CHECK(std::abs(sum / n) <= 0.01);
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("naive_log_i: exact cases and shape error") {
  auto atom = Spectrum::make({0.3, 0.3, 0.3, 0.3});
  McConfig cfg;
  cfg.samples = 1000;
  auto est = naive_log_i(atom, 0.2, 4, cfg);
  CHECK(est.mean == doctest::Approx(0.2 * 0.3).epsilon(1e-15));
  CHECK(est.std_error == 0.0);
  CHECK(est.log_domain);

  auto zero_theta = naive_log_i(atom, 0.0, 4, cfg);
  CHECK(zero_theta.mean == 0.0);
  CHECK(zero_theta.std_error == 0.0);

  CHECK_THROWS_AS(naive_log_i(atom, 0.1, 5, cfg), ShapeError);
  McConfig bad;
  bad.samples = 10;
  CHECK_THROWS_AS(naive_log_i(atom, 0.1, 4, bad), DomainError);
}

TEST_CASE("naive_log_i agrees with the exact determinant oracle") {
  auto spec = Spectrum::make({-1.0, 1.0}).resampled(8).with_beta(2);
  McConfig cfg;
  cfg.samples = 200000;
  cfg.seed = 7;
  auto est = naive_log_i(spec, 0.1, 8, cfg);
  // rank-one oracle needs simple spectra: split the atoms slightly
  std::vector<double> pts(8);
  for (int i = 0; i < 8; ++i) pts[i] = (i < 4 ? -1.0 : 1.0) + 1e-7 * i;
  auto exact = hciz::rank_one_exact(0.1, hciz::DistinctSpectrum::make(pts, 1e-9), 8);
  CHECK(std::abs(est.mean - exact.log_value / 8.0) <= 3.0 * est.std_error);
}

TEST_CASE("tilted_estimate: constant spectrum is exact with zero stderr") {
  auto atom = Spectrum::make({0.5}).resampled(16);
  auto w = ThetaWindow::of(atom, 0.1);
  McConfig cfg;
  cfg.samples = 2000;
  auto est = tilted_estimate(atom, w, 16, cfg);
  CHECK(est.mean == 1.0);
  CHECK(est.std_error == 0.0);
  CHECK(est.rejected == 0);

  auto w0 = ThetaWindow::of(atom, 0.0);
  auto est0 = tilted_estimate(atom, w0, 16, cfg);
  CHECK(est0.mean == 1.0);
  CHECK(est0.std_error == 0.0);
}

TEST_CASE("tilted_estimate converges to the expansion prefactor") {
  auto spec = Spectrum::make({-1.0, 1.0}).resampled(64);
  auto w = ThetaWindow::of(spec, 0.1);
  McConfig cfg;
  cfg.samples = 100000;
  cfg.seed = 21;
  auto est = tilted_estimate(spec, w, 64, cfg);
  auto res = coefficients(spec, w);
  CHECK(std::abs(est.mean - (res.m0 + res.m1 / 64.0)) <= 3.0 * est.std_error);
  CHECK(est.std_error <= 2e-3);
}

TEST_CASE("tilted/naive consistency through the closed-form exponent") {
  for (std::size_t n : {8u, 32u}) {
    auto spec = testutil::random_spectrum(n, 1000 + n);
    const double theta = 0.05;
    McConfig cfg;
    cfg.samples = 100000;
    cfg.seed = 5;
    auto naive = naive_log_i(spec, theta, n, cfg);
    McConfig cfg2 = cfg;
    cfg2.seed = 6;
    auto tilted = log_i_tilted(spec, theta, n, cfg2);
    const double se = std::hypot(naive.std_error, tilted.std_error);
    CHECK(std::abs(naive.mean - tilted.mean) <= 3.0 * se);
  }
}

TEST_CASE("variance reduction: tilted beats naive on the same quantity") {
  auto spec = testutil::random_spectrum(32, 77);
  auto w = ThetaWindow::of(spec, 0.05);
  McConfig cfg;
  cfg.samples = 50000;
  cfg.seed = 3;
  auto naive = naive_log_i(spec, 0.05, 32, cfg);
  auto tilted = tilted_estimate(spec, w, 32, cfg);
  // Compare relative errors of the integral estimate itself.
  const double naive_rel = naive.std_error * 32.0;
  const double tilted_rel = tilted.std_error / tilted.mean;
  CHECK(tilted_rel <= naive_rel);
}

TEST_CASE("reproducibility: serial and parallel runs are bit-identical") {
  auto spec = testutil::random_spectrum(16, 55);
  auto w = ThetaWindow::of(spec, 0.05);
  McConfig cfg;
  cfg.samples = 40000;
  cfg.seed = 11;
  cfg.batch = 1024;

  par::set_max_threads(1);
  auto serial_naive = naive_log_i(spec, 0.05, 16, cfg);
  auto serial_tilted = tilted_estimate(spec, w, 16, cfg);
  par::set_max_threads(4);
  auto par_naive = naive_log_i(spec, 0.05, 16, cfg);
  auto par_tilted = tilted_estimate(spec, w, 16, cfg);
  par::set_max_threads(0);

  CHECK(serial_naive.mean == par_naive.mean);
  CHECK(serial_naive.std_error == par_naive.std_error);
  CHECK(serial_tilted.mean == par_tilted.mean);
  CHECK(serial_tilted.std_error == par_tilted.std_error);
}

TEST_CASE("weights do not depend on the batch size") {
  auto spec = testutil::random_spectrum(8, 14);
  McConfig a;
  a.samples = 20000;
  a.seed = 4;
  a.batch = 512;
  McConfig b = a;
  b.batch = 7777;
  auto ea = naive_log_i(spec, 0.04, 8, a);
  auto eb = naive_log_i(spec, 0.04, 8, b);
  CHECK(ea.mean == doctest::Approx(eb.mean).epsilon(1e-12));
  CHECK(ea.std_error == doctest::Approx(eb.std_error).epsilon(1e-9));
}

TEST_CASE("batch partials are emitted and consistent") {
  auto spec = testutil::random_spectrum(8, 31);
  auto w = ThetaWindow::of(spec, 0.05);
  McConfig cfg;
  cfg.samples = 5000;
  cfg.batch = 1000;
  std::vector<BatchPartial> partials;
  auto est = tilted_estimate(spec, w, 8, cfg, &partials);
  CHECK(partials.size() == 5);
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& p : partials) {
    total += p.mean * static_cast<double>(p.n);
    n += p.n;
  }
  CHECK(n == 5000);
  CHECK(total / 5000.0 == doctest::Approx(est.mean).epsilon(1e-12));
}

TEST_CASE("jackknife stderr roughly matches the delta method") {
  auto spec = testutil::random_spectrum(16, 62);
  McConfig cfg;
  cfg.samples = 40000;
  cfg.batch = 1000;
  cfg.seed = 17;
  auto delta = naive_log_i(spec, 0.05, 16, cfg);
  McConfig jk = cfg;
  jk.jackknife = true;
  auto jack = naive_log_i(spec, 0.05, 16, jk);
  CHECK(jack.mean == delta.mean);
  CHECK(jack.std_error == doctest::Approx(delta.std_error).epsilon(0.25));
}

TEST_CASE("gamma_stats: constant-spectrum scaling and centered means") {
  auto atom = Spectrum::make({0.7}).resampled(32);
  auto w = ThetaWindow::of(atom, 0.05);
  McConfig cfg;
  cfg.samples = 20000;
  auto stats = gamma_stats(atom, w, 32, 0.45, 0.15, cfg);
  CHECK(stats.kappa_ok);
  // gamma_hat = lambda0 * gamma exactly for constant spectra
  CHECK(stats.gamma_hat.mean == doctest::Approx(0.7 * stats.gamma.mean).epsilon(1e-12));
  CHECK(stats.gamma_hat.stddev == doctest::Approx(0.7 * stats.gamma.stddev).epsilon(1e-12));

  auto spec = testutil::random_spectrum(64, 91);
  auto ws = ThetaWindow::of(spec, 0.05);
  auto gs = gamma_stats(spec, ws, 64, 0.45, 0.15, cfg);
  CHECK(std::abs(gs.gamma.mean) <= 3.0 * gs.gamma.std_error);
  CHECK(std::abs(gs.gamma_hat.mean) <= 3.0 * gs.gamma_hat.std_error);
  CHECK_FALSE(gamma_stats(spec, ws, 64, 0.3, 0.2, cfg).kappa_ok);
}

TEST_CASE("gamma_stats exceedance rates shrink with N") {
  auto base = testutil::random_spectrum(8, 101);
  McConfig cfg;
  cfg.samples = 20000;
  double rate256 = 0.0, rate1024 = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    cfg.seed = seed;
    auto s256 = base.resampled(256);
    auto s1024 = base.resampled(1024);
    rate256 += gamma_stats(s256, ThetaWindow::of(s256, 0.05), 256, 0.45, 0.15, cfg).exceed_k1;
    rate1024 += gamma_stats(s1024, ThetaWindow::of(s1024, 0.05), 1024, 0.45, 0.15, cfg).exceed_k1;
  }
  CHECK(rate1024 < rate256);
}
