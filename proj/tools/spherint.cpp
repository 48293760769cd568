// spherint: rank-one spherical (HCIZ) integrals, asymptotic expansions, and
// the cross-validation suite around them.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spherint/errors.hpp"
#include "spherint/expansion.hpp"
#include "spherint/freeness.hpp"
#include "spherint/hciz.hpp"
#include "spherint/io.hpp"
#include "spherint/monte_carlo.hpp"
#include "spherint/spectrum.hpp"

namespace {

using nlohmann::json;
using namespace spherint;

constexpr const char* kSchema = "spherint/1";

struct Options {
  std::string spectrum_path;
  std::string spectrum_b_path;
  std::string a_spectrum_path;
  double theta = 0.05;
  std::string theta_grid;
  std::size_t n = 0;
  int beta = 0;  // 0: use file header
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  int order = 1;
  std::string output = "json";
  std::string out_path;
  std::string mode = "naive";
  std::string law = "gaussian";
  std::string ns_list = "32,128,512";
  std::string mu_list;
  std::string x_list;
  double kappa1 = 0.45;
  double kappa2 = 0.15;
  double epsilon = 0.25;
  double laplace_c = -1.0;
  bool assume_admissible = false;
};

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + out_path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
  }
}

void emit_json(json j, const std::string& out_path) {
  j["schema"] = kSchema;
  emit(j.dump(2), out_path);
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

std::vector<long> parse_long_list(const std::string& s) {
  std::vector<long> out;
  for (double v : parse_double_list(s)) out.push_back(std::lround(v));
  return out;
}

std::vector<double> parse_theta_grid(const std::string& s) {
  // A:STEP:B, endpoints included.
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
  if (parts.size() != 3) throw ConfigError("theta grid must be A:STEP:B");
  const double a = parts[0], step = parts[1], b = parts[2];
  if (step <= 0.0 || b < a) throw ConfigError("theta grid: need STEP > 0, B >= A");
  std::vector<double> grid;
  for (double t = a; t <= b + 1e-12 * std::max(1.0, std::abs(b)); t += step)
    grid.push_back(std::abs(t) < 1e-15 ? 0.0 : t);
  return grid;
}

Spectrum load_spectrum(const Options& opt) {
  if (opt.spectrum_path.empty()) throw ConfigError("--spectrum is required");
  Spectrum spec = io::read_spectrum_file(opt.spectrum_path, opt.beta);
  if (opt.n != 0 && opt.n != spec.size()) spec = spec.resampled(opt.n);
  return spec;
}

// The admissibility window is advisory; --assume-admissible overrides the
// flag for callers prepared to trust positivity beyond the stated constant.
ThetaWindow window_for(const Spectrum& spec, double theta, const Options& opt) {
  ThetaWindow w = ThetaWindow::of(spec, theta);
  if (opt.assume_admissible) w.admissible = true;
  return w;
}

int cmd_expand(const Options& opt) {
  const Spectrum spec = load_spectrum(opt);
  const ThetaWindow window = window_for(spec, opt.theta, opt);
  const ExpansionResult res = coefficients(spec, window);
  json j = io::to_json(res);
  if (opt.n != 0) j["log_i_approx"] = log_i_approx(spec, window, opt.n, opt.order);
  emit_json(j, opt.out_path);
  return 0;
}

int cmd_sweep(const Options& opt) {
  if (opt.theta_grid.empty()) throw ConfigError("sweep needs --theta-grid A:STEP:B");
  const Spectrum spec = load_spectrum(opt);
  const std::vector<double> grid = parse_theta_grid(opt.theta_grid);
  if (opt.output == "csv") {
    std::ostringstream out;
    out << "theta,v,A2,m0,m1,J,admissible\n";
    for (double t : grid) {
      const ExpansionResult r = coefficients(spec, window_for(spec, t, opt));
      out << io::format_double(t) << ',' << io::format_double(r.v) << ','
          << io::format_double(r.A(2)) << ',' << io::format_double(r.m0) << ','
          << io::format_double(r.m1) << ',' << io::format_double(r.j) << ','
          << (r.admissible ? 1 : 0) << '\n';
    }
    emit(out.str(), opt.out_path);
  } else {
    json rows = json::array();
    for (double t : grid)
      rows.push_back(io::to_json(coefficients(spec, window_for(spec, t, opt))));
    emit_json(json{{"rows", rows}}, opt.out_path);
  }
  return 0;
}

int cmd_mc(const Options& opt) {
  const Spectrum spec = load_spectrum(opt);
  const std::size_t n = opt.n != 0 ? opt.n : spec.size();
  McConfig cfg;
  cfg.samples = opt.samples;
  cfg.seed = opt.seed;
  const ThetaWindow window = ThetaWindow::of(spec, opt.theta);

  if (opt.mode == "gamma") {
    const GammaStats stats =
        gamma_stats(spec, window, n, opt.kappa1, opt.kappa2, cfg);
    emit_json(io::to_json(stats), opt.out_path);
    return 0;
  }

  std::vector<BatchPartial> partials;
  std::vector<BatchPartial>* want =
      opt.output == "csv" ? &partials : nullptr;
  McEstimate est;
  if (opt.mode == "naive")
    est = naive_log_i(spec, opt.theta, n, cfg, want);
  else if (opt.mode == "tilted")
    est = tilted_estimate(spec, window, n, cfg, want);
  else if (opt.mode == "logi")
    est = log_i_tilted(spec, opt.theta, n, cfg);
  else
    throw ConfigError("mc mode must be naive, tilted, logi, or gamma");
  if (opt.output == "csv")
    emit(io::partials_csv(partials), opt.out_path);
  else
    emit_json(io::to_json(est), opt.out_path);
  return 0;
}

int cmd_hciz(const Options& opt) {
  const Spectrum spec = load_spectrum(opt);
  const std::size_t n = spec.size();
  const hciz::DistinctSpectrum b = hciz::DistinctSpectrum::make(spec.eigenvalues());
  hciz::HcizResult res;
  if (!opt.a_spectrum_path.empty()) {
    const Spectrum a_spec = io::read_spectrum_file(opt.a_spectrum_path);
    const hciz::DistinctSpectrum a =
        hciz::DistinctSpectrum::make(a_spec.eigenvalues());
    res = hciz::hciz_exact(a, b, n);
  } else {
    res = hciz::rank_one_exact(opt.theta, b, n);
  }
  emit_json(io::to_json(res), opt.out_path);
  return 0;
}

int cmd_schur(const Options& opt) {
  if (opt.mu_list.empty() || opt.x_list.empty())
    throw ConfigError("schur needs --mu and --x lists");
  const hciz::Partition mu = hciz::Partition::make(parse_long_list(opt.mu_list));
  const hciz::SchurResult res = hciz::schur_ratio(mu, parse_double_list(opt.x_list));
  emit_json(io::to_json(res), opt.out_path);
  return 0;
}

int cmd_freeness(const Options& opt) {
  const Spectrum a_spec = load_spectrum(opt);
  std::vector<std::size_t> ns;
  for (double v : parse_double_list(opt.ns_list))
    ns.push_back(static_cast<std::size_t>(v));
  freeness::WignerConfig wc;
  wc.law = freeness::parse_law(opt.law);
  wc.seed = opt.seed;
  McConfig cfg;
  cfg.samples = opt.samples;
  cfg.seed = opt.seed;
  const freeness::ExperimentReport rep =
      freeness::freeness_experiment(a_spec, wc, opt.theta, ns, cfg);
  if (opt.output == "csv")
    emit(io::report_rows_csv(rep), opt.out_path);
  else
    emit_json(io::to_json(rep), opt.out_path);
  return 0;
}

int cmd_additivity(const Options& opt) {
  const Spectrum b_spec = load_spectrum(opt);
  if (opt.spectrum_b_path.empty())
    throw ConfigError("additivity needs --spectrum-b");
  Spectrum bt_spec = io::read_spectrum_file(opt.spectrum_b_path, opt.beta);
  if (opt.n != 0 && bt_spec.size() != opt.n) bt_spec = bt_spec.resampled(opt.n);
  McConfig cfg;
  cfg.samples = opt.samples;
  cfg.seed = opt.seed;
  const auto mode = opt.mode == "conjugation"
                        ? freeness::AdditivityMode::conjugation
                        : freeness::AdditivityMode::collapsed;
  const freeness::ExperimentReport rep = freeness::additivity_check(
      freeness::diag_matrix(b_spec), freeness::diag_matrix(bt_spec), opt.theta,
      cfg, mode);
  if (opt.output == "csv")
    emit(io::report_rows_csv(rep), opt.out_path);
  else
    emit_json(io::to_json(rep), opt.out_path);
  return 0;
}

int cmd_verify(const Options& opt) {
  const Spectrum spec = load_spectrum(opt);
  const ThetaWindow window = window_for(spec, opt.theta, opt);
  json checks = json::array();
  bool pass = true;
  auto record = [&](const std::string& name, double residual, double tol) {
    const bool ok = residual <= tol;
    pass = pass && ok;
    checks.push_back({{"check", name},
                      {"residual", residual},
                      {"tolerance", tol},
                      {"pass", ok}});
  };

  const TiltPoint tilt = solve_v(spec, window);
  record("A1_fixed_point", tilt.residual_a1, 1e-12);
  record("mean_fixed_point", tilt.residual_mean, 1e-10);

  if (window.theta != 0.0) {
    const double a2 = a_coeff(spec, window, tilt, 2);
    const FgPair fg = f_g(spec, window, tilt);
    const double th = window.theta;
    const double f_id = -1.0 / (2.0 * th) + (1.0 + 2.0 * th * tilt.v) * a2 / (2.0 * th);
    const double g_id = -(1.0 + 4.0 * th * tilt.v) / (4.0 * th * th) +
                        (1.0 + 2.0 * th * tilt.v) * (1.0 + 2.0 * th * tilt.v) *
                            a2 / (4.0 * th * th);
    record("F_identity", std::abs(fg.f - f_id), 1e-10);
    record("G_identity", std::abs(fg.g - g_id), 1e-10);

    const ComplexQuadraticForm k = k_matrix(spec, window, th);
    record("det_K_equals_A2", std::abs(k.det() - cplx(a2, 0.0)), 1e-10);

    const double closed = r_integral(spec, window, tilt);
    const double quad = r_integral_quadrature(spec, th);
    record("r_integral_quadrature", std::abs(closed - quad), 1e-8);

    const AppendixReport app = appendix_check(spec, window);
    record("appendix_m1_identity", std::abs(app.diff), 1e-10);
    record("appendix_f0_wick", std::abs(app.f0_coeff_wick - app.f0_coeff), 1e-8);
    record("appendix_f1_wick", std::abs(app.f1_part_wick - app.f1_part), 1e-8);
    record("appendix_f2_wick", std::abs(app.f2_part_wick - app.f2_part), 1e-8);
  }

  emit_json(json{{"theta", window.theta},
                 {"admissible", window.admissible},
                 {"checks", checks},
                 {"pass", pass}},
            opt.out_path);
  return pass ? 0 : 1;
}

int cmd_laplace(const Options& opt) {
  const freeness::EntryLaw law = freeness::parse_law(opt.law);
  freeness::LaplaceBoundReport probe =
      freeness::laplace_bound_check(law, 0.0, 101);
  const double c = opt.laplace_c >= 0.0 ? opt.laplace_c : probe.c_min;
  const freeness::LaplaceBoundReport rep =
      freeness::laplace_bound_check(law, c, 101);
  emit_json(io::to_json(rep), opt.out_path);
  return 0;
}

int cmd_sphere(const Options& opt) {
  McConfig cfg;
  cfg.samples = opt.samples;
  cfg.seed = opt.seed;
  const std::size_t n = opt.n != 0 ? opt.n : 256;
  const freeness::SphereMaxReport rep =
      freeness::sphere_max_check(n, opt.epsilon, cfg);
  emit_json(io::to_json(rep), opt.out_path);
  return 0;
}

void add_common(CLI::App* cmd, Options& opt, bool with_spectrum = true) {
  if (with_spectrum)
    cmd->add_option("--spectrum", opt.spectrum_path, "spectrum file path");
  cmd->add_option("--theta", opt.theta, "tilt parameter theta");
  cmd->add_option("--n", opt.n, "matrix dimension N (resamples the spectrum)");
  cmd->add_option("--beta", opt.beta, "ensemble class (1 or 2)")
      ->check(CLI::IsMember({0, 1, 2}));
  cmd->add_option("--samples", opt.samples, "Monte Carlo sample count");
  cmd->add_option("--seed", opt.seed, "RNG seed");
  cmd->add_option("--order", opt.order, "expansion order (0 or 1)")
      ->check(CLI::IsMember({0, 1}));
  cmd->add_option("--output", opt.output, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", opt.out_path, "output file (default stdout)");
  cmd->add_flag("--assume-admissible", opt.assume_admissible,
                "treat theta as inside the validity window");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rank-one spherical integrals: expansions, exact oracles, "
               "Monte Carlo estimators, freeness experiments"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* expand = app.add_subcommand("expand", "expansion coefficients at theta");
  add_common(expand, opt);

  CLI::App* sweep = app.add_subcommand("sweep", "coefficient sweep over a theta grid");
  add_common(sweep, opt);
  sweep->add_option("--theta-grid", opt.theta_grid, "grid A:STEP:B (endpoints included)");

  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo estimators");
  add_common(mc, opt);
  mc->add_option("--mode", opt.mode, "naive | tilted | logi | gamma");
  mc->add_option("--kappa1", opt.kappa1, "gamma exceedance exponent kappa1");
  mc->add_option("--kappa2", opt.kappa2, "gamma exceedance exponent kappa2");

  CLI::App* hciz_cmd = app.add_subcommand("hciz", "exact beta=2 determinant oracles");
  add_common(hciz_cmd, opt);
  hciz_cmd->add_option("--a-spectrum", opt.a_spectrum_path,
                       "second spectrum for the two-matrix formula");

  CLI::App* schur = app.add_subcommand("schur", "normalized Schur polynomial ratio");
  add_common(schur, opt, false);
  schur->add_option("--mu", opt.mu_list, "partition, comma separated");
  schur->add_option("--x", opt.x_list, "evaluation point, comma separated");

  CLI::App* fre = app.add_subcommand("freeness", "Wigner additivity experiment");
  add_common(fre, opt);
  fre->add_option("--ns", opt.ns_list, "matrix sizes, comma separated");
  fre->add_option("--law", opt.law, "wigner entry law")
      ->check(CLI::IsMember({"gaussian", "rademacher", "uniform"}));

  CLI::App* add = app.add_subcommand("additivity", "exact finite-N additivity check");
  add_common(add, opt);
  add->add_option("--spectrum-b", opt.spectrum_b_path, "second spectrum file");
  add->add_option("--mode", opt.mode, "collapsed | conjugation");

  CLI::App* verify = app.add_subcommand("verify", "identity suite (exit 1 on failure)");
  add_common(verify, opt);

  CLI::App* lap = app.add_subcommand("laplace", "Laplace-transform bound check");
  add_common(lap, opt, false);
  lap->add_option("--law", opt.law, "entry law")
      ->check(CLI::IsMember({"gaussian", "rademacher", "uniform"}));
  lap->add_option("--c", opt.laplace_c, "bound constant (default: grid minimum)");

  CLI::App* sph = app.add_subcommand("sphere", "sphere max-coordinate concentration");
  add_common(sph, opt, false);
  sph->add_option("--epsilon", opt.epsilon, "exponent in (0, 1/2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(expand)) return cmd_expand(opt);
    if (app.got_subcommand(sweep)) return cmd_sweep(opt);
    if (app.got_subcommand(mc)) return cmd_mc(opt);
    if (app.got_subcommand(hciz_cmd)) return cmd_hciz(opt);
    if (app.got_subcommand(schur)) return cmd_schur(opt);
    if (app.got_subcommand(fre)) return cmd_freeness(opt);
    if (app.got_subcommand(add)) return cmd_additivity(opt);
    if (app.got_subcommand(verify)) return cmd_verify(opt);
    if (app.got_subcommand(lap)) return cmd_laplace(opt);
    if (app.got_subcommand(sph)) return cmd_sphere(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
