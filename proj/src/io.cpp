#include "spherint/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "spherint/errors.hpp"

namespace spherint::io {

Spectrum read_spectrum_file(const std::string& path, int beta_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spectrum file: " + path);
  std::vector<double> values;
  int beta = 1;
  std::string line;
  while (std::getline(in, line)) {
    // Trim whitespace.
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line[0] == '#') {
      if (line.rfind("# beta=", 0) == 0 || line.rfind("#beta=", 0) == 0) {
        const auto eq = line.find('=');
        const std::string val = line.substr(eq + 1);
        if (val == "1")
          beta = 1;
        else if (val == "2")
          beta = 2;
        else
          throw ConfigError("spectrum header: beta must be 1 or 2");
      }
      continue;
    }
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(line, &pos);
    } catch (const std::exception&) {
      throw ConfigError("spectrum file: cannot parse line '" + line + "'");
    }
    if (pos != line.size())
      throw ConfigError("spectrum file: trailing characters on line '" + line + "'");
    values.push_back(v);
  }
  if (beta_override != 0) beta = beta_override;
  return Spectrum::make(std::move(values), beta);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json to_json(const ExpansionResult& res) {
  return {{"beta", res.beta},  {"theta", res.theta}, {"v", res.v},
          {"A2", res.A(2)},    {"A3", res.A(3)},     {"A4", res.A(4)},
          {"F", res.f},        {"G", res.g},         {"m0", res.m0},
          {"m1", res.m1},      {"J", res.j},         {"admissible", res.admissible}};
}

nlohmann::json to_json(const McEstimate& est) {
  return {{"mean", est.mean},       {"stderr", est.std_error},
          {"n", est.n},             {"log_domain", est.log_domain},
          {"seed", est.seed},       {"rejected", est.rejected}};
}

nlohmann::json to_json(const GammaStats& stats) {
  auto summary = [](const SummaryStats& s) {
    return nlohmann::json{{"mean", s.mean},
                          {"stddev", s.stddev},
                          {"stderr", s.std_error},
                          {"n", s.n}};
  };
  return {{"gamma", summary(stats.gamma)},
          {"gamma_hat", summary(stats.gamma_hat)},
          {"exceed_k1", stats.exceed_k1},
          {"exceed_k2", stats.exceed_k2},
          {"kappa1", stats.kappa1},
          {"kappa2", stats.kappa2},
          {"kappa_ok", stats.kappa_ok},
          {"seed", stats.seed}};
}

nlohmann::json to_json(const hciz::HcizResult& res) {
  nlohmann::json j{{"log_value", res.log_value},
                   {"N", res.n},
                   {"method", res.method},
                   {"precision_used", res.precision_bits}};
  if (std::isfinite(res.value))
    j["value_if_representable"] = res.value;
  else
    j["value_if_representable"] = nullptr;
  return j;
}

nlohmann::json to_json(const hciz::SchurResult& res) {
  return {{"value", res.value}, {"perturbed", res.perturbed}};
}

nlohmann::json to_json(const freeness::ExperimentReport& rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"N", r.n},
                    {"lhs", r.lhs},
                    {"rhs", r.rhs},
                    {"gap", r.gap},
                    {"stderr", r.std_error},
                    {"x_term", r.x_term}});
  return {{"theta", rep.theta},
          {"rows", rows},
          {"verdict", rep.verdict},
          {"notes", rep.notes}};
}

nlohmann::json to_json(const freeness::LaplaceBoundReport& rep) {
  return {{"law", freeness::law_name(rep.law)},
          {"supplied_c", rep.supplied_c},
          {"c_min", rep.c_min},
          {"pass_lower", rep.pass_lower},
          {"pass_upper", rep.pass_upper},
          {"grid_points", rep.grid_points}};
}

nlohmann::json to_json(const freeness::SphereMaxReport& rep) {
  return {{"N", rep.n},
          {"epsilon", rep.epsilon},
          {"threshold", rep.threshold},
          {"rate", rep.rate},
          {"fitted_c", rep.fitted_c},
          {"bound", rep.bound},
          {"verdict", rep.verdict}};
}

nlohmann::json to_json(const AppendixReport& rep) {
  return {{"f0_coeff", rep.f0_coeff},
          {"f1_part", rep.f1_part},
          {"f2_part", rep.f2_part},
          {"combined", rep.combined},
          {"combined_central", rep.combined_central},
          {"m1", rep.m1},
          {"diff", rep.diff},
          {"f0_coeff_wick", rep.f0_coeff_wick},
          {"f1_part_wick", rep.f1_part_wick},
          {"f2_part_wick", rep.f2_part_wick}};
}

std::string report_rows_csv(const freeness::ExperimentReport& rep) {
  std::ostringstream out;
  out << "N,lhs,rhs,gap,stderr\n";
  for (const auto& r : rep.rows)
    out << r.n << ',' << format_double(r.lhs) << ',' << format_double(r.rhs)
        << ',' << format_double(r.gap) << ',' << format_double(r.std_error)
        << '\n';
  return out.str();
}

std::string partials_csv(const std::vector<BatchPartial>& partials) {
  std::ostringstream out;
  out << "batch,mean,m2_accumulator,n\n";
  for (const auto& p : partials)
    out << p.batch << ',' << format_double(p.mean) << ','
        << format_double(p.m2) << ',' << p.n << '\n';
  return out.str();
}

}  // namespace spherint::io
