#pragma once

#include <string>

#include "json.hpp"
#include "spherint/expansion.hpp"
#include "spherint/freeness.hpp"
#include "spherint/hciz.hpp"
#include "spherint/monte_carlo.hpp"
#include "spherint/spectrum.hpp"

namespace spherint::io {

/// Spectrum file: one eigenvalue per line, plain decimal text; optional
/// header line `# beta=<1|2>`. beta_override (1 or 2) wins over the header;
/// 0 means "use header or default 1".
Spectrum read_spectrum_file(const std::string& path, int beta_override = 0);

nlohmann::json to_json(const ExpansionResult& res);
nlohmann::json to_json(const McEstimate& est);
nlohmann::json to_json(const GammaStats& stats);
nlohmann::json to_json(const hciz::HcizResult& res);
nlohmann::json to_json(const hciz::SchurResult& res);
nlohmann::json to_json(const freeness::ExperimentReport& rep);
nlohmann::json to_json(const freeness::LaplaceBoundReport& rep);
nlohmann::json to_json(const freeness::SphereMaxReport& rep);
nlohmann::json to_json(const AppendixReport& rep);

std::string report_rows_csv(const freeness::ExperimentReport& rep);
std::string partials_csv(const std::vector<BatchPartial>& partials);

/// Deterministic decimal rendering (%.17g), used by all CSV writers.
std::string format_double(double v);

}  // namespace spherint::io
