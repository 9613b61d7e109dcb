// Table emission (CSV, 17 significant digits for lossless double round
// trips) and construction of maps and frequencies from JSON configs.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpfc/forced_map.hpp"
#include "qpfc/frequency.hpp"
#include "qpfc/periodic.hpp"

namespace qpfc {

/// %.17g with the C locale: round-trips any double exactly.
std::string format_double(double x);

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// "n, Re u_n, Im u_n" table.
void write_periodic_coefficients(const std::filesystem::path& path,
                                 const PeriodicFunction& f);

/// "theta, f(theta)" table on a uniform grid of m points.
void write_periodic_samples(const std::filesystem::path& path,
                            const PeriodicFunction& f, int m);

/// Frequency from a JSON value: "golden", "sqrt2m1", "p/q", or a number.
Frequency frequency_from_config(const nlohmann::json& value);

/// Map from {"type": "arnold"|"arnold_scaled"|"transformed"|"linear"|
/// "rationalq"|"expr", ...}. The transformed map needs alpha for its G0.
ForcedMap map_from_config(const nlohmann::json& spec, const Frequency& alpha);

/// Trigonometric polynomial from {"cos": [...], "sin": [...]} tables where
/// index k scales cos(k theta) / sin(k theta) (sin[0] is ignored).
PeriodicFunction trig_from_config(const nlohmann::json& spec);

}  // namespace qpfc
