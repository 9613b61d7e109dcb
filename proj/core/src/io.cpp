#include "qpfc/io.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>

#include "qpfc/errors.hpp"

namespace qpfc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // '\n' line endings everywhere
  if (!out) throw Error("cannot open output file: " + path.string());
  return out;
}

}  // namespace

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_out(path);
  for (size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

void write_periodic_coefficients(const std::filesystem::path& path,
                                 const PeriodicFunction& f) {
  std::vector<std::vector<double>> rows;
  rows.reserve(2 * f.order() + 1);
  for (int n = -f.order(); n <= f.order(); ++n)
    rows.push_back({static_cast<double>(n), f.coeff(n).real(), f.coeff(n).imag()});
  write_csv(path, {"n", "re", "im"}, rows);
}

void write_periodic_samples(const std::filesystem::path& path,
                            const PeriodicFunction& f, int m) {
  const std::vector<double> values = f.sample(m);
  std::vector<std::vector<double>> rows;
  rows.reserve(m);
  for (int j = 0; j < m; ++j)
    rows.push_back({kTwoPi * j / m, values[j]});
  write_csv(path, {"theta", "f"}, rows);
}

Frequency frequency_from_config(const nlohmann::json& value) {
  if (value.is_number()) return Frequency::from_double(value.get<double>());
  if (value.is_string()) return Frequency::parse(value.get<std::string>());
  throw PreconditionError("alpha: expected a number or a string");
}

PeriodicFunction trig_from_config(const nlohmann::json& spec) {
  if (!spec.is_object())
    throw PreconditionError("trig function: expected {\"cos\": [...], \"sin\": [...]}");
  std::vector<double> cosv, sinv;
  for (auto it = spec.begin(); it != spec.end(); ++it) {
    if (it.key() == "cos") cosv = it->get<std::vector<double>>();
    else if (it.key() == "sin") sinv = it->get<std::vector<double>>();
    else throw PreconditionError("trig function: unknown key '" + it.key() + "'");
  }
  const int order = static_cast<int>(std::max(cosv.size(), sinv.size())) - 1;
  const int n = std::max(order, 0);
  std::vector<std::complex<double>> coeffs(2 * n + 1, 0.0);
  for (size_t k = 0; k < cosv.size(); ++k) {
    if (k == 0) coeffs[n] += cosv[0];
    else {
      coeffs[n + k] += 0.5 * cosv[k];
      coeffs[n - k] += 0.5 * cosv[k];
    }
  }
  for (size_t k = 1; k < sinv.size(); ++k) {
    coeffs[n + k] += std::complex<double>(0.0, -0.5 * sinv[k]);
    coeffs[n - k] += std::complex<double>(0.0, 0.5 * sinv[k]);
  }
  return PeriodicFunction::from_coefficients(std::move(coeffs));
}

namespace {

double require_number(const nlohmann::json& spec, const std::string& key) {
  if (!spec.contains(key) || !spec[key].is_number())
    throw PreconditionError("map." + key + ": expected a number");
  return spec[key].get<double>();
}

void reject_unknown(const nlohmann::json& spec,
                    const std::vector<std::string>& allowed) {
  for (auto it = spec.begin(); it != spec.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw PreconditionError("map." + it.key() + ": unknown key");
  }
}

}  // namespace

ForcedMap map_from_config(const nlohmann::json& spec, const Frequency& alpha) {
  if (!spec.is_object() || !spec.contains("type") || !spec["type"].is_string())
    throw PreconditionError("map.type: expected a string");
  const std::string type = spec["type"].get<std::string>();
  if (type == "arnold") {
    reject_unknown(spec, {"type", "omega", "k", "b"});
    return builtin_arnold(require_number(spec, "omega"),
                          require_number(spec, "k"), require_number(spec, "b"));
  }
  if (type == "arnold_scaled") {
    reject_unknown(spec, {"type", "omega0", "omega1", "b"});
    return builtin_arnold_scaled(require_number(spec, "omega0"),
                                 require_number(spec, "omega1"),
                                 require_number(spec, "b"));
  }
  if (type == "transformed") {
    reject_unknown(spec, {"type", "omega1", "b0", "b1"});
    return builtin_transformed_arnold(require_number(spec, "omega1"),
                                      require_number(spec, "b0"),
                                      require_number(spec, "b1"), alpha);
  }
  if (type == "linear") {
    reject_unknown(spec, {"type", "g"});
    if (!spec.contains("g"))
      throw PreconditionError("map.g: required for the linear map");
    return builtin_linear_test(trig_from_config(spec["g"]));
  }
  if (type == "rationalq") {
    reject_unknown(spec, {"type", "q"});
    const double q = require_number(spec, "q");
    if (q < 1 || q != std::floor(q))
      throw PreconditionError("map.q: expected a positive integer");
    return builtin_rational_counterexample(static_cast<int>(q));
  }
  if (type == "expr") {
    reject_unknown(spec, {"type", "expr", "periodic_in_r"});
    if (!spec.contains("expr") || !spec["expr"].is_string())
      throw PreconditionError("map.expr: expected a string");
    bool periodic = false;
    if (spec.contains("periodic_in_r")) {
      if (!spec["periodic_in_r"].is_boolean())
        throw PreconditionError("map.periodic_in_r: expected a boolean");
      periodic = spec["periodic_in_r"].get<bool>();
    }
    return map_from_expression(spec["expr"].get<std::string>(), periodic);
  }
  throw PreconditionError("map.type: unknown type '" + type + "'");
}

}  // namespace qpfc
