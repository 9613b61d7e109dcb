#include <fstream>
#include <set>

#include "cli.hpp"
#include "qpfc/errors.hpp"
#include "qpfc/io.hpp"

namespace qpfc::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config." + path + ": " + what);
}

double want_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

std::int64_t want_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

bool want_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

// Keys every command accepts.
const std::set<std::string> kCommonKeys = {
    "map", "alpha", "modes", "jobs", "out", "tolerances"};

std::set<std::string> command_keys(const std::string& command) {
  std::set<std::string> keys = kCommonKeys;
  auto add = [&keys](std::initializer_list<const char*> more) {
    for (const char* k : more) keys.insert(k);
  };
  if (command == "curve") add({"epsilon", "c", "force_iteration"});
  else if (command == "sweep") add({"epsilon", "c_range", "c_count"});
  else if (command == "find-invariant") add({"epsilon", "c_range", "samples"});
  else if (command == "mode-lock")
    add({"epsilon", "samples", "n_range", "omega1_window"});
  else if (command == "lyapunov") add({"epsilon", "c", "n_max", "theta0"});
  else if (command == "orbit")
    add({"epsilon", "r0", "theta0", "transient", "keep"});
  else if (command == "continue") add({"eps_ladder", "c"});
  else if (command == "rational-check")
    add({"epsilon", "theta_samples", "r_samples", "r_min", "r_max"});
  else throw ConfigError("unknown command '" + command + "'");
  return keys;
}

void check_epsilon(double eps) {
  if (eps < 0.0) fail("epsilon", "must be >= 0");
}

}  // namespace

CurveOptions RunConfig::curve_options() const {
  CurveOptions o;
  o.modes = modes;
  o.tol_step = tol_step;
  o.tol_residual = tol_residual;
  o.allow_rational_alpha = force_iteration;
  return o;
}

RunConfig parse_config(const std::string& command, const json& body,
                       const CliOverrides& overrides) {
  if (!body.is_object()) throw ConfigError("config: expected a JSON object");
  const std::set<std::string> allowed = command_keys(command);
  for (auto it = body.begin(); it != body.end(); ++it) {
    if (!allowed.count(it.key())) fail(it.key(), "unknown key");
  }

  RunConfig cfg;
  cfg.command = command;

  if (!body.contains("alpha")) fail("alpha", "required");
  try {
    cfg.alpha = frequency_from_config(body["alpha"]);
  } catch (const Error& err) {
    fail("alpha", err.what());
  }

  if (!body.contains("map")) fail("map", "required");
  try {
    cfg.map = map_from_config(body["map"], *cfg.alpha);
  } catch (const Error& err) {
    throw ConfigError(std::string("config.") + err.what());
  }

  if (body.contains("modes")) {
    const auto m = want_int(body["modes"], "modes");
    if (m < 4 || m > 1 << 16) fail("modes", "must lie in [4, 65536]");
    cfg.modes = static_cast<int>(m);
  }
  if (overrides.modes) cfg.modes = *overrides.modes;

  if (body.contains("jobs")) {
    const auto j = want_int(body["jobs"], "jobs");
    if (j < 1 || j > 1024) fail("jobs", "must lie in [1, 1024]");
    cfg.jobs = static_cast<int>(j);
  }
  if (overrides.jobs) cfg.jobs = *overrides.jobs;

  if (body.contains("out")) {
    if (!body["out"].is_string()) fail("out", "expected a string");
    cfg.out_dir = body["out"].get<std::string>();
  }
  if (overrides.out) cfg.out_dir = *overrides.out;

  if (body.contains("tolerances")) {
    const json& tol = body["tolerances"];
    if (!tol.is_object()) fail("tolerances", "expected an object");
    for (auto it = tol.begin(); it != tol.end(); ++it) {
      const std::string path = "tolerances." + it.key();
      const double v = want_number(*it, path);
      if (!(v > 0.0)) fail(path, "must be positive");
      if (it.key() == "step") cfg.tol_step = v;
      else if (it.key() == "residual") cfg.tol_residual = v;
      else if (it.key() == "root") cfg.tol_root = v;
      else if (it.key() == "c") cfg.tol_c = v;
      else fail(path, "unknown key");
    }
  }

  auto parse_c_range = [&](const char* key) {
    if (!body.contains(key)) fail(key, "required");
    const json& r = body[key];
    if (!r.is_array() || r.size() != 2) fail(key, "expected [lo, hi]");
    cfg.c_lo = want_number(r[0], std::string(key) + "[0]");
    cfg.c_hi = want_number(r[1], std::string(key) + "[1]");
    if (!(cfg.c_hi > cfg.c_lo)) fail(key, "hi must exceed lo");
  };

  if (command == "curve") {
    if (!body.contains("epsilon")) fail("epsilon", "required");
    cfg.epsilon = want_number(body["epsilon"], "epsilon");
    check_epsilon(cfg.epsilon);
    if (!body.contains("c")) fail("c", "required");
    cfg.c = want_number(body["c"], "c");
    if (body.contains("force_iteration"))
      cfg.force_iteration = want_bool(body["force_iteration"], "force_iteration");
  } else if (command == "sweep") {
    if (!body.contains("epsilon")) fail("epsilon", "required");
    cfg.epsilon = want_number(body["epsilon"], "epsilon");
    check_epsilon(cfg.epsilon);
    parse_c_range("c_range");
    if (!body.contains("c_count")) fail("c_count", "required");
    const auto n = want_int(body["c_count"], "c_count");
    if (n < 2 || n > 100000) fail("c_count", "must lie in [2, 100000]");
    cfg.c_count = static_cast<int>(n);
  } else if (command == "find-invariant") {
    if (!body.contains("epsilon")) fail("epsilon", "required");
    cfg.epsilon = want_number(body["epsilon"], "epsilon");
    check_epsilon(cfg.epsilon);
    parse_c_range("c_range");
    if (body.contains("samples")) {
      const auto s = want_int(body["samples"], "samples");
      if (s < 8 || s > 100000) fail("samples", "must lie in [8, 100000]");
      cfg.samples = static_cast<int>(s);
    }
  } else if (command == "mode-lock") {
    if (!body.contains("epsilon")) fail("epsilon", "required");
    cfg.epsilon = want_number(body["epsilon"], "epsilon");
    check_epsilon(cfg.epsilon);
    if (body.contains("samples")) {
      const auto s = want_int(body["samples"], "samples");
      if (s < 8 || s > 100000) fail("samples", "must lie in [8, 100000]");
      cfg.samples = static_cast<int>(s);
    }
    if (body.contains("n_range")) {
      const json& r = body["n_range"];
      if (!r.is_array() || r.size() != 2) fail("n_range", "expected [min, max]");
      cfg.n_min_interval = static_cast<int>(want_int(r[0], "n_range[0]"));
      cfg.n_max_interval = static_cast<int>(want_int(r[1], "n_range[1]"));
      if (cfg.n_min_interval > cfg.n_max_interval)
        fail("n_range", "min must not exceed max");
    }
    if (body.contains("omega1_window")) {
      cfg.omega1_window = want_number(body["omega1_window"], "omega1_window");
      if (!(cfg.omega1_window > 0)) fail("omega1_window", "must be positive");
    }
  } else if (command == "lyapunov") {
    if (!body.contains("epsilon")) fail("epsilon", "required");
    cfg.epsilon = want_number(body["epsilon"], "epsilon");
    check_epsilon(cfg.epsilon);
    if (!body.contains("c")) fail("c", "required");
    cfg.c = want_number(body["c"], "c");
    if (body.contains("n_max")) {
      cfg.n_max = want_int(body["n_max"], "n_max");
      if (cfg.n_max < 1 || cfg.n_max > 100000000) fail("n_max", "must lie in [1, 1e8]");
    }
    if (body.contains("theta0")) cfg.theta0 = want_number(body["theta0"], "theta0");
  } else if (command == "orbit") {
    if (!body.contains("epsilon")) fail("epsilon", "required");
    cfg.epsilon = want_number(body["epsilon"], "epsilon");
    check_epsilon(cfg.epsilon);
    if (body.contains("r0")) cfg.r0 = want_number(body["r0"], "r0");
    if (body.contains("theta0")) cfg.theta0 = want_number(body["theta0"], "theta0");
    if (body.contains("transient")) {
      cfg.transient = want_int(body["transient"], "transient");
      if (cfg.transient < 0) fail("transient", "must be >= 0");
    }
    if (body.contains("keep")) {
      cfg.keep = want_int(body["keep"], "keep");
      if (cfg.keep < 1 || cfg.keep > 100000000) fail("keep", "must lie in [1, 1e8]");
    }
  } else if (command == "continue") {
    if (!body.contains("eps_ladder")) fail("eps_ladder", "required");
    const json& ladder = body["eps_ladder"];
    if (!ladder.is_array() || ladder.size() < 1)
      fail("eps_ladder", "expected a non-empty array");
    double prev = 0.0;
    for (size_t i = 0; i < ladder.size(); ++i) {
      const double e =
          want_number(ladder[i], "eps_ladder[" + std::to_string(i) + "]");
      if (e <= prev) fail("eps_ladder", "must be strictly increasing and positive");
      cfg.eps_ladder.push_back(e);
      prev = e;
    }
    if (!body.contains("c")) fail("c", "required");
    cfg.c = want_number(body["c"], "c");
  } else if (command == "rational-check") {
    if (!body.contains("epsilon")) fail("epsilon", "required");
    cfg.epsilon = want_number(body["epsilon"], "epsilon");
    check_epsilon(cfg.epsilon);
    if (body.contains("theta_samples")) {
      const auto s = want_int(body["theta_samples"], "theta_samples");
      if (s < 4 || s > 1000000) fail("theta_samples", "must lie in [4, 1e6]");
      cfg.theta_samples = static_cast<int>(s);
    }
    if (body.contains("r_samples")) {
      const auto s = want_int(body["r_samples"], "r_samples");
      if (s < 2 || s > 100000) fail("r_samples", "must lie in [2, 1e5]");
      cfg.r_samples = static_cast<int>(s);
    }
    if (body.contains("r_min")) cfg.r_min = want_number(body["r_min"], "r_min");
    if (body.contains("r_max")) cfg.r_max = want_number(body["r_max"], "r_max");
    if (!(cfg.r_max > cfg.r_min)) fail("r_max", "must exceed r_min");
  }

  // Resolved config with defaults applied, embedded in every output.
  json resolved = body;
  resolved["modes"] = cfg.modes;
  resolved["jobs"] = cfg.jobs;
  resolved["out"] = cfg.out_dir.string();
  resolved["tolerances"] = {{"step", cfg.tol_step},
                            {"residual", cfg.tol_residual},
                            {"root", cfg.tol_root},
                            {"c", cfg.tol_c}};
  cfg.resolved = std::move(resolved);
  return cfg;
}

RunConfig load_config_file(const std::string& command,
                           const std::filesystem::path& file,
                           const CliOverrides& overrides) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file: " + file.string());
  json body;
  try {
    in >> body;
  } catch (const json::exception& err) {
    throw ConfigError(std::string("config: invalid JSON: ") + err.what());
  }
  return parse_config(command, body, overrides);
}

namespace {

// FNV-1a over the canonical dump; stable across runs and platforms.
std::string config_hash(const nlohmann::json& resolved,
                        const std::string& command) {
  const std::string text = command + "\n" + resolved.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf).substr(0, 12);
}

}  // namespace

std::filesystem::path run_directory(const RunConfig& config) {
  return config.out_dir /
         (config.command + "-" + config_hash(config.resolved, config.command));
}

int run_command(const RunConfig& config) {
  if (config.command == "curve") return cmd_curve(config);
  if (config.command == "sweep") return cmd_sweep(config);
  if (config.command == "find-invariant") return cmd_find_invariant(config);
  if (config.command == "mode-lock") return cmd_mode_lock(config);
  if (config.command == "lyapunov") return cmd_lyapunov(config);
  if (config.command == "orbit") return cmd_orbit(config);
  if (config.command == "continue") return cmd_continue(config);
  if (config.command == "rational-check") return cmd_rational_check(config);
  throw ConfigError("unknown command '" + config.command + "'");
}

}  // namespace qpfc::cli
