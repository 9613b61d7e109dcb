// CLI surface: config parsing/validation and the command runners. Kept as a
// library so the command logic is testable without spawning the binary.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpfc/curves.hpp"
#include "qpfc/forced_map.hpp"
#include "qpfc/frequency.hpp"

namespace qpfc::cli {

// Malformed configuration (unknown key, wrong type, missing field). The
// message carries the field path. Exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Exit codes fixed by the interface contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNoConvergence = 2;
inline constexpr int kExitPrecondition = 3;

struct RunConfig {
  std::string command;
  nlohmann::json resolved;  // config with defaults applied (embedded in outputs)

  std::optional<ForcedMap> map;
  std::optional<Frequency> alpha;

  double epsilon = 0.0;
  std::vector<double> eps_ladder;
  double c = 0.0;
  double c_lo = 0.0, c_hi = 0.0;
  int c_count = 0;
  int modes = 256;
  int jobs = 1;
  bool force_iteration = false;

  // Tolerances (defaults match the library).
  double tol_step = 1e-11;
  double tol_residual = 1e-9;
  double tol_root = 1e-10;
  double tol_c = 1e-12;

  // lyapunov / orbit / rational-check extras.
  std::int64_t n_max = 100000;
  double theta0 = 0.0;
  double r0 = 0.0;
  std::int64_t transient = 1000;
  std::int64_t keep = 10000;
  int theta_samples = 1024;
  int r_samples = 64;
  double r_min = -10.0;
  double r_max = 10.0;
  int samples = 512;          // Phi sampling per period
  int n_min_interval = 0;     // intervals I_N range (mode-lock)
  int n_max_interval = 0;
  double omega1_window = 10.0;

  std::filesystem::path out_dir = "qpfc-out";

  CurveOptions curve_options() const;
};

struct CliOverrides {
  std::optional<int> jobs;
  std::optional<int> modes;
  std::optional<std::string> out;
};

/// Parse + strictly validate a config for the given command. Throws
/// ConfigError with a field path on any problem.
RunConfig parse_config(const std::string& command, const nlohmann::json& body,
                       const CliOverrides& overrides);

RunConfig load_config_file(const std::string& command,
                           const std::filesystem::path& file,
                           const CliOverrides& overrides);

/// Directory this run writes into: out_dir/<command>-<config hash>.
std::filesystem::path run_directory(const RunConfig& config);

// One runner per subcommand; each returns the process exit code and writes
// CSV tables plus a JSON diagnostics file into run_directory(config).
int cmd_curve(const RunConfig& config);
int cmd_sweep(const RunConfig& config);
int cmd_find_invariant(const RunConfig& config);
int cmd_mode_lock(const RunConfig& config);
int cmd_lyapunov(const RunConfig& config);
int cmd_orbit(const RunConfig& config);
int cmd_continue(const RunConfig& config);
int cmd_rational_check(const RunConfig& config);

int run_command(const RunConfig& config);

}  // namespace qpfc::cli
