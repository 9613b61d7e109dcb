// qpfc: translated and invariant curves of quasiperiodically forced
// cylinder maps. Subcommands mirror the library operations; all output is
// CSV tables plus a JSON diagnostics file per run.
#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

#include "cli.hpp"
#include "qpfc/errors.hpp"

namespace {

struct CommonArgs {
  std::string config_file;
  qpfc::cli::CliOverrides overrides;
};

void attach_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_file, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  auto* jobs = cmd->add_option("--jobs", "Worker pool size")->check(CLI::Range(1, 1024));
  auto* modes = cmd->add_option("--modes", "Fourier truncation override")
                    ->check(CLI::Range(4, 65536));
  auto* out = cmd->add_option("--out", "Output directory");
  cmd->callback([&args, jobs, modes, out]() {
    if (jobs->count()) args.overrides.jobs = jobs->as<int>();
    if (modes->count()) args.overrides.modes = modes->as<int>();
    if (out->count()) args.overrides.out = out->as<std::string>();
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Spectral computation of translated and invariant curves for "
      "quasiperiodically forced cylinder maps"};
  app.require_subcommand(1);

  const std::vector<std::string> commands = {
      "curve",        "sweep",   "find-invariant", "mode-lock",
      "lyapunov",     "orbit",   "continue",       "rational-check"};
  const std::vector<std::string> descriptions = {
      "Translated curve at one mean level c",
      "Foliation sweep over a c range (ordering + Lipschitz check)",
      "Zeros of the bifurcation function Phi with stability classification",
      "Mode-locking interval [omega_*, omega^*] (optionally intervals I_N)",
      "Lyapunov exponent of the invariant curve at c",
      "Plain orbit sampler (transient discarded)",
      "Continuation in eps with breakdown monitoring",
      "Rational-alpha obstruction certificate"};

  std::vector<CommonArgs> args(commands.size());
  for (size_t i = 0; i < commands.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(commands[i], descriptions[i]);
    attach_common(cmd, args[i]);
  }

  CLI11_PARSE(app, argc, argv);

  std::string chosen;
  const CommonArgs* chosen_args = nullptr;
  for (size_t i = 0; i < commands.size(); ++i) {
    if (app.got_subcommand(commands[i])) {
      chosen = commands[i];
      chosen_args = &args[i];
    }
  }

  try {
    const qpfc::cli::RunConfig config = qpfc::cli::load_config_file(
        chosen, chosen_args->config_file, chosen_args->overrides);
    const int code = qpfc::cli::run_command(config);
    std::cout << "wrote " << qpfc::cli::run_directory(config).string() << "\n";
    return code;
  } catch (const qpfc::cli::ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return qpfc::cli::kExitConfig;
  } catch (const qpfc::PreconditionError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return qpfc::cli::kExitPrecondition;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return qpfc::cli::kExitNoConvergence;
  }
}
