#include <cmath>
#include <fstream>
#include <numbers>

#include "cli.hpp"
#include "qpfc/bifurcation.hpp"
#include "qpfc/dynamics.hpp"
#include "qpfc/errors.hpp"
#include "qpfc/io.hpp"

namespace qpfc::cli {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::filesystem::path prepare_dir(const RunConfig& config) {
  const std::filesystem::path dir = run_directory(config);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_json_file(const std::filesystem::path& path, const json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path.string());
  out << value.dump(2) << "\n";
}

json base_report(const RunConfig& config) {
  json j;
  j["command"] = config.command;
  j["config"] = config.resolved;
  j["alpha"] = {{"value", config.alpha->value()},
                {"delta", config.alpha->delta()},
                {"delta_rigorous", config.alpha->delta_rigorous()},
                {"description", config.alpha->describe()}};
  return j;
}

json curve_sidecar(const TranslatedCurve& curve) {
  return json{{"c", curve.c},
              {"epsilon", curve.epsilon},
              {"lambda", curve.lambda},
              {"residual_sup", curve.residual_sup},
              {"residual_constancy", curve.residual_constancy},
              {"d2_norm", curve.d2_norm},
              {"iterations", curve.iterations},
              {"converged", curve.converged},
              {"breakdown", curve.breakdown},
              {"tail_energy", curve.tail_energy},
              {"modes", curve.psi.order()},
              {"linde",
               {{"residual_sup", curve.linde_residual_sup},
                {"c_emp", curve.linde_c_emp},
                {"min_divisor", curve.linde_min_divisor},
                {"divisor_floor_hit", curve.divisor_floor_hit}}}};
}

void write_curve_tables(const std::filesystem::path& dir,
                        const std::string& stem, const TranslatedCurve& curve) {
  const int m = std::max(4 * curve.psi.order(), 512);
  write_periodic_samples(dir / (stem + ".csv"), curve.psi, m);
  write_periodic_coefficients(dir / (stem + "_coeffs.csv"), curve.psi);
}

// Uniform error envelope: record the failure in the diagnostics file and
// translate the exception into the documented exit code.
template <typename Fn>
int guarded(const RunConfig& config, const std::filesystem::path& dir,
            const std::string& json_name, Fn&& body) {
  json report = base_report(config);
  try {
    return body(report);
  } catch (const PreconditionError& err) {
    report["error"] = {{"kind", "precondition"}, {"message", err.what()}};
    write_json_file(dir / json_name, report);
    return kExitPrecondition;
  } catch (const SolverError& err) {
    report["error"] = {{"kind", "solver"}, {"message", err.what()}};
    write_json_file(dir / json_name, report);
    return kExitNoConvergence;
  }
}

}  // namespace

int cmd_curve(const RunConfig& config) {
  const auto dir = prepare_dir(config);
  return guarded(config, dir, "curve.json", [&](json& report) {
    const TranslatedCurve curve = translated_curve(
        *config.map, config.epsilon, *config.alpha, config.c,
        config.curve_options());
    report["curve"] = curve_sidecar(curve);
    report["nu_history"] = curve.nu_history;
    report["step_norms"] = curve.step_norms;
    write_curve_tables(dir, "psi", curve);
    write_json_file(dir / "curve.json", report);
    return curve.converged ? kExitOk : kExitNoConvergence;
  });
}

int cmd_sweep(const RunConfig& config) {
  const auto dir = prepare_dir(config);
  return guarded(config, dir, "sweep.json", [&](json& report) {
    std::vector<double> cs(config.c_count);
    for (int i = 0; i < config.c_count; ++i)
      cs[i] = config.c_lo +
              (config.c_hi - config.c_lo) * i / (config.c_count - 1);
    const SweepResult sweep =
        foliation_sweep(*config.map, config.epsilon, *config.alpha, cs,
                        config.curve_options(), config.jobs);
    json items = json::array();
    bool all_converged = true;
    char name[32];
    for (size_t i = 0; i < sweep.curves.size(); ++i) {
      std::snprintf(name, sizeof(name), "curve_%03zu", i);
      write_curve_tables(dir, name, sweep.curves[i]);
      items.push_back(curve_sidecar(sweep.curves[i]));
      all_converged = all_converged && sweep.curves[i].converged;
    }
    report["curves"] = std::move(items);
    report["k_emp"] = sweep.k_emp;
    write_json_file(dir / "sweep.json", report);
    return all_converged ? kExitOk : kExitNoConvergence;
  });
}

int cmd_find_invariant(const RunConfig& config) {
  const auto dir = prepare_dir(config);
  return guarded(config, dir, "report.json", [&](json& report) {
    BifurcationOptions opts;
    opts.curve = config.curve_options();
    opts.samples_per_period = config.samples;
    opts.tol_root = config.tol_root;
    opts.tol_c = config.tol_c;
    opts.jobs = config.jobs;
    const BifurcationReport result =
        find_invariant_curves(*config.map, config.epsilon, *config.alpha,
                              config.c_lo, config.c_hi, opts);
    std::vector<std::vector<double>> rows;
    rows.reserve(result.phi_samples.size());
    for (const auto& [c, value] : result.phi_samples) rows.push_back({c, value});
    write_csv(dir / "phi.csv", {"c", "phi"}, rows);
    json roots = json::array();
    for (const InvariantCurveRoot& r : result.roots) {
      roots.push_back({{"c_star", r.c_star},
                       {"phi_prime", r.phi_prime},
                       {"chi_plus", r.chi_plus},
                       {"classification", r.classification},
                       {"lambda", r.lambda},
                       {"residual_sup", r.residual_sup}});
    }
    report["roots"] = std::move(roots);
    write_json_file(dir / "report.json", report);
    return kExitOk;
  });
}

int cmd_mode_lock(const RunConfig& config) {
  const auto dir = prepare_dir(config);
  return guarded(config, dir, "modelock.json", [&](json& report) {
    BifurcationOptions opts;
    opts.curve = config.curve_options();
    opts.samples_per_period = config.samples;
    opts.tol_root = config.tol_root;
    opts.tol_c = config.tol_c;
    opts.jobs = config.jobs;
    const ModeLockResult ml =
        mode_lock_interval(*config.map, config.epsilon, *config.alpha, opts);
    std::vector<std::vector<double>> rows;
    for (const auto& [c, value] : ml.phi_samples) rows.push_back({c, value});
    write_csv(dir / "phi.csv", {"c", "phi"}, rows);
    report["interval"] = {{"omega_lo", ml.omega_lo},
                          {"omega_hi", ml.omega_hi},
                          {"c_at_max", ml.c_at_max},
                          {"c_at_min", ml.c_at_min},
                          {"midpoint_roots", ml.midpoint_roots}};
    if (config.n_min_interval != 0 || config.n_max_interval != 0) {
      const IntervalsINResult intervals = intervals_IN(
          *config.map, config.epsilon, *config.alpha, config.n_min_interval,
          config.n_max_interval, config.omega1_window, opts);
      json arr = json::array();
      for (const IntervalIN& iv : intervals.intervals) {
        arr.push_back({{"N", iv.n},
                       {"lo", iv.lo},
                       {"hi", iv.hi},
                       {"in_window", iv.in_window},
                       {"clipped_lo", iv.clipped_lo},
                       {"clipped_hi", iv.clipped_hi}});
      }
      report["intervals_IN"] = std::move(arr);
      report["intervals_overlap_warning"] = intervals.overlap_warning;
    }
    write_json_file(dir / "modelock.json", report);
    return kExitOk;
  });
}

int cmd_lyapunov(const RunConfig& config) {
  const auto dir = prepare_dir(config);
  return guarded(config, dir, "lyapunov.json", [&](json& report) {
    const TranslatedCurve curve =
        translated_curve(*config.map, config.epsilon, *config.alpha, config.c,
                         config.curve_options());
    if (!curve.converged) {
      report["curve"] = curve_sidecar(curve);
      write_json_file(dir / "lyapunov.json", report);
      return kExitNoConvergence;
    }
    const CocycleProduct cp = lyapunov(curve, *config.map, *config.alpha,
                                       config.n_max, config.theta0);
    std::vector<std::vector<double>> rows;
    for (const auto& [n, avg] : cp.log_products)
      rows.push_back({static_cast<double>(n), avg});
    write_csv(dir / "lyapunov.csv", {"n", "running_average"}, rows);
    report["curve"] = curve_sidecar(curve);
    report["chi_plus"] = cp.chi_plus_integral;
    report["rate_constant"] = cp.rate_constant;
    report["theta0"] = cp.theta0;
    write_json_file(dir / "lyapunov.json", report);
    return kExitOk;
  });
}

int cmd_orbit(const RunConfig& config) {
  const auto dir = prepare_dir(config);
  return guarded(config, dir, "orbit.json", [&](json& report) {
    const OrbitSample orbit =
        orbit_sample(*config.map, config.epsilon, *config.alpha,
                     {config.r0, config.theta0}, config.transient, config.keep);
    std::vector<std::vector<double>> rows;
    rows.reserve(orbit.points.size());
    for (size_t i = 0; i < orbit.points.size(); ++i) {
      rows.push_back({static_cast<double>(config.transient + 1 + i),
                      orbit.points[i].r, orbit.points[i].theta});
    }
    write_csv(dir / "orbit.csv", {"n", "r", "theta"}, rows);
    report["escaped"] = orbit.escaped;
    if (orbit.escaped) report["escape_step"] = orbit.escape_step;
    report["kept"] = orbit.points.size();
    write_json_file(dir / "orbit.json", report);
    return kExitOk;
  });
}

int cmd_continue(const RunConfig& config) {
  const auto dir = prepare_dir(config);
  return guarded(config, dir, "continuation.json", [&](json& report) {
    const ContinuationResult result = continuation_in_eps(
        *config.map, *config.alpha, config.c, config.eps_ladder,
        config.curve_options());
    std::vector<std::vector<double>> rows;
    json steps = json::array();
    for (const ContinuationStep& s : result.trace) {
      rows.push_back({s.eps, s.converged ? 1.0 : 0.0, s.d2_norm, s.lambda,
                      s.residual_sup, static_cast<double>(s.iterations)});
      steps.push_back({{"eps", s.eps},
                       {"converged", s.converged},
                       {"d2_norm", s.d2_norm},
                       {"lambda", s.lambda},
                       {"residual_sup", s.residual_sup},
                       {"iterations", s.iterations},
                       {"failure", s.failure}});
    }
    write_csv(dir / "continuation.csv",
              {"eps", "converged", "d2_norm", "lambda", "residual_sup",
               "iterations"},
              rows);
    report["trace"] = std::move(steps);
    report["broke_down"] = result.broke_down;
    if (result.broke_down) report["breakdown_eps"] = result.breakdown_eps;
    write_json_file(dir / "continuation.json", report);
    return kExitOk;  // breakdown is a recorded result, not a failure
  });
}

int cmd_rational_check(const RunConfig& config) {
  const auto dir = prepare_dir(config);
  return guarded(config, dir, "certificate.json", [&](json& report) {
    ObstructionOptions opts;
    opts.theta_samples = config.theta_samples;
    opts.r_samples = config.r_samples;
    opts.r_min = config.r_min;
    opts.r_max = config.r_max;
    const auto cert = rational_obstruction(*config.map, config.epsilon,
                                           *config.alpha, opts);
    report["certificate_found"] = cert.has_value();
    if (cert) {
      report["certificate"] = {{"theta_positive", cert->theta_positive},
                               {"theta_negative", cert->theta_negative},
                               {"margin_positive", cert->margin_positive},
                               {"margin_negative", cert->margin_negative},
                               {"q", config.alpha->denominator()}};
    }
    write_json_file(dir / "certificate.json", report);
    return kExitOk;  // the certificate (or its absence) is the result
  });
}

}  // namespace qpfc::cli
