#include "qpfc/curves.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

#include "qpfc/errors.hpp"

namespace qpfc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kBoxLow = 0.5;
constexpr double kBoxHigh = 1.5;
constexpr double kBoxSlack = 1e-12;
constexpr double kTailBudget = 1e-24;

// Functional-equation residual of a candidate psi on a grid twice as fine as
// the build grid: res(theta) = psi(theta+2 pi alpha) - psi(theta)
//                              - drift - eps F(psi(theta), theta; eps).
struct ResidualScan {
  double lambda = 0.0;
  double constancy = 0.0;  // max - min
  double sup = 0.0;        // sup |res - lambda|
};

ResidualScan scan_residual(const PeriodicFunction& psi, const ForcedMap& map,
                           double eps, const Frequency& alpha,
                           int grid_factor) {
  const int m = 2 * std::max(grid_factor * std::max(psi.order(), 1),
                             2 * psi.order() + 1);
  const std::vector<double> shifted = psi.shifted(alpha).sample(m);
  const std::vector<double> values = psi.sample(m);
  double sum = 0.0, lo = 0.0, hi = 0.0;
  std::vector<double> res(m);
  for (int j = 0; j < m; ++j) {
    const double theta = kTwoPi * j / m;
    res[j] = shifted[j] - values[j] - map.drift() -
             eps * map.eval(values[j], theta, eps);
    sum += res[j];
    if (j == 0) {
      lo = hi = res[j];
    } else {
      lo = std::min(lo, res[j]);
      hi = std::max(hi, res[j]);
    }
  }
  ResidualScan out;
  out.lambda = sum / m;
  out.constancy = hi - lo;
  for (int j = 0; j < m; ++j)
    out.sup = std::max(out.sup, std::abs(res[j] - out.lambda));
  return out;
}

TranslatedCurve solve_at_order(const ForcedMap& map, double eps,
                               const Frequency& alpha, double c, int order,
                               const CurveOptions& opts) {
  TranslatedCurve curve;
  curve.c = c;
  curve.epsilon = eps;

  PeriodicFunction psi = PeriodicFunction::constant(c, order);
  if (opts.initial_guess) {
    psi = opts.initial_guess->truncated(order);
    psi += c - psi.mean();  // recenter the warm start to the requested mean
  }
  PeriodicFunction dpsi_prev = psi.derivative();

  LinDEOptions lin_opts;
  lin_opts.grid_factor = opts.grid_factor;
  lin_opts.allow_rational = opts.allow_rational_alpha;

  bool contracted = false;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    const PeriodicFunction fr =
        compose_map_partial(map, Partial::Fr, psi, eps, opts.grid_factor);
    const PeriodicFunction ftheta =
        compose_map_partial(map, Partial::Ftheta, psi, eps, opts.grid_factor);
    const PeriodicFunction a = eps * fr + 1.0;

    // Theorem-level contraction box for a = 1 + eps F_r.
    const std::vector<double> av =
        a.sample(std::max(opts.grid_factor * order, 2 * order + 1));
    const auto [amin, amax] = std::minmax_element(av.begin(), av.end());
    if (*amin < kBoxLow - kBoxSlack || *amax > kBoxHigh + kBoxSlack)
      throw EpsilonTooLargeError(
          "translated_curve: 1 + eps*F_r left [1/2, 3/2] (min " +
          std::to_string(*amin) + ", max " + std::to_string(*amax) +
          "); reduce eps");

    const LinDESolution sol = solve_linde(a, eps * ftheta, alpha, lin_opts);
    // Iterate in the fixed order-N space; the outer adaptive loop owns
    // resolution increases.
    const PeriodicFunction dpsi = sol.phi.truncated(order);
    psi = dpsi.zero_mean_primitive() + c;
    curve.nu_history.push_back(sol.nu);
    curve.linde_residual_sup = sol.residual_sup;
    curve.linde_c_emp = sol.c_emp;
    curve.linde_min_divisor = sol.min_divisor;
    curve.divisor_floor_hit = sol.divisor_floor_hit;

    const double step = (dpsi - dpsi_prev).sobolev_norm(0);
    curve.step_norms.push_back(step);
    curve.iterations = iter;
    dpsi_prev = dpsi;
    if (step < opts.tol_step * (1.0 + dpsi_prev.sobolev_norm(0))) {
      contracted = true;
      break;
    }
  }

  const ResidualScan res = scan_residual(psi, map, eps, alpha, opts.grid_factor);
  curve.psi = psi;
  curve.lambda = res.lambda;
  curve.residual_sup = res.sup;
  curve.residual_constancy = res.constancy;
  curve.d2_norm = psi.sobolev_norm(2);
  curve.tail_energy = psi.tail_energy_fraction();
  curve.contracted = contracted;
  curve.converged = contracted && res.constancy <= opts.tol_residual;
  if (curve.converged && curve.d2_norm > opts.d2_ceiling) {
    curve.converged = false;
    curve.breakdown = true;
  }
  return curve;
}

}  // namespace

TranslatedCurve translated_curve(const ForcedMap& map, double eps,
                                 const Frequency& alpha, double c,
                                 const CurveOptions& opts) {
  if (eps < 0.0) throw PreconditionError("translated_curve: eps must be >= 0");
  if (alpha.is_rational() && !opts.allow_rational_alpha)
    throw PreconditionError(
        "translated_curve: rational frequency; use the obstruction detector "
        "(rational-check) or force the iteration explicitly");

  int order = std::max(opts.modes, 4);
  CurveOptions local = opts;
  while (true) {
    TranslatedCurve curve = solve_at_order(map, eps, alpha, c, order, local);
    // Refine when the iteration contracted but the truncation is too short
    // for the curve: fat spectral tail, or a residual certificate that fails
    // for lack of modes. Divergence and d2 breakdown are not resolution
    // problems and are returned as they are.
    const bool under_resolved =
        curve.contracted && !curve.breakdown &&
        (curve.tail_energy > kTailBudget || !curve.converged);
    if (!opts.adaptive || !under_resolved || 2 * order > opts.max_modes)
      return curve;
    local.initial_guess = curve.psi;
    order *= 2;
  }
}

CurveDerivative dpsi_dc(const TranslatedCurve& curve, const ForcedMap& map,
                        const Frequency& alpha, const CurveOptions& opts) {
  if (!curve.converged)
    throw PreconditionError("dpsi_dc: curve did not converge");
  const PeriodicFunction fr = compose_map_partial(
      map, Partial::Fr, curve.psi, curve.epsilon, opts.grid_factor);
  const PeriodicFunction scaled = curve.epsilon * fr;
  const PeriodicFunction a = scaled + 1.0;
  LinDEOptions lin_opts;
  lin_opts.grid_factor = opts.grid_factor;
  const LinDESolution sol = solve_linde(a, scaled, alpha, lin_opts);
  CurveDerivative out;
  out.delta = sol.phi + 1.0;
  out.d1_norm = sol.phi.sobolev_norm(1);
  out.nu = sol.nu;
  return out;
}

SweepResult foliation_sweep(const ForcedMap& map, double eps,
                            const Frequency& alpha,
                            const std::vector<double>& c_values,
                            const CurveOptions& opts, int jobs) {
  SweepResult out;
  if (c_values.empty()) return out;
  out.curves.resize(c_values.size());

  // Anchor solve; every other level warm starts from it after recentring, so
  // the result is independent of the worker count.
  out.curves[0] = translated_curve(map, eps, alpha, c_values[0], opts);
  CurveOptions warm = opts;
  warm.initial_guess = out.curves[0].psi;

  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run_range = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      try {
        out.curves[i] = translated_curve(map, eps, alpha, c_values[i], warm);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const size_t rest = c_values.size() - 1;
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(rest)));
  if (workers <= 1 || rest == 0) {
    run_range(1, c_values.size());
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (rest + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const size_t begin = 1 + w * chunk;
      const size_t end = std::min(begin + chunk, c_values.size());
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Strict ordering in c on the sample grid (adjacent pairs suffice).
  std::vector<size_t> idx(c_values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return c_values[a] < c_values[b]; });
  int max_order = 1;
  for (const TranslatedCurve& curve : out.curves)
    max_order = std::max(max_order, curve.psi.order());
  const int m = std::max(opts.grid_factor * max_order, 64);
  for (size_t k = 0; k + 1 < idx.size(); ++k) {
    const TranslatedCurve& lo = out.curves[idx[k]];
    const TranslatedCurve& hi = out.curves[idx[k + 1]];
    if (lo.c == hi.c) continue;
    const std::vector<double> lov = lo.psi.sample(m);
    const std::vector<double> hiv = hi.psi.sample(m);
    for (int j = 0; j < m; ++j) {
      if (!(lov[j] < hiv[j]))
        throw SolverError(
            "foliation_sweep: curves cross between c = " + std::to_string(lo.c) +
            " and c = " + std::to_string(hi.c) + " (eps beyond validity)");
    }
    if (eps > 0.0) {
      const double lip = (hi.psi.derivative() - lo.psi.derivative()).sobolev_norm(0) /
                         (eps * std::abs(hi.c - lo.c));
      out.k_emp = std::max(out.k_emp, lip);
    }
  }
  return out;
}

ContinuationResult continuation_in_eps(const ForcedMap& map,
                                       const Frequency& alpha, double c,
                                       const std::vector<double>& eps_ladder,
                                       const CurveOptions& opts) {
  ContinuationResult out;
  CurveOptions local = opts;
  for (double eps : eps_ladder) {
    ContinuationStep step;
    step.eps = eps;
    try {
      TranslatedCurve curve = translated_curve(map, eps, alpha, c, local);
      step.converged = curve.converged;
      step.d2_norm = curve.d2_norm;
      step.lambda = curve.lambda;
      step.residual_sup = curve.residual_sup;
      step.iterations = curve.iterations;
      if (!curve.converged) {
        step.failure = curve.breakdown ? "d2 ceiling exceeded" : "no contraction";
        out.trace.push_back(step);
        out.broke_down = true;
        out.breakdown_eps = eps;
        break;
      }
      local.initial_guess = curve.psi;  // warm start for the next rung
      out.trace.push_back(step);
      out.curves.push_back(std::move(curve));
    } catch (const SolverError& err) {
      step.failure = err.what();
      out.trace.push_back(step);
      out.broke_down = true;
      out.breakdown_eps = eps;
      break;
    }
  }
  return out;
}

std::optional<ObstructionCertificate> rational_obstruction(
    const ForcedMap& map, double eps, const Frequency& alpha,
    const ObstructionOptions& opts) {
  if (!alpha.is_rational())
    throw PreconditionError("rational_obstruction: alpha must be rational p/q");
  const std::int64_t q = alpha.denominator();
  // Angles must keep a definite sign at every point of their q-step orbit
  // and every sampled r (summing the functional equation along the orbit
  // then forces contradictory signs of lambda). A sign floor keeps exact
  // cancellations at rounding level from producing a bogus certificate.
  constexpr double kSignFloor = 1e-9;

  bool have_pos = false, have_neg = false;
  ObstructionCertificate cert;
  for (int t = 0; t < opts.theta_samples; ++t) {
    const double theta = kTwoPi * t / opts.theta_samples;
    double orbit_min = 0.0, orbit_max = 0.0;  // of F over the orbit x r box
    double sum_min = 0.0, sum_max = 0.0;      // of the orbit sum over r
    for (int i = 0; i < opts.r_samples; ++i) {
      const double r = opts.r_min + (opts.r_max - opts.r_min) *
                                        (i + 0.5) / opts.r_samples;
      double sum = 0.0;
      for (std::int64_t k = 0; k < q; ++k) {
        const double value =
            map.eval(r, theta + kTwoPi * k * alpha.value(), eps);
        sum += value;
        if (i == 0 && k == 0) {
          orbit_min = orbit_max = value;
        } else {
          orbit_min = std::min(orbit_min, value);
          orbit_max = std::max(orbit_max, value);
        }
      }
      if (i == 0) {
        sum_min = sum_max = sum;
      } else {
        sum_min = std::min(sum_min, sum);
        sum_max = std::max(sum_max, sum);
      }
    }
    if (orbit_min > kSignFloor &&
        (!have_pos || sum_min > cert.margin_positive)) {
      have_pos = true;
      cert.theta_positive = theta;
      cert.margin_positive = sum_min;
    }
    if (orbit_max < -kSignFloor &&
        (!have_neg || -sum_max > cert.margin_negative)) {
      have_neg = true;
      cert.theta_negative = theta;
      cert.margin_negative = -sum_max;
    }
  }
  if (have_pos && have_neg) return cert;
  return std::nullopt;
}

}  // namespace qpfc
