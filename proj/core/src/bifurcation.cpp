#include "qpfc/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

#include "qpfc/errors.hpp"

namespace qpfc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGolden = 0.6180339887498949;  // golden-section step

double quadrature_phi(const ForcedMap& map, double eps,
                      const TranslatedCurve& curve, int grid_factor) {
  const PeriodicFunction f =
      compose_map_partial(map, Partial::F, curve.psi, eps, grid_factor);
  return f.mean();
}

double phi_of_curve(const ForcedMap& map, double eps, const TranslatedCurve& c,
                    int grid_factor) {
  const double quad = quadrature_phi(map, eps, c, grid_factor);
  if (eps > 0.0) {
    // lambda = -drift - eps*Phi must hold for a true translated curve.
    const double from_lambda = -(c.lambda + map.drift()) / eps;
    if (std::abs(quad - from_lambda) > 1e-8 * (1.0 + std::abs(quad)))
      throw SolverError("phi: quadrature and -lambda/eps disagree (" +
                        std::to_string(quad) + " vs " +
                        std::to_string(from_lambda) + ")");
  }
  return quad;
}

// Phi sample over a c grid, optionally parallel; deterministic by index.
std::vector<double> sample_phi(const ForcedMap& map, double eps,
                               const Frequency& alpha,
                               const std::vector<double>& cs,
                               const BifurcationOptions& opts) {
  std::vector<double> values(cs.size());
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      try {
        const TranslatedCurve curve =
            translated_curve(map, eps, alpha, cs[i], opts.curve);
        if (!curve.converged)
          throw SolverError("phi sampling: curve did not converge at c = " +
                            std::to_string(cs[i]));
        values[i] = phi_of_curve(map, eps, curve, opts.curve.grid_factor);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const int workers =
      std::max(1, std::min<int>(opts.jobs, static_cast<int>(cs.size())));
  if (workers <= 1) {
    run(0, cs.size());
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (cs.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const size_t begin = w * chunk;
      const size_t end = std::min(begin + chunk, cs.size());
      if (begin >= end) break;
      pool.emplace_back(run, begin, end);
    }
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return values;
}

struct PhiEval {
  const ForcedMap& map;
  double eps;
  const Frequency& alpha;
  const BifurcationOptions& opts;

  double operator()(double c) const {
    const TranslatedCurve curve =
        translated_curve(map, eps, alpha, c, opts.curve);
    if (!curve.converged)
      throw SolverError("phi: curve did not converge at c = " + std::to_string(c));
    return phi_of_curve(map, eps, curve, opts.curve.grid_factor);
  }
};

// Golden-section refinement of an extremum of Phi inside [lo, hi].
double refine_extremum(const PhiEval& f, double lo, double hi, bool maximize,
                       double tol) {
  const double sign = maximize ? 1.0 : -1.0;
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = sign * f(x1), f2 = sign * f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = sign * f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = sign * f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double phi(const ForcedMap& map, double eps, const Frequency& alpha, double c,
           const CurveOptions& opts) {
  const TranslatedCurve curve = translated_curve(map, eps, alpha, c, opts);
  if (!curve.converged)
    throw SolverError("phi: curve did not converge at c = " + std::to_string(c));
  return phi_of_curve(map, eps, curve, opts.grid_factor);
}

double phi0(const ForcedMap& map, double c, int grid) {
  double acc = 0.0;
  for (int j = 0; j < grid; ++j)
    acc += map.eval(c, kTwoPi * j / grid, 0.0);
  return acc / grid;
}

BifurcationReport find_invariant_curves(const ForcedMap& map, double eps,
                                        const Frequency& alpha, double c_lo,
                                        double c_hi,
                                        const BifurcationOptions& opts) {
  if (!(c_hi > c_lo))
    throw PreconditionError("find_invariant_curves: empty c range");
  BifurcationReport report;
  const int count = std::max(
      16, static_cast<int>(std::lround(opts.samples_per_period *
                                       (c_hi - c_lo) / kTwoPi))) + 1;
  std::vector<double> cs(count);
  for (int i = 0; i < count; ++i)
    cs[i] = c_lo + (c_hi - c_lo) * i / (count - 1);
  const std::vector<double> values = sample_phi(map, eps, alpha, cs, opts);
  report.phi_samples.reserve(count);
  for (int i = 0; i < count; ++i) report.phi_samples.emplace_back(cs[i], values[i]);

  const PhiEval f{map, eps, alpha, opts};

  // Root candidates: sign-change brackets plus samples already inside the
  // root tolerance (a transversal zero can sit exactly on a grid point or a
  // range endpoint, where the sampled sign is rounding noise). A flat,
  // identically small Phi has no isolated roots; the 25% cap filters it.
  struct Candidate {
    double a, b;  // bracket (a == b for a direct hit)
  };
  std::vector<Candidate> candidates;
  int tiny = 0;
  for (int i = 0; i < count; ++i)
    if (std::abs(values[i]) <= opts.tol_root) ++tiny;
  if (tiny <= count / 4) {
    for (int i = 0; i < count; ++i)
      if (std::abs(values[i]) <= opts.tol_root)
        candidates.push_back({cs[i], cs[i]});
  }
  for (int i = 0; i + 1 < count; ++i) {
    if (std::abs(values[i]) <= opts.tol_root ||
        std::abs(values[i + 1]) <= opts.tol_root)
      continue;  // covered by a direct hit
    if (values[i] * values[i + 1] < 0.0) candidates.push_back({cs[i], cs[i + 1]});
  }

  for (const Candidate& cand : candidates) {
    double a = cand.a, b = cand.b;
    double fa = a == b ? 0.0 : f(a);
    // Bisection to width tol_c.
    while (b - a > opts.tol_c) {
      const double mid = 0.5 * (a + b);
      const double fm = f(mid);
      if (fm == 0.0) {
        a = b = mid;
        break;
      }
      if (fa * fm < 0.0) {
        b = mid;
      } else {
        a = mid;
        fa = fm;
      }
    }
    double c_star = 0.5 * (a + b);

    // Newton polish with Phi'(c) = mean(F_r(psi_c) * dpsi/dc).
    bool newton_ok = true;
    double phi_prime = 0.0;
    for (int it = 0; it < opts.newton_steps; ++it) {
      const TranslatedCurve curve =
          translated_curve(map, eps, alpha, c_star, opts.curve);
      if (!curve.converged) {
        newton_ok = false;
        break;
      }
      const double fc = phi_of_curve(map, eps, curve, opts.curve.grid_factor);
      const CurveDerivative der = dpsi_dc(curve, map, alpha, opts.curve);
      const PeriodicFunction fr = compose_map_partial(
          map, Partial::Fr, curve.psi, eps, opts.curve.grid_factor);
      phi_prime = inner_mean(fr, der.delta);
      if (phi_prime == 0.0 || !std::isfinite(phi_prime)) {
        newton_ok = false;
        break;
      }
      const double next = c_star - fc / phi_prime;
      const double cell = cs[1] - cs[0];
      if (!(next > cand.a - cell && next < cand.b + cell)) {
        newton_ok = false;  // Newton ran away; keep the bisection root
        break;
      }
      if (std::abs(next - c_star) < 0.25 * opts.tol_c) {
        c_star = next;
        break;
      }
      c_star = next;
    }

    bool duplicate = false;
    for (const InvariantCurveRoot& existing : report.roots)
      if (std::abs(existing.c_star - c_star) < std::max(100.0 * opts.tol_c, 1e-10))
        duplicate = true;
    if (duplicate) continue;

    InvariantCurveRoot root;
    root.c_star = c_star;
    const TranslatedCurve curve =
        translated_curve(map, eps, alpha, c_star, opts.curve);
    if (!curve.converged)
      throw SolverError("find_invariant_curves: root curve did not converge");
    const double fc = phi_of_curve(map, eps, curve, opts.curve.grid_factor);
    if (std::abs(fc) > opts.tol_root)
      throw SolverError("find_invariant_curves: |Phi(c*)| = " +
                        std::to_string(std::abs(fc)) + " exceeds tol_root");
    const CurveDerivative der = dpsi_dc(curve, map, alpha, opts.curve);
    const PeriodicFunction fr = compose_map_partial(
        map, Partial::Fr, curve.psi, eps, opts.curve.grid_factor);
    root.phi_prime = inner_mean(fr, der.delta);
    root.lambda = curve.lambda;
    root.residual_sup = curve.residual_sup;

    // chi+ by quadrature of log(1 + eps F_r(psi_c)).
    const int m = std::max(opts.curve.grid_factor * curve.psi.order(), 64);
    const std::vector<double> psi_values = curve.psi.sample(m);
    double chi = 0.0;
    for (int j = 0; j < m; ++j) {
      const double av =
          1.0 + eps * map.d_r(psi_values[j], kTwoPi * j / m, eps);
      if (!(av > 0.0))
        throw SolverError("find_invariant_curves: 1 + eps F_r not positive");
      chi += std::log(av);
    }
    root.chi_plus = chi / m;

    const double deadband = opts.tol_zero_scale * eps;
    if (!newton_ok)
      root.classification = "degenerate-suspect";
    else if (root.chi_plus < -deadband)
      root.classification = "attractor";
    else if (root.chi_plus > deadband)
      root.classification = "repeller";
    else
      root.classification = "degenerate";
    report.roots.push_back(std::move(root));
  }
  return report;
}

ModeLockResult mode_lock_interval(const ForcedMap& base, double eps,
                                  const Frequency& alpha,
                                  const BifurcationOptions& opts) {
  if (!base.periodic_in_r())
    throw PreconditionError(
        "mode_lock_interval: map is not 2*pi-periodic in r, Phi is not "
        "periodic in c");
  ModeLockResult out;
  const int count = std::max(opts.samples_per_period, 16);
  std::vector<double> cs(count);
  for (int i = 0; i < count; ++i) cs[i] = kTwoPi * i / count;
  const std::vector<double> values = sample_phi(base, eps, alpha, cs, opts);
  out.phi_samples.reserve(count);
  for (int i = 0; i < count; ++i) out.phi_samples.emplace_back(cs[i], values[i]);

  int imax = 0, imin = 0;
  for (int i = 1; i < count; ++i) {
    if (values[i] > values[imax]) imax = i;
    if (values[i] < values[imin]) imin = i;
  }
  const double dc = kTwoPi / count;
  const PhiEval f{base, eps, alpha, opts};
  const double span = values[imax] - values[imin];
  if (span > 10.0 * opts.tol_root) {
    out.c_at_max = refine_extremum(f, cs[imax] - dc, cs[imax] + dc, true, 1e-10);
    out.c_at_min = refine_extremum(f, cs[imin] - dc, cs[imin] + dc, false, 1e-10);
  } else {
    out.c_at_max = cs[imax];
    out.c_at_min = cs[imin];
  }
  const double phi_max = f(out.c_at_max);
  const double phi_min = f(out.c_at_min);
  out.omega_lo = -phi_max;
  out.omega_hi = -phi_min;

  if (out.omega_hi - out.omega_lo > 10.0 * opts.tol_root) {
    const double mid = 0.5 * (out.omega_lo + out.omega_hi);
    // Pad the probe window past one period: a root can sit exactly on the
    // 0/2 pi seam (symmetric maps put one there at the midpoint), where
    // rounding noise hides the sign change. Duplicates fold out mod 2 pi.
    const double pad = 4.0 * kTwoPi / std::max(opts.samples_per_period, 16);
    const BifurcationReport check = find_invariant_curves(
        base.with_offset(mid), eps, alpha, 0.0, kTwoPi + pad, opts);
    // Deduplicate roots that coincide modulo the period.
    std::vector<double> uniq;
    for (const auto& r : check.roots) {
      const double cm = std::fmod(r.c_star + kTwoPi, kTwoPi);
      bool dup = false;
      for (double u : uniq)
        if (std::abs(std::remainder(cm - u, kTwoPi)) < 1e-6) dup = true;
      if (!dup) uniq.push_back(cm);
    }
    out.midpoint_roots = static_cast<int>(uniq.size());
    if (out.midpoint_roots < 2)
      throw SolverError(
          "mode_lock_interval: fewer than two invariant curves at the "
          "interval midpoint");
  }
  return out;
}

IntervalsINResult intervals_IN(const ForcedMap& base, double eps,
                               const Frequency& alpha, int n_min, int n_max,
                               double omega1_window,
                               const BifurcationOptions& opts) {
  if (!(eps > 0.0)) throw PreconditionError("intervals_IN: eps must be positive");
  if (n_min > n_max) throw PreconditionError("intervals_IN: empty N range");
  const ModeLockResult ml = mode_lock_interval(base, eps, alpha, opts);

  IntervalsINResult out;
  for (int n = n_min; n <= n_max; ++n) {
    // Root condition lambda = 2 pi N for the drift-N family member:
    // omega1 = -Phi(c) - N(1+2 pi)/eps.
    const double shift = n * (1.0 + kTwoPi) / eps;
    IntervalIN iv;
    iv.n = n;
    iv.lo = ml.omega_lo - shift;
    iv.hi = ml.omega_hi - shift;
    iv.clipped_lo = std::max(iv.lo, -omega1_window);
    iv.clipped_hi = std::min(iv.hi, omega1_window);
    iv.in_window = iv.clipped_lo <= iv.clipped_hi;
    out.intervals.push_back(iv);
  }
  for (size_t i = 0; i + 1 < out.intervals.size(); ++i) {
    // Intervals are ordered by decreasing shift; adjacent overlap check.
    if (out.intervals[i + 1].hi >= out.intervals[i].lo &&
        out.intervals[i + 1].lo <= out.intervals[i].hi)
      out.overlap_warning = true;
  }
  return out;
}

}  // namespace qpfc
