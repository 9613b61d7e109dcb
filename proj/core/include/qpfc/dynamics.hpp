// Orbit- and cocycle-level computations: Lyapunov exponents of invariant
// curves, Birkhoff averages with the constant-type O(1/n) rate, the fibred
// rotation number, and a plain orbit sampler.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qpfc/curves.hpp"
#include "qpfc/forced_map.hpp"

namespace qpfc {

struct CocycleProduct {
  std::vector<std::pair<std::int64_t, double>> log_products;  // (n, (1/n) sum log a)
  double theta0 = 0.0;
  double chi_plus_integral = 0.0;  // (1/2 pi) int log(1 + eps F_r(psi, .))
  double rate_constant = 0.0;      // C_emp = max_n n |product_avg - integral|
};

/// Lyapunov data of an invariant curve (|lambda| <= lambda_tol required):
/// the integral chi+ and the finite cocycle averages along the orbit of
/// theta0, recorded at powers of two up to n_max. Throws SolverError when
/// 1 + eps F_r is not positive (log undefined; eps too large).
CocycleProduct lyapunov(const TranslatedCurve& curve, const ForcedMap& map,
                        const Frequency& alpha, std::int64_t n_max,
                        double theta0 = 0.0, double lambda_tol = 1e-8);

struct BirkhoffRate {
  std::vector<std::pair<std::int64_t, double>> scaled_errors;  // (n, n*error(n))
  double max_scaled_error = 0.0;
  double theoretical_bound = 0.0;  // 2 mu sum |f_m||m| (rigorous delta only)
  bool rational_lock = false;      // rational alpha: averages lock onto the
                                   // q-periodic mean (allowed, flagged)
};

/// error(n) = |(1/n) sum_{k<n} f(theta0 + 2 pi k alpha) - mean f|; returns
/// n*error(n), which stays bounded for constant-type alpha and f in H^2.
BirkhoffRate birkhoff_rate(const PeriodicFunction& f, const Frequency& alpha,
                           double theta0,
                           const std::vector<std::int64_t>& n_list);

struct RotationNumberResult {
  double rho = 0.0;            // (r_n - r_0)/n on the lift
  double tail_estimate = 0.0;  // |rho(2n) - rho(n)|
  std::int64_t n = 0;
};

/// Fibred rotation number of the lift (r never reduced mod 2 pi).
RotationNumberResult fibred_rotation_number(const ForcedMap& map, double eps,
                                            const Frequency& alpha,
                                            CylinderPoint x0, std::int64_t n);

struct OrbitSample {
  std::vector<CylinderPoint> points;
  bool escaped = false;
  std::int64_t escape_step = 0;  // meaningful when escaped
};

/// Iterates the map, discards n_transient steps, keeps the next n_keep.
/// |r| > 1e12 stops the orbit with an escape report.
OrbitSample orbit_sample(const ForcedMap& map, double eps,
                         const Frequency& alpha, CylinderPoint x0,
                         std::int64_t n_transient, std::int64_t n_keep);

}  // namespace qpfc
