// The bifurcation equation: Phi(c, eps) = mean of F along the translated
// curve of mean c. Zeros of Phi are invariant curves; this module finds and
// classifies them and computes mode-locking intervals for circle maps.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpfc/curves.hpp"

namespace qpfc {

struct BifurcationOptions {
  int samples_per_period = 512;  // Phi sampling density per 2*pi of c
  double tol_root = 1e-10;
  double tol_c = 1e-12;
  double tol_zero_scale = 1e-3;  // Lyapunov deadband = scale * eps
  int newton_steps = 2;
  int jobs = 1;
  CurveOptions curve;
};

/// Phi(c, eps): quadrature of F(psi_c(theta), theta; eps) over the dealiased
/// grid, cross-checked against -lambda/eps from the curve (1e-8, eps > 0).
double phi(const ForcedMap& map, double eps, const Frequency& alpha, double c,
           const CurveOptions& opts = {});

/// Phi_0(c) = mean of F(c, theta; 0); no curve solve involved.
double phi0(const ForcedMap& map, double c, int grid = 2048);

struct InvariantCurveRoot {
  double c_star = 0.0;
  double phi_prime = 0.0;       // dPhi/dc at the root
  double chi_plus = 0.0;        // Lyapunov exponent of the invariant curve
  std::string classification;   // attractor | repeller | degenerate |
                                // degenerate-suspect
  double lambda = 0.0;          // measured translation (|lambda| <= eps*tol_root)
  double residual_sup = 0.0;
};

struct BifurcationReport {
  std::vector<InvariantCurveRoot> roots;
  std::vector<std::pair<double, double>> phi_samples;  // (c, Phi(c))
  std::optional<std::pair<double, double>> mode_lock_interval;
};

/// Samples Phi over [c_lo, c_hi], brackets sign changes, refines by bisection
/// to tol_c, polishes with Newton using Phi'(c) = mean(F_r(psi_c) * dpsi/dc),
/// then classifies each root by the sign of its Lyapunov exponent.
BifurcationReport find_invariant_curves(const ForcedMap& map, double eps,
                                        const Frequency& alpha, double c_lo,
                                        double c_hi,
                                        const BifurcationOptions& opts = {});

struct ModeLockResult {
  double omega_lo = 0.0;  // -max_c Phi
  double omega_hi = 0.0;  // -min_c Phi
  double c_at_max = 0.0;
  double c_at_min = 0.0;
  int midpoint_roots = 0;  // invariant curves found at the interval midpoint
  std::vector<std::pair<double, double>> phi_samples;
};

/// Mode-locking interval of the additive family omega1 -> F + omega1 for a
/// map 2*pi-periodic in r: the set of omega1 with at least one invariant
/// curve is [-max Phi, -min Phi]. Asserts (SolverError) that the interval
/// midpoint carries at least two invariant curves when the interval has
/// positive width.
ModeLockResult mode_lock_interval(const ForcedMap& base, double eps,
                                  const Frequency& alpha,
                                  const BifurcationOptions& opts = {});

struct IntervalIN {
  int n = 0;
  double lo = 0.0;      // unclipped interval of omega1
  double hi = 0.0;
  bool in_window = false;  // intersects the +-window scan range
  double clipped_lo = 0.0;
  double clipped_hi = 0.0;
};

struct IntervalsINResult {
  std::vector<IntervalIN> intervals;
  bool overlap_warning = false;  // theory says disjoint; numerical check
};

/// Torus-case intervals I_N for the drift-N family: the root condition
/// lambda = 2*pi*N places I_N at mode_lock_interval shifted by -N(1+2 pi)/eps,
/// so only N = 0 is reachable inside an O(1) window at small eps.
IntervalsINResult intervals_IN(const ForcedMap& base, double eps,
                               const Frequency& alpha, int n_min, int n_max,
                               double omega1_window = 10.0,
                               const BifurcationOptions& opts = {});

}  // namespace qpfc
