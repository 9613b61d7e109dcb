// Solvers for the two linear functional equations behind the iteration:
// the constant-coefficient cohomological equation
//     G(theta + 2 pi alpha) - G(theta) = p(theta),
// and the twisted difference equation
//     phi(theta + 2 pi alpha) - a(theta) phi(theta) = p(theta) + nu,
// with unknown pair (phi, nu) and zero-mean phi, plus the averaging
// conjugacy built from the first.
#pragma once

#include <optional>
#include <vector>

#include "qpfc/forced_map.hpp"
#include "qpfc/frequency.hpp"
#include "qpfc/periodic.hpp"

namespace qpfc {

struct ConstantSolveResult {
  PeriodicFunction g;       // zero-mean solution (valid when solvable)
  bool solvable = false;
  double obstruction_mean = 0.0;  // mean of p when unsolvable
  double min_divisor = 0.0;       // smallest |e^{2 pi i n alpha} - 1| used
};

/// Mode-by-mode division G_n = p_n/(e^{2 pi i n alpha} - 1), G_0 = 0.
/// alpha must not be rational; a nonzero mean(p) (beyond 1e-12) returns
/// solvable=false with the violated integral. Divisors below the resonance
/// floor raise ResonanceError.
ConstantSolveResult solve_constant(const PeriodicFunction& p,
                                   const Frequency& alpha);

struct LinDESolution {
  PeriodicFunction phi;  // zero mean
  double nu = 0.0;
  double residual_sup = 0.0;     // measured, never assumed
  bool divisor_floor_hit = false;
  // Diagnostics.
  double lambda_a = 1.0;         // exp(mean log a)
  double min_divisor = 0.0;      // smallest |e^{2 pi i n alpha} - lambda_a|
  double c_emp = 0.0;            // ||phi||_{L2} / ||Dp||_{L2} when defined
};

struct LinDEOptions {
  int grid_factor = 4;        // sampling grid = grid_factor * order
  bool allow_rational = false;  // skip the rationality guard; exact resonances
                                // then surface as divisor-floor errors
};

/// Herman's reduction: factor a(theta) = lambda_a b(theta+2 pi alpha)/b(theta)
/// through the cohomological equation for log a, substitute phi = b*psi, and
/// solve the diagonal problem mode by mode. nu enters affinely and is fixed
/// together with the zero-mode of psi by a 2x2 system (mode-0 equation +
/// mean(b*psi) = 0), which stays well conditioned through lambda_a = 1.
/// Preconditions: a > 0 on the grid; alpha not rational.
LinDESolution solve_linde(const PeriodicFunction& a, const PeriodicFunction& p,
                          const Frequency& alpha, const LinDEOptions& opts = {});

/// Independent dense oracle: collocation at m (odd) grid points with the
/// trigonometric shift-interpolation matrix plus the zero-mean constraint,
/// solved as one (m+1) x (m+1) real linear system. residual_sup is measured
/// against the original (a, p) on a fine grid, so an undersized m shows up as
/// a large residual rather than silently passing.
LinDESolution solve_linde_dense(const PeriodicFunction& a,
                                const PeriodicFunction& p,
                                const Frequency& alpha, int m);

struct AveragedPoint {
  PeriodicFunction h;   // zero-mean solution of H(.+2 pi a) - H(.) = -(F - Fbar)
  double f_bar = 0.0;   // theta-average of F(r, .)
};

/// Conjugacy data at a single radius.
AveragedPoint averaging_conjugacy_at(const ForcedMap& map, double eps,
                                     const Frequency& alpha, double r,
                                     int order = 64);

struct AveragedField {
  std::vector<double> r_grid;
  std::vector<PeriodicFunction> h;
  std::vector<double> f_bar;
};

/// averaging_conjugacy_at over an r grid; the loop is embarrassingly parallel
/// but runs serially here (callers distribute).
AveragedField averaging_conjugacy(const ForcedMap& map, double eps,
                                  const Frequency& alpha,
                                  const std::vector<double>& r_grid,
                                  int order = 64);

/// Resonance floor used by both solvers: max(1e-12, 0.5 * 4 delta / order).
double divisor_floor(const Frequency& alpha, int order);

}  // namespace qpfc
