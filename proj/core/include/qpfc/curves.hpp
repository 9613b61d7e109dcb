// Translated curves: the constructive iteration producing psi_c for each
// mean level c, its translation number lambda, the c-derivative, foliation
// sweeps, continuation in eps with breakdown monitoring, and the
// rational-frequency obstruction detector.
#pragma once

#include <optional>
#include <vector>

#include "qpfc/cohomology.hpp"
#include "qpfc/forced_map.hpp"
#include "qpfc/frequency.hpp"
#include "qpfc/periodic.hpp"

namespace qpfc {

struct CurveOptions {
  int modes = 256;                 // Fourier truncation N
  double tol_residual = 1e-9;      // constancy of the functional-equation residual
  double tol_step = 1e-11;         // step tolerance scale: tol*(1+||Dpsi_n||)
  int max_iter = 200;
  double d2_ceiling = 1.0;         // Theorem-level bound on ||D^2 psi||
  int grid_factor = 4;
  bool adaptive = true;            // double N while tail energy > 1e-24 of total
  int max_modes = 2048;
  bool allow_rational_alpha = false;  // run the scheme anyway (it will fail)
  std::optional<PeriodicFunction> initial_guess;  // warm start (recentered)
};

struct TranslatedCurve {
  PeriodicFunction psi;
  double c = 0.0;
  double epsilon = 0.0;
  double lambda = 0.0;
  double residual_sup = 0.0;        // sup |psi(.+2pa) - psi - drift - eps F - lambda|,
                                    // measured on a 2x refined grid
  double residual_constancy = 0.0;  // max - min of the same expression
  double d2_norm = 0.0;             // ||D^2 psi||_{L2}
  int iterations = 0;
  bool converged = false;
  bool contracted = false;          // step criterion met (regardless of the
                                    // residual certificate)
  bool breakdown = false;           // d2_norm above ceiling
  double tail_energy = 0.0;
  std::vector<double> step_norms;   // ||D psi_{n+1} - D psi_n||_{L2} history
  std::vector<double> nu_history;

  // Diagnostics of the final linear solve (surfaced in CLI JSON outputs).
  double linde_residual_sup = 0.0;
  double linde_c_emp = 0.0;
  double linde_min_divisor = 0.0;
  bool divisor_floor_hit = false;
};

/// The iteration of the constructive scheme: psi_0 = c; each step solves the
/// twisted difference equation for D psi_{n+1} with a_n = 1 + eps*F_r(psi_n)
/// and p_n = eps*F_theta(psi_n), then recenters the primitive to mean c.
/// lambda is recovered a posteriori as the grid average of the functional-
/// equation residual, whose constancy is asserted.
/// Throws EpsilonTooLargeError when a_n leaves [1/2, 3/2]; near-resonances
/// propagate; non-contraction returns converged=false with the step history.
TranslatedCurve translated_curve(const ForcedMap& map, double eps,
                                 const Frequency& alpha, double c,
                                 const CurveOptions& opts = {});

struct CurveDerivative {
  PeriodicFunction delta;  // mean exactly 1
  double d1_norm = 0.0;    // ||D delta||_{L2} = O(eps)
  double nu = 0.0;
};

/// d psi_c / dc as the solution of the integrated variational equation:
/// delta = 1 + phi with (phi, nu) solving the twisted equation for
/// a = 1 + eps*F_r(psi_c) and p = eps*F_r(psi_c). Requires curve.converged.
CurveDerivative dpsi_dc(const TranslatedCurve& curve, const ForcedMap& map,
                        const Frequency& alpha, const CurveOptions& opts = {});

struct SweepResult {
  std::vector<TranslatedCurve> curves;  // ordered like the input c_values
  double k_emp = 0.0;  // max ||Dpsi_c1 - Dpsi_c2|| / (eps |c1 - c2|), adjacent in c
};

/// Curves for every c in c_values (deterministic order; `jobs` workers).
/// Verifies strict ordering psi_{c_i} < psi_{c_j} for c_i < c_j on the grid
/// and throws SolverError on any crossing (foliation violation).
SweepResult foliation_sweep(const ForcedMap& map, double eps,
                            const Frequency& alpha,
                            const std::vector<double>& c_values,
                            const CurveOptions& opts = {}, int jobs = 1);

struct ContinuationStep {
  double eps = 0.0;
  bool converged = false;
  double d2_norm = 0.0;
  double lambda = 0.0;
  double residual_sup = 0.0;
  int iterations = 0;
  std::string failure;  // empty when the solve succeeded
};

struct ContinuationResult {
  std::vector<ContinuationStep> trace;
  std::vector<TranslatedCurve> curves;  // one per converged step
  bool broke_down = false;
  double breakdown_eps = 0.0;
};

/// Walks the eps ladder warm-starting each solve from the previous curve;
/// declares breakdown at the first divergence, solver error, or d2_norm
/// above the ceiling, and stops there.
ContinuationResult continuation_in_eps(const ForcedMap& map,
                                       const Frequency& alpha, double c,
                                       const std::vector<double>& eps_ladder,
                                       const CurveOptions& opts = {});

struct ObstructionCertificate {
  double theta_positive = 0.0;  // orbit sum > 0 for every sampled r
  double theta_negative = 0.0;  // orbit sum < 0 for every sampled r
  double margin_positive = 0.0;
  double margin_negative = 0.0;
};

struct ObstructionOptions {
  int theta_samples = 1024;
  int r_samples = 64;
  double r_min = -10.0;
  double r_max = 10.0;
};

/// Searches for angles theta*, theta_* whose q-step orbit sums of F keep a
/// fixed sign for all sampled r; both found means no translated curve can
/// exist at alpha = p/q. Returns nullopt when inconclusive.
std::optional<ObstructionCertificate> rational_obstruction(
    const ForcedMap& map, double eps, const Frequency& alpha,
    const ObstructionOptions& opts = {});

}  // namespace qpfc
