// The catalog of forced maps r1 = r + drift + eps*F(r,theta;eps),
// theta1 = theta + 2*pi*alpha, with the partial derivatives the iteration
// and variational equations need.
#pragma once

#include <functional>
#include <string>

#include "qpfc/frequency.hpp"
#include "qpfc/periodic.hpp"

namespace qpfc {

struct CylinderPoint {
  double r = 0.0;
  double theta = 0.0;  // normalized to [0, 2*pi)
};

/// Immutable map record: F and its partials F_r, F_theta, F_rr, F_theta_r as
/// pure callables, plus the constant drift term (the omega_0 of the scaled
/// family; 0 for the plain form r1 = r + eps*F).
class ForcedMap {
 public:
  using Fn = std::function<double(double r, double theta, double eps)>;

  ForcedMap(std::string name, Fn f, Fn f_r, Fn f_theta, Fn f_rr, Fn f_theta_r,
            bool periodic_in_r, double derivative_bound, double drift = 0.0);

  double eval(double r, double theta, double eps) const { return f_(r, theta, eps); }
  double d_r(double r, double theta, double eps) const { return f_r_(r, theta, eps); }
  double d_theta(double r, double theta, double eps) const { return f_theta_(r, theta, eps); }
  double d_rr(double r, double theta, double eps) const { return f_rr_(r, theta, eps); }
  double d_theta_r(double r, double theta, double eps) const { return f_theta_r_(r, theta, eps); }

  bool periodic_in_r() const { return periodic_in_r_; }
  double derivative_bound() const { return derivative_bound_; }
  double drift() const { return drift_; }
  const std::string& name() const { return name_; }

  /// Same map with an added constant forcing (the omega_1 family of the
  /// bifurcation analysis) or a different drift.
  ForcedMap with_offset(double omega1) const;
  ForcedMap with_drift(double drift) const;

 private:
  std::string name_;
  Fn f_, f_r_, f_theta_, f_rr_, f_theta_r_;
  bool periodic_in_r_;
  double derivative_bound_;
  double drift_;
};

/// One step of the skew product: r1 = r + drift + eps*F(r,theta;eps),
/// theta1 = theta + 2*pi*alpha reduced to [0, 2*pi).
CylinderPoint step(const ForcedMap& map, double eps, const Frequency& alpha,
                   CylinderPoint x);

/// F = omega + k sin r + b sin theta (raw forced Arnold displacement; use
/// eps = 1 to reproduce the unscaled map).
ForcedMap builtin_arnold(double omega, double k, double b);

/// r1 = r + omega0 + eps*(omega1 + sin r + b sin theta).
ForcedMap builtin_arnold_scaled(double omega0, double omega1, double b);

/// F = omega1 + sin(r + G0(theta)) + b1 sin theta where G0 solves
/// G0(theta+2 pi alpha) - G0(theta) = b0 sin theta with zero mean:
/// G0 = -b0/(2 sin(pi alpha)) cos(theta - pi alpha). Requires sin(pi alpha) != 0.
ForcedMap builtin_transformed_arnold(double omega1, double b0, double b1,
                                     const Frequency& alpha);

/// F = -r + g(theta); every derived quantity has a closed form, which makes
/// this the library's end-to-end oracle.
ForcedMap builtin_linear_test(const PeriodicFunction& g);

/// F = (1 + sin^2 r) sin(q theta); obstructs translated curves at alpha = p/q.
ForcedMap builtin_rational_counterexample(int q);

/// F = p(theta) (r- and eps-free forcing).
ForcedMap builtin_theta_forcing(const PeriodicFunction& p);

/// Parse a closed-form expression in r, theta, eps; partials are obtained by
/// symbolic differentiation of the parse tree.
ForcedMap map_from_expression(const std::string& expr, bool periodic_in_r);

enum class Partial { F, Fr, Ftheta, Frr, Fthetar };

/// theta -> partial(psi(theta), theta; eps) sampled on the dealiased grid
/// (grid_factor * order points) and transformed back, truncated to psi's order.
PeriodicFunction compose_map_partial(const ForcedMap& map, Partial which,
                                     const PeriodicFunction& psi, double eps,
                                     int grid_factor = 4);

struct PartialCheck {
  double max_error = 0.0;      // worst finite-difference mismatch over partials
  double tolerance = 0.0;      // 1e-6 * (1 + derivative_bound)
  bool ok = false;
  double periodicity_error = 0.0;  // only meaningful when periodic_in_r
};

/// Consistency of the stored partials with central finite differences
/// (h = 1e-5) at random points, and of the periodicity flag.
PartialCheck check_partials(const ForcedMap& map, int points = 100,
                            unsigned seed = 20240901u);

}  // namespace qpfc
