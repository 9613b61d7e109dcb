#include "qpfc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qpfc/errors.hpp"

namespace qpfc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEscapeRadius = 1e12;

double advance_theta(double theta, double alpha) {
  double t = std::remainder(theta + kTwoPi * alpha, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}
}  // namespace

CocycleProduct lyapunov(const TranslatedCurve& curve, const ForcedMap& map,
                        const Frequency& alpha, std::int64_t n_max,
                        double theta0, double lambda_tol) {
  if (std::abs(curve.lambda) > lambda_tol)
    throw PreconditionError("lyapunov: curve is not invariant (|lambda| = " +
                            std::to_string(std::abs(curve.lambda)) + ")");
  if (n_max < 1) throw PreconditionError("lyapunov: n_max must be >= 1");
  const double eps = curve.epsilon;

  CocycleProduct out;
  out.theta0 = theta0;

  // Integral chi+ on the dealiased grid.
  const int m = std::max(4 * std::max(curve.psi.order(), 1), 64);
  const std::vector<double> psi_values = curve.psi.sample(m);
  double acc = 0.0;
  for (int j = 0; j < m; ++j) {
    const double a = 1.0 + eps * map.d_r(psi_values[j], kTwoPi * j / m, eps);
    if (!(a > 0.0))
      throw SolverError("lyapunov: 1 + eps*F_r not positive; log undefined");
    acc += std::log(a);
  }
  out.chi_plus_integral = acc / m;

  // Cocycle products in log space along the orbit of theta0; recorded at
  // powers of two and at n_max.
  double theta = theta0;
  double log_sum = 0.0;
  std::int64_t next_mark = 1;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const double a = 1.0 + eps * map.d_r(curve.psi.eval(theta), theta, eps);
    if (!(a > 0.0))
      throw SolverError("lyapunov: 1 + eps*F_r not positive along the orbit");
    log_sum += std::log(a);
    theta = advance_theta(theta, alpha.value());
    if (n == next_mark || n == n_max) {
      const double avg = log_sum / static_cast<double>(n);
      out.log_products.emplace_back(n, avg);
      out.rate_constant = std::max(
          out.rate_constant, n * std::abs(avg - out.chi_plus_integral));
      while (next_mark <= n) next_mark *= 2;
    }
  }
  return out;
}

BirkhoffRate birkhoff_rate(const PeriodicFunction& f, const Frequency& alpha,
                           double theta0,
                           const std::vector<std::int64_t>& n_list) {
  if (n_list.empty()) throw PreconditionError("birkhoff_rate: empty n list");
  std::vector<std::int64_t> marks = n_list;
  std::sort(marks.begin(), marks.end());
  if (marks.front() < 1)
    throw PreconditionError("birkhoff_rate: n values must be >= 1");

  BirkhoffRate out;
  out.rational_lock = alpha.is_rational();
  const double mean = f.mean();

  // Proof-side a priori bound: n*error <= 2 mu sum |f_m||m|.
  if (alpha.delta() > 0.0) {
    double coeff_sum = 0.0;
    for (int n = 1; n <= f.order(); ++n)
      coeff_sum += 2.0 * std::abs(f.coeff(n)) * n;
    out.theoretical_bound = 2.0 * alpha.mu() * coeff_sum;
  }

  double theta = theta0;
  double sum = 0.0;
  size_t mark_index = 0;
  const std::int64_t n_max = marks.back();
  for (std::int64_t n = 1; n <= n_max; ++n) {
    sum += f.eval(theta);
    theta = advance_theta(theta, alpha.value());
    while (mark_index < marks.size() && marks[mark_index] == n) {
      const double err = std::abs(sum / static_cast<double>(n) - mean);
      out.scaled_errors.emplace_back(n, n * err);
      out.max_scaled_error = std::max(out.max_scaled_error, n * err);
      ++mark_index;
    }
  }
  return out;
}

RotationNumberResult fibred_rotation_number(const ForcedMap& map, double eps,
                                            const Frequency& alpha,
                                            CylinderPoint x0, std::int64_t n) {
  if (n < 1) throw PreconditionError("fibred_rotation_number: n must be >= 1");
  RotationNumberResult out;
  out.n = n;
  // Lift: r accumulates without reduction; theta advances by rotation.
  double r = x0.r;
  double theta = x0.theta;
  double r_at_n = x0.r;
  for (std::int64_t k = 1; k <= 2 * n; ++k) {
    r = r + map.drift() + eps * map.eval(r, theta, eps);
    theta = advance_theta(theta, alpha.value());
    if (k == n) r_at_n = r;
  }
  out.rho = (r_at_n - x0.r) / static_cast<double>(n);
  const double rho_2n = (r - x0.r) / static_cast<double>(2 * n);
  out.tail_estimate = std::abs(rho_2n - out.rho);
  return out;
}

OrbitSample orbit_sample(const ForcedMap& map, double eps,
                         const Frequency& alpha, CylinderPoint x0,
                         std::int64_t n_transient, std::int64_t n_keep) {
  if (n_transient < 0 || n_keep < 0)
    throw PreconditionError("orbit_sample: negative counts");
  OrbitSample out;
  out.points.reserve(static_cast<size_t>(n_keep));
  CylinderPoint x = x0;
  for (std::int64_t k = 0; k < n_transient + n_keep; ++k) {
    x = step(map, eps, alpha, x);
    if (std::abs(x.r) > kEscapeRadius) {
      out.escaped = true;
      out.escape_step = k + 1;
      break;
    }
    if (k >= n_transient) out.points.push_back(x);
  }
  return out;
}

}  // namespace qpfc
