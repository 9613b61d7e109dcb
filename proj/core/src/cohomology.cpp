#include "qpfc/cohomology.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "qpfc/errors.hpp"

namespace qpfc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMeanTol = 1e-12;

using Complex = std::complex<double>;

Complex rotation(double alpha, int n) {
  return std::polar(1.0, kTwoPi * n * alpha);
}

// Sup of |phi(theta+2 pi alpha) - a phi - p - nu| over a grid fine enough for
// all participants.
double measure_residual(const PeriodicFunction& phi, double nu,
                        const PeriodicFunction& a, const PeriodicFunction& p,
                        const Frequency& alpha) {
  const int order = std::max({phi.order(), a.order(), p.order(), 16});
  const int m = 4 * order;
  const std::vector<double> phis = phi.shifted(alpha).sample(m);
  const std::vector<double> phiv = phi.sample(m);
  const std::vector<double> av = a.sample(m);
  const std::vector<double> pv = p.sample(m);
  double sup = 0.0;
  for (int j = 0; j < m; ++j)
    sup = std::max(sup, std::abs(phis[j] - av[j] * phiv[j] - pv[j] - nu));
  return sup;
}

}  // namespace

double divisor_floor(const Frequency& alpha, int order) {
  return std::max(1e-12, 0.5 * 4.0 * alpha.delta() / std::max(order, 1));
}

namespace {

// Shared core of solve_constant; the public entry adds the rationality guard.
ConstantSolveResult solve_constant_impl(const PeriodicFunction& p,
                                        const Frequency& alpha) {
  ConstantSolveResult out;
  out.obstruction_mean = p.mean();
  if (std::abs(out.obstruction_mean) > kMeanTol) {
    out.solvable = false;
    out.g = PeriodicFunction::zero(p.order());
    return out;
  }
  const int order = p.order();
  const double floor = divisor_floor(alpha, order);
  std::vector<Complex> coeffs(2 * order + 1, Complex(0.0));
  out.min_divisor = std::numeric_limits<double>::infinity();
  for (int n = -order; n <= order; ++n) {
    if (n == 0) continue;
    if (p.coeff(n) == Complex(0.0)) continue;
    const Complex d = rotation(alpha.value(), n) - 1.0;
    const double mag = std::abs(d);
    out.min_divisor = std::min(out.min_divisor, mag);
    if (mag < floor)
      throw ResonanceError("solve_constant: divisor below floor at n = " +
                           std::to_string(n));
    coeffs[n + order] = p.coeff(n) / d;
  }
  if (!std::isfinite(out.min_divisor)) out.min_divisor = 0.0;
  out.g = PeriodicFunction::from_coefficients(std::move(coeffs));
  out.solvable = true;
  return out;
}

}  // namespace

ConstantSolveResult solve_constant(const PeriodicFunction& p,
                                   const Frequency& alpha) {
  if (alpha.is_rational())
    throw ResonanceError("solve_constant: rational frequency");
  return solve_constant_impl(p, alpha);
}

namespace {

LinDESolution solve_linde_at_order(const PeriodicFunction& a,
                                   const PeriodicFunction& p,
                                   const Frequency& alpha,
                                   const LinDEOptions& opts, int order) {
  const int m = std::max(opts.grid_factor * order, 2 * order + 1);

  // Positivity of a on the grid.
  const std::vector<double> av = a.sample(m);
  double a_min = av[0];
  for (double v : av) a_min = std::min(a_min, v);
  if (!(a_min > 0.0))
    throw PreconditionError("solve_linde: a(theta) is not positive on the grid");

  // Herman factorization a = lambda_a * b(.+2 pi alpha)/b(.) with b = e^v,
  // v the zero-mean solution of v(.+2 pi alpha) - v(.) = log a - mean(log a).
  std::vector<double> log_a(m);
  for (int j = 0; j < m; ++j) log_a[j] = std::log(av[j]);
  const PeriodicFunction log_a_fn = PeriodicFunction::from_samples(log_a, order);
  const double mean_log_a = log_a_fn.mean();
  const double lambda_a = std::exp(mean_log_a);

  const ConstantSolveResult vres =
      solve_constant_impl(log_a_fn + (-mean_log_a), alpha);
  // mean was subtracted exactly, so vres is always solvable here
  const std::vector<double> vv = vres.g.sample(m);
  std::vector<double> bv(m), inv_b_shift(m);
  for (int j = 0; j < m; ++j) bv[j] = std::exp(vv[j]);
  const PeriodicFunction b = PeriodicFunction::from_samples(bv, order);
  const PeriodicFunction b_shift = b.shifted(alpha);
  const std::vector<double> bsv = b_shift.sample(m);
  for (int j = 0; j < m; ++j) inv_b_shift[j] = 1.0 / bsv[j];

  // Right-hand sides of the diagonal problem psi(.+2 pi a) - lambda_a psi = q
  // for q = p/b_shift (particular) and q = 1/b_shift (nu direction).
  const std::vector<double> pv = p.sample(m);
  std::vector<double> qpv(m);
  for (int j = 0; j < m; ++j) qpv[j] = pv[j] * inv_b_shift[j];
  const PeriodicFunction q_p = PeriodicFunction::from_samples(qpv, order);
  const PeriodicFunction q_1 = PeriodicFunction::from_samples(inv_b_shift, order);

  const double floor = divisor_floor(alpha, order);
  LinDESolution out;
  out.lambda_a = lambda_a;
  out.min_divisor = std::numeric_limits<double>::infinity();

  // psi_n = (q_p,n + nu q_1,n) / (e^{2 pi i n alpha} - lambda_a) for n != 0.
  // The zero mode and nu come from the 2x2 system
  //   (1 - lambda_a) psi_0 - q_1,0 nu = q_p,0          (mode-0 equation)
  //   b_0 psi_0 + S_1 nu = -S_p                        (mean(b psi) = 0)
  // with S_x = sum_{n != 0} b_{-n} q_x,n / divisor_n.
  std::vector<Complex> psi_p(2 * order + 1, Complex(0.0));
  std::vector<Complex> psi_1(2 * order + 1, Complex(0.0));
  Complex s_p(0.0), s_1(0.0);
  for (int n = -order; n <= order; ++n) {
    if (n == 0) continue;
    const Complex d = rotation(alpha.value(), n) - lambda_a;
    const double mag = std::abs(d);
    out.min_divisor = std::min(out.min_divisor, mag);
    if (mag < floor) {
      out.divisor_floor_hit = true;
      throw ResonanceError("solve_linde: near-resonant divisor at n = " +
                           std::to_string(n) + " (|e^{2 pi i n alpha} - lambda_a| = " +
                           std::to_string(mag) + ")");
    }
    psi_p[n + order] = q_p.coeff(n) / d;
    psi_1[n + order] = q_1.coeff(n) / d;
    s_p += b.coeff(-n) * psi_p[n + order];
    s_1 += b.coeff(-n) * psi_1[n + order];
  }
  const double b0 = b.mean();
  const double det = (1.0 - lambda_a) * s_1.real() + q_1.mean() * b0;
  if (std::abs(det) < 1e-14)
    throw SolverError("solve_linde: degenerate zero-mode system");
  const double rhs0 = q_p.mean();
  const double rhs1 = -s_p.real();
  // Cramer on [ (1-lambda_a)  -q_1,0 ; b0  S_1 ] [psi_0; nu] = [rhs0; rhs1].
  const double psi0 = (rhs0 * s_1.real() + q_1.mean() * rhs1) / det;
  const double nu = ((1.0 - lambda_a) * rhs1 - b0 * rhs0) / det;
  psi_p[order] = psi0;  // fold psi_1's zero mode into the final assembly below

  std::vector<Complex> psi_coeffs(2 * order + 1);
  for (int n = -order; n <= order; ++n)
    psi_coeffs[n + order] = psi_p[n + order] + nu * psi_1[n + order];
  const PeriodicFunction psi =
      PeriodicFunction::from_coefficients(std::move(psi_coeffs));

  // phi = b * psi on the grid; the grid is dealiased for this product.
  const std::vector<double> psiv = psi.sample(m);
  std::vector<double> phiv(m);
  for (int j = 0; j < m; ++j) phiv[j] = bv[j] * psiv[j];
  PeriodicFunction phi = PeriodicFunction::from_samples(phiv, order);
  // The 2x2 system made mean(b psi) zero in exact arithmetic; remove rounding.
  phi += -phi.mean();

  out.phi = phi;
  out.nu = nu;
  out.residual_sup = measure_residual(phi, nu, a, p, alpha);
  const double dp_norm = p.derivative().sobolev_norm(0);
  out.c_emp = dp_norm > 0.0 ? phi.sobolev_norm(0) / dp_norm : 0.0;
  return out;
}

}  // namespace

LinDESolution solve_linde(const PeriodicFunction& a, const PeriodicFunction& p,
                          const Frequency& alpha, const LinDEOptions& opts) {
  if (alpha.is_rational() && !opts.allow_rational)
    throw ResonanceError("solve_linde: rational frequency");

  // The Herman reduction spreads spectrum (log, exp, quotients), so the
  // working order may need to exceed the data bandwidth. Double it until the
  // measured residual sits well under the 1e-9*(1+||p||_H2) contract (the
  // solution error runs a small factor above the residual) or the cap bites.
  const int n_in = std::max({a.order(), p.order(), 1});
  const double target = 2e-11 * (1.0 + p.sobolev_norm(2));
  const int cap = std::max(4 * n_in, 2048);
  int order = std::max(n_in, 16);
  while (true) {
    LinDESolution sol = solve_linde_at_order(a, p, alpha, opts, order);
    if (sol.residual_sup <= target || 2 * order > cap) return sol;
    order *= 2;
  }
}

LinDESolution solve_linde_dense(const PeriodicFunction& a,
                                const PeriodicFunction& p,
                                const Frequency& alpha, int m) {
  if (m < 3 || m % 2 == 0)
    throw PreconditionError("solve_linde_dense: grid size must be odd and >= 3");
  const int half = (m - 1) / 2;

  // Shift-interpolation row: phi(theta_j + 2 pi alpha) = sum_k s[(j-k) mod m] phi_k
  // with s built from the Dirichlet kernel of the m-point interpolant.
  std::vector<double> s(m);
  for (int d = 0; d < m; ++d) {
    const double x = kTwoPi * d / m + kTwoPi * alpha.value();
    double acc = 1.0;
    for (int n = 1; n <= half; ++n) acc += 2.0 * std::cos(n * x);
    s[d] = acc / m;
  }

  const std::vector<double> av = a.sample(m);
  const std::vector<double> pv = p.sample(m);

  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(m + 1, m + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) mat(j, k) = s[((j - k) % m + m) % m];
    mat(j, j) -= av[j];
    mat(j, m) = -1.0;  // nu column
    rhs(j) = pv[j];
  }
  for (int k = 0; k < m; ++k) mat(m, k) = 1.0;  // zero-mean constraint

  Eigen::FullPivLU<Eigen::MatrixXd> lu(mat);
  if (!lu.isInvertible())
    throw ResonanceError("solve_linde_dense: singular collocation system");
  const Eigen::VectorXd sol = lu.solve(rhs);

  std::vector<double> phi_values(m);
  for (int j = 0; j < m; ++j) phi_values[j] = sol(j);
  // The collocation solution is the order-(m-1)/2 trigonometric interpolant
  // of the grid values; keep all of it.
  PeriodicFunction phi = PeriodicFunction::from_samples(phi_values, half);
  phi += -phi.mean();

  LinDESolution out;
  out.phi = phi;
  out.nu = sol(m);
  out.residual_sup = measure_residual(phi, out.nu, a, p, alpha);
  const double dp_norm = p.derivative().sobolev_norm(0);
  out.c_emp = dp_norm > 0.0 ? phi.sobolev_norm(0) / dp_norm : 0.0;
  return out;
}

AveragedPoint averaging_conjugacy_at(const ForcedMap& map, double eps,
                                     const Frequency& alpha, double r,
                                     int order) {
  const int m = 4 * std::max(order, 1);
  std::vector<double> values(m);
  for (int j = 0; j < m; ++j)
    values[j] = map.eval(r, kTwoPi * j / m, eps);
  const PeriodicFunction f = PeriodicFunction::from_samples(values, order);
  AveragedPoint out;
  out.f_bar = f.mean();
  const ConstantSolveResult res =
      solve_constant(-(f + (-out.f_bar)), alpha);
  out.h = res.g;
  return out;
}

AveragedField averaging_conjugacy(const ForcedMap& map, double eps,
                                  const Frequency& alpha,
                                  const std::vector<double>& r_grid,
                                  int order) {
  AveragedField out;
  out.r_grid = r_grid;
  out.h.reserve(r_grid.size());
  out.f_bar.reserve(r_grid.size());
  for (double r : r_grid) {
    AveragedPoint p = averaging_conjugacy_at(map, eps, alpha, r, order);
    out.h.push_back(std::move(p.h));
    out.f_bar.push_back(p.f_bar);
  }
  return out;
}

}  // namespace qpfc
