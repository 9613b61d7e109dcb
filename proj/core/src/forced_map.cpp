#include "qpfc/forced_map.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "qpfc/errors.hpp"
#include "qpfc/expression.hpp"

namespace qpfc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPi = std::numbers::pi;
}  // namespace

ForcedMap::ForcedMap(std::string name, Fn f, Fn f_r, Fn f_theta, Fn f_rr,
                     Fn f_theta_r, bool periodic_in_r, double derivative_bound,
                     double drift)
    : name_(std::move(name)),
      f_(std::move(f)),
      f_r_(std::move(f_r)),
      f_theta_(std::move(f_theta)),
      f_rr_(std::move(f_rr)),
      f_theta_r_(std::move(f_theta_r)),
      periodic_in_r_(periodic_in_r),
      derivative_bound_(derivative_bound),
      drift_(drift) {}

ForcedMap ForcedMap::with_offset(double omega1) const {
  ForcedMap m = *this;
  Fn base = f_;
  m.f_ = [base, omega1](double r, double theta, double eps) {
    return base(r, theta, eps) + omega1;
  };
  m.name_ = name_ + "+offset";
  return m;
}

ForcedMap ForcedMap::with_drift(double drift) const {
  ForcedMap m = *this;
  m.drift_ = drift;
  return m;
}

CylinderPoint step(const ForcedMap& map, double eps, const Frequency& alpha,
                   CylinderPoint x) {
  CylinderPoint y;
  y.r = x.r + map.drift() + eps * map.eval(x.r, x.theta, eps);
  y.theta = std::remainder(x.theta + kTwoPi * alpha.value(), kTwoPi);
  if (y.theta < 0.0) y.theta += kTwoPi;
  return y;
}

ForcedMap builtin_arnold(double omega, double k, double b) {
  return ForcedMap(
      "arnold",
      [=](double r, double theta, double) { return omega + k * std::sin(r) + b * std::sin(theta); },
      [=](double r, double, double) { return k * std::cos(r); },
      [=](double, double theta, double) { return b * std::cos(theta); },
      [=](double r, double, double) { return -k * std::sin(r); },
      [](double, double, double) { return 0.0; },
      /*periodic_in_r=*/true,
      /*derivative_bound=*/std::abs(omega) + std::abs(k) + std::abs(b));
}

ForcedMap builtin_arnold_scaled(double omega0, double omega1, double b) {
  return ForcedMap(
      "arnold_scaled",
      [=](double r, double theta, double) { return omega1 + std::sin(r) + b * std::sin(theta); },
      [](double r, double, double) { return std::cos(r); },
      [=](double, double theta, double) { return b * std::cos(theta); },
      [](double r, double, double) { return -std::sin(r); },
      [](double, double, double) { return 0.0; },
      /*periodic_in_r=*/true,
      /*derivative_bound=*/std::abs(omega1) + 1.0 + std::abs(b),
      /*drift=*/omega0);
}

ForcedMap builtin_transformed_arnold(double omega1, double b0, double b1,
                                     const Frequency& alpha) {
  const double s = std::sin(kPi * alpha.value());
  if (s == 0.0)
    throw PreconditionError("transformed arnold: sin(pi*alpha) vanishes");
  const double amp = b0 / (2.0 * s);    // G0 = -amp cos(theta - pi alpha)
  const double phase = kPi * alpha.value();
  auto g0 = [=](double theta) { return -amp * std::cos(theta - phase); };
  auto dg0 = [=](double theta) { return amp * std::sin(theta - phase); };
  return ForcedMap(
      "transformed_arnold",
      [=](double r, double theta, double) {
        return omega1 + std::sin(r + g0(theta)) + b1 * std::sin(theta);
      },
      [=](double r, double theta, double) { return std::cos(r + g0(theta)); },
      [=](double r, double theta, double) {
        return std::cos(r + g0(theta)) * dg0(theta) + b1 * std::cos(theta);
      },
      [=](double r, double theta, double) { return -std::sin(r + g0(theta)); },
      [=](double r, double theta, double) {
        return -std::sin(r + g0(theta)) * dg0(theta);
      },
      /*periodic_in_r=*/true,
      /*derivative_bound=*/std::abs(omega1) + (1.0 + std::abs(amp)) + std::abs(b1));
}

ForcedMap builtin_linear_test(const PeriodicFunction& g) {
  const PeriodicFunction dg = g.derivative();
  const double bound = 1.0 + g.sup_norm_bound() + dg.sup_norm_bound();
  return ForcedMap(
      "linear_test",
      [g](double r, double theta, double) { return -r + g.eval(theta); },
      [](double, double, double) { return -1.0; },
      [dg](double, double theta, double) { return dg.eval(theta); },
      [](double, double, double) { return 0.0; },
      [](double, double, double) { return 0.0; },
      /*periodic_in_r=*/false, bound);
}

ForcedMap builtin_rational_counterexample(int q) {
  if (q < 1) throw PreconditionError("rational counterexample: q must be >= 1");
  const double qd = q;
  return ForcedMap(
      "rational_counterexample_q" + std::to_string(q),
      [qd](double r, double theta, double) {
        const double s = std::sin(r);
        return (1.0 + s * s) * std::sin(qd * theta);
      },
      [qd](double r, double theta, double) {
        return std::sin(2.0 * r) * std::sin(qd * theta);
      },
      [qd](double r, double theta, double) {
        const double s = std::sin(r);
        return qd * (1.0 + s * s) * std::cos(qd * theta);
      },
      [qd](double r, double theta, double) {
        return 2.0 * std::cos(2.0 * r) * std::sin(qd * theta);
      },
      [qd](double r, double theta, double) {
        return qd * std::sin(2.0 * r) * std::cos(qd * theta);
      },
      /*periodic_in_r=*/true, /*derivative_bound=*/2.0 + 2.0 * qd);
}

ForcedMap builtin_theta_forcing(const PeriodicFunction& p) {
  const PeriodicFunction dp = p.derivative();
  return ForcedMap(
      "theta_forcing",
      [p](double, double theta, double) { return p.eval(theta); },
      [](double, double, double) { return 0.0; },
      [dp](double, double theta, double) { return dp.eval(theta); },
      [](double, double, double) { return 0.0; },
      [](double, double, double) { return 0.0; },
      /*periodic_in_r=*/true,
      p.sup_norm_bound() + dp.sup_norm_bound());
}

ForcedMap map_from_expression(const std::string& text, bool periodic_in_r) {
  const Expression f = Expression::parse(text);
  const Expression fr = f.differentiate(ExprVar::R);
  const Expression ft = f.differentiate(ExprVar::Theta);
  const Expression frr = fr.differentiate(ExprVar::R);
  const Expression ftr = ft.differentiate(ExprVar::R);

  // Sampled bound on |F| and its first/second partials.
  double bound = 0.0;
  std::mt19937 rng(12345u);
  std::uniform_real_distribution<double> ur(-3.0, 3.0), ut(0.0, kTwoPi),
      ue(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double r = ur(rng), th = ut(rng), e = ue(rng);
    for (const Expression* ex : {&f, &fr, &ft, &frr, &ftr})
      bound = std::max(bound, std::abs(ex->eval(r, th, e)));
  }

  auto wrap = [](const Expression& e) {
    return [e](double r, double theta, double eps) { return e.eval(r, theta, eps); };
  };
  return ForcedMap("expr:" + text, wrap(f), wrap(fr), wrap(ft), wrap(frr),
                   wrap(ftr), periodic_in_r, bound);
}

PeriodicFunction compose_map_partial(const ForcedMap& map, Partial which,
                                     const PeriodicFunction& psi, double eps,
                                     int grid_factor) {
  const int order = psi.order();
  const int m = std::max(grid_factor * std::max(order, 1), 2 * order + 1);
  const std::vector<double> psi_values = psi.sample(m);
  std::vector<double> values(m);
  for (int j = 0; j < m; ++j) {
    const double theta = kTwoPi * j / m;
    const double r = psi_values[j];
    switch (which) {
      case Partial::F: values[j] = map.eval(r, theta, eps); break;
      case Partial::Fr: values[j] = map.d_r(r, theta, eps); break;
      case Partial::Ftheta: values[j] = map.d_theta(r, theta, eps); break;
      case Partial::Frr: values[j] = map.d_rr(r, theta, eps); break;
      case Partial::Fthetar: values[j] = map.d_theta_r(r, theta, eps); break;
    }
  }
  return PeriodicFunction::from_samples(values, order);
}

PartialCheck check_partials(const ForcedMap& map, int points, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> ur(-3.0, 3.0), ut(0.0, kTwoPi),
      ue(0.0, 0.5);
  const double h = 1e-5;
  PartialCheck result;
  result.tolerance = 1e-6 * (1.0 + map.derivative_bound());
  for (int i = 0; i < points; ++i) {
    const double r = ur(rng), th = ut(rng), e = ue(rng);
    const double fd_r = (map.eval(r + h, th, e) - map.eval(r - h, th, e)) / (2 * h);
    const double fd_t = (map.eval(r, th + h, e) - map.eval(r, th - h, e)) / (2 * h);
    const double fd_rr = (map.d_r(r + h, th, e) - map.d_r(r - h, th, e)) / (2 * h);
    const double fd_tr = (map.d_theta(r + h, th, e) - map.d_theta(r - h, th, e)) / (2 * h);
    result.max_error = std::max({result.max_error,
                                 std::abs(fd_r - map.d_r(r, th, e)),
                                 std::abs(fd_t - map.d_theta(r, th, e)),
                                 std::abs(fd_rr - map.d_rr(r, th, e)),
                                 std::abs(fd_tr - map.d_theta_r(r, th, e))});
    if (map.periodic_in_r()) {
      result.periodicity_error =
          std::max(result.periodicity_error,
                   std::abs(map.eval(r + kTwoPi, th, e) - map.eval(r, th, e)));
    }
  }
  result.ok = result.max_error <= result.tolerance &&
              result.periodicity_error <= 1e-10;
  return result;
}

}  // namespace qpfc
