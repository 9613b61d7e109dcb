#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qpfc/bifurcation.hpp"
#include "qpfc/errors.hpp"
#include "test_util.hpp"

using namespace qpfc;
using namespace qpfc_test;

namespace {

BifurcationOptions small_bif(int modes = 64) {
  BifurcationOptions o;
  o.curve.modes = modes;
  o.samples_per_period = 64;
  return o;
}

double bessel_amp(double b0, const Frequency& alpha) {
  const double a = b0 / (2.0 * std::sin(std::numbers::pi * alpha.value()));
  return std::cyl_bessel_j(0.0, std::abs(a));
}

}  // namespace

TEST_CASE("phi: zero map, linear map, r-free map") {
  const Frequency golden = Frequency::golden();
  CurveOptions copts;
  copts.modes = 32;

  const ForcedMap zero = builtin_theta_forcing(PeriodicFunction::zero(2));
  CHECK(std::abs(phi(zero, 0.1, golden, 0.7, copts)) < 1e-13);

  const ForcedMap lin = builtin_linear_test(cosine(1));
  for (double c : {-0.8, 0.0, 1.3}) {
    CHECK(phi(lin, 0.1, golden, c, copts) == doctest::Approx(-c).epsilon(1e-11));
  }

  std::mt19937 rng(3);
  const PeriodicFunction p = random_trig(rng, 4, 1.0, 0.6);
  const ForcedMap rfree = builtin_theta_forcing(p);
  for (double c : {-1.0, 0.4}) {
    CHECK(phi(rfree, 0.05, golden, c, copts) ==
          doctest::Approx(p.mean()).epsilon(1e-11));
  }
}

TEST_CASE("phi0: closed Bessel form for the transformed Arnold map") {
  const Frequency golden = Frequency::golden();
  const double b0 = 1.0, omega1 = 0.12;
  const ForcedMap m = builtin_transformed_arnold(omega1, b0, 0.4, golden);
  const double j0 = bessel_amp(b0, golden);
  for (double c : {0.0, 0.9, -2.1}) {
    CHECK(phi0(m, c) == doctest::Approx(omega1 + j0 * std::sin(c)).epsilon(1e-12));
  }
  CHECK(phi0(builtin_theta_forcing(PeriodicFunction::zero(2)), 0.3) == 0.0);
}

TEST_CASE("phi converges to phi0 at first order in eps") {
  const Frequency golden = Frequency::golden();
  const ForcedMap m = builtin_transformed_arnold(0.12, 1.0, 0.4, golden);
  CurveOptions copts;
  copts.modes = 64;
  auto gap = [&](double eps) {
    double worst = 0.0;
    for (double c : {0.0, 0.9, -2.1})
      worst = std::max(worst, std::abs(phi(m, eps, golden, c, copts) - phi0(m, c)));
    return worst;
  };
  const double g1 = gap(0.02), g2 = gap(0.01);
  CHECK(g1 / g2 > 1.5);
  CHECK(g1 / g2 < 2.5);
}

TEST_CASE("lambda = -eps Phi consistency across random levels") {
  const Frequency golden = Frequency::golden();
  const ForcedMap m = builtin_transformed_arnold(0.1, 1.0, 0.3, golden);
  CurveOptions copts;
  copts.modes = 64;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uc(-3.0, 3.0), ue(0.01, 0.08);
  for (int rep = 0; rep < 20; ++rep) {
    const double c = uc(rng), eps = ue(rng);
    const TranslatedCurve curve = translated_curve(m, eps, golden, c, copts);
    REQUIRE(curve.converged);
    const double p = phi(m, eps, golden, c, copts);
    CHECK(curve.lambda == doctest::Approx(-eps * p).epsilon(1e-8));
  }
}

TEST_CASE("find_invariant_curves: linear map has the closed-form root") {
  const Frequency golden = Frequency::golden();
  const ForcedMap m = builtin_linear_test(cosine(1));
  for (double eps : {0.05, 0.2}) {
    const BifurcationReport report =
        find_invariant_curves(m, eps, golden, -1.0, 1.0, small_bif(32));
    REQUIRE(report.roots.size() == 1);
    const InvariantCurveRoot& root = report.roots[0];
    CHECK(std::abs(root.c_star) < 1e-10);
    CHECK(root.phi_prime == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(root.chi_plus == doctest::Approx(std::log(1.0 - eps)).epsilon(1e-10));
    CHECK(root.classification == "attractor");
    CHECK(std::abs(root.lambda) <= eps * 1e-10 + 1e-14);
  }
}

TEST_CASE("find_invariant_curves: attractor/repeller pair of the circle map") {
  const Frequency golden = Frequency::golden();
  const ForcedMap m = builtin_transformed_arnold(0.0, 1.0, 0.3, golden);
  const double eps = 0.01;
  const BifurcationReport report = find_invariant_curves(
      m, eps, golden, -0.5, std::numbers::pi + 0.5, small_bif(64));
  REQUIRE(report.roots.size() == 2);
  // Phi0 = J0(A) sin c with J0(A) > 0: root near 0 is a repeller
  // (Phi0' > 0), root near pi an attractor.
  CHECK(std::abs(report.roots[0].c_star) < 0.05);
  CHECK(std::abs(report.roots[1].c_star - std::numbers::pi) < 0.05);
  CHECK(report.roots[0].classification == "repeller");
  CHECK(report.roots[1].classification == "attractor");
  CHECK(report.roots[0].chi_plus > 0.0);
  CHECK(report.roots[1].chi_plus < 0.0);
}

TEST_CASE("find_invariant_curves: no roots when omega1 exceeds the amplitude") {
  const Frequency golden = Frequency::golden();
  const double j0 = bessel_amp(1.0, golden);
  const ForcedMap m = builtin_transformed_arnold(j0 + 0.2, 1.0, 0.3, golden);
  const BifurcationReport report = find_invariant_curves(
      m, 0.01, golden, 0.0, kTwoPi, small_bif(64));
  CHECK(report.roots.empty());
}

TEST_CASE("Phi is 2 pi periodic in c for circle maps") {
  const Frequency golden = Frequency::golden();
  const ForcedMap m = builtin_transformed_arnold(0.1, 1.0, 0.3, golden);
  CurveOptions copts;
  copts.modes = 64;
  for (double c : {0.3, -1.2}) {
    CHECK(phi(m, 0.05, golden, c + kTwoPi, copts) ==
          doctest::Approx(phi(m, 0.05, golden, c, copts)).epsilon(1e-10));
  }
}

TEST_CASE("Newton derivative matches the secant slope near a root") {
  const Frequency golden = Frequency::golden();
  const ForcedMap m = builtin_transformed_arnold(0.0, 1.0, 0.3, golden);
  const double eps = 0.02;
  const BifurcationReport report = find_invariant_curves(
      m, eps, golden, 2.5, 3.8, small_bif(64));
  REQUIRE(report.roots.size() == 1);
  const double c0 = report.roots[0].c_star;
  CurveOptions copts;
  copts.modes = 64;
  const double h = 1e-4;
  const double secant =
      (phi(m, eps, golden, c0 + h, copts) - phi(m, eps, golden, c0 - h, copts)) /
      (2 * h);
  CHECK(report.roots[0].phi_prime == doctest::Approx(secant).epsilon(1e-4));
}

TEST_CASE("mode-lock interval: non-periodic maps are rejected") {
  const Frequency golden = Frequency::golden();
  CHECK_THROWS_AS(
      mode_lock_interval(builtin_linear_test(cosine(1)), 0.05, golden, small_bif(32)),
      PreconditionError);
}

TEST_CASE("mode-lock interval: Bessel amplitude at small eps") {
  const Frequency golden = Frequency::golden();
  const double b0 = 1.0;
  const ForcedMap base = builtin_transformed_arnold(0.0, b0, 0.3, golden);
  const double j0 = std::abs(bessel_amp(b0, golden));
  BifurcationOptions opts = small_bif(64);
  opts.samples_per_period = 128;
  const ModeLockResult ml = mode_lock_interval(base, 1e-3, golden, opts);
  CHECK(std::abs(ml.omega_hi - j0) <= 0.05 * j0);
  CHECK(std::abs(ml.omega_lo + j0) <= 0.05 * j0);
  CHECK(ml.midpoint_roots >= 2);
}

TEST_CASE("mode-lock interval: pure sin r forcing gives [-1, 1]") {
  const Frequency golden = Frequency::golden();
  const ForcedMap base = map_from_expression("sin(r)", true);
  const ModeLockResult ml = mode_lock_interval(base, 1e-3, golden, small_bif(32));
  CHECK(ml.omega_lo == doctest::Approx(-1.0).epsilon(0.01));
  CHECK(ml.omega_hi == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("intervals I_N: only N = 0 is reachable at small eps") {
  const Frequency golden = Frequency::golden();
  const ForcedMap base = builtin_transformed_arnold(0.0, 1.0, 0.3, golden);
  BifurcationOptions opts = small_bif(64);
  opts.samples_per_period = 128;
  const IntervalsINResult res =
      intervals_IN(base, 1e-3, golden, -2, 2, 10.0, opts);
  REQUIRE(res.intervals.size() == 5);
  CHECK(!res.overlap_warning);
  const ModeLockResult ml = mode_lock_interval(base, 1e-3, golden, opts);
  for (const IntervalIN& iv : res.intervals) {
    if (iv.n == 0) {
      CHECK(iv.in_window);
      CHECK(iv.lo == doctest::Approx(ml.omega_lo).epsilon(1e-9));
      CHECK(iv.hi == doctest::Approx(ml.omega_hi).epsilon(1e-9));
    } else {
      CHECK(!iv.in_window);
    }
  }
}

TEST_CASE("intervals I_N: zero forcing degenerates to the origin") {
  const Frequency golden = Frequency::golden();
  const ForcedMap zero = builtin_theta_forcing(PeriodicFunction::zero(2));
  BifurcationOptions opts = small_bif(16);
  opts.samples_per_period = 16;
  const IntervalsINResult res = intervals_IN(zero, 0.05, golden, -1, 1, 5.0, opts);
  for (const IntervalIN& iv : res.intervals) {
    if (iv.n == 0) {
      CHECK(std::abs(iv.lo) < 1e-12);
      CHECK(std::abs(iv.hi) < 1e-12);
    } else {
      CHECK(!iv.in_window);
    }
  }
}
