#include "qpfc/frequency.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qpfc/errors.hpp"

namespace qpfc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuotientCutoff = 1e12;
constexpr std::int64_t kDenominatorCap = 1'000'000'000'000'000LL;  // 1e15

// Periodic-quotient expansion [0; a, a, a, ...] up to the denominator cap.
ContinuedFraction periodic_cf(std::int64_t a, int depth) {
  ContinuedFraction cf;
  std::int64_t pm1 = 1, qm1 = 0, p0 = 0, q0 = 1;
  for (int k = 0; k < depth; ++k) {
    const std::int64_t p = a * p0 + pm1;
    const std::int64_t q = a * q0 + qm1;
    if (q > kDenominatorCap) break;
    cf.quotients.push_back(a);
    cf.convergents.push_back({p, q});
    pm1 = p0;
    qm1 = q0;
    p0 = p;
    q0 = q;
  }
  return cf;
}

}  // namespace

ContinuedFraction continued_fraction(double x, int depth) {
  if (depth < 1) throw PreconditionError("continued_fraction: depth must be >= 1");
  if (!(x > 0.0 && x < 1.0))
    throw PreconditionError("continued_fraction: x must lie in (0,1)");
  ContinuedFraction cf;
  // Long double throughout: the expansion loses one quotient's worth of
  // precision per step.
  long double y = x;
  std::int64_t pm1 = 1, qm1 = 0, p0 = 0, q0 = 1;
  for (int k = 0; k < depth; ++k) {
    y = 1.0L / y;
    const long double af = std::floor(y);
    if (!(af >= 1.0L) || af > kQuotientCutoff) {
      cf.terminated = true;  // effectively rational at float precision
      break;
    }
    const std::int64_t a = static_cast<std::int64_t>(af);
    const std::int64_t p = a * p0 + pm1;
    const std::int64_t q = a * q0 + qm1;
    if (q > kDenominatorCap) break;
    cf.quotients.push_back(a);
    cf.convergents.push_back({p, q});
    pm1 = p0;
    qm1 = q0;
    p0 = p;
    q0 = q;
    y -= af;
    if (y <= 0.0L) {
      cf.terminated = true;  // exact rational
      break;
    }
  }
  return cf;
}

Frequency Frequency::golden() {
  Frequency f;
  f.kind_ = FrequencyKind::ExactQuadratic;
  f.value_ = (std::sqrt(5.0) - 1.0) / 2.0;
  // q^2 |alpha - p/q| is minimized at q = 1: delta = 1 - alpha = (3-sqrt5)/2.
  f.delta_ = (3.0 - std::sqrt(5.0)) / 2.0;
  f.delta_rigorous_ = true;
  f.cf_ = periodic_cf(1, 40);
  f.label_ = "golden";
  return f;
}

Frequency Frequency::sqrt2_minus_1() {
  Frequency f;
  f.kind_ = FrequencyKind::ExactQuadratic;
  f.value_ = std::sqrt(2.0) - 1.0;
  // Minimum of q_k ||q_k alpha|| sits at q = 2: delta = 2(2 sqrt2 - 2 - ...)
  // = 6 - 4 sqrt2.
  f.delta_ = 6.0 - 4.0 * std::sqrt(2.0);
  f.delta_rigorous_ = true;
  f.cf_ = periodic_cf(2, 30);
  f.label_ = "sqrt2m1";
  return f;
}

Frequency Frequency::rational(std::int64_t p, std::int64_t q) {
  if (q <= 0) throw PreconditionError("rational frequency: q must be positive");
  if (p < 0 || p >= q)
    throw PreconditionError("rational frequency: need 0 <= p < q");
  const std::int64_t g = std::gcd(p, q);
  Frequency f;
  f.kind_ = FrequencyKind::Rational;
  f.num_ = p / std::max<std::int64_t>(g, 1);
  f.den_ = q / std::max<std::int64_t>(g, 1);
  f.value_ = static_cast<double>(f.num_) / static_cast<double>(f.den_);
  f.delta_ = 0.0;
  f.delta_rigorous_ = false;
  if (f.value_ > 0.0 && f.value_ < 1.0)
    f.cf_ = continued_fraction(f.value_, 40);
  std::ostringstream os;
  os << f.num_ << "/" << f.den_;
  f.label_ = os.str();
  return f;
}

Frequency Frequency::from_double(double alpha, int cf_depth) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw PreconditionError("frequency: alpha must lie in (0,1)");
  Frequency f;
  f.kind_ = FrequencyKind::Float;
  f.value_ = alpha;
  f.cf_ = continued_fraction(alpha, cf_depth);
  // Empirical margin: min over computed convergents of q^2 |alpha - p/q|.
  // Convergents at the rounding floor are skipped: a double is rational, so
  // its expansion eventually "resolves" it exactly and q|q alpha - p| would
  // collapse to zero there.
  long double best = 1.0L - static_cast<long double>(alpha);  // q = 1 term
  best = std::min(best, static_cast<long double>(alpha));
  for (const Convergent& c : f.cf_.convergents) {
    const long double err =
        std::fabs(static_cast<long double>(c.q) * alpha - c.p);
    if (err <= 1e-14L) break;
    best = std::min(best, static_cast<long double>(c.q) * err);
  }
  f.delta_ = static_cast<double>(best);
  f.delta_rigorous_ = false;
  std::ostringstream os;
  os.precision(17);
  os << alpha;
  f.label_ = os.str();
  return f;
}

Frequency Frequency::parse(const std::string& text) {
  if (text == "golden") return golden();
  if (text == "sqrt2m1") return sqrt2_minus_1();
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const std::int64_t p = std::stoll(text.substr(0, slash));
    const std::int64_t q = std::stoll(text.substr(slash + 1));
    return rational(p, q);
  }
  size_t used = 0;
  const double x = std::stod(text, &used);
  if (used != text.size())
    throw PreconditionError("frequency: cannot parse '" + text + "'");
  return from_double(x);
}

std::int64_t Frequency::numerator() const {
  if (kind_ != FrequencyKind::Rational)
    throw PreconditionError("numerator: frequency is not rational");
  return num_;
}

std::int64_t Frequency::denominator() const {
  if (kind_ != FrequencyKind::Rational)
    throw PreconditionError("denominator: frequency is not rational");
  return den_;
}

std::string Frequency::describe() const {
  std::ostringstream os;
  os << label_ << " (";
  switch (kind_) {
    case FrequencyKind::ExactQuadratic:
      os << "exact quadratic, delta=" << delta_;
      break;
    case FrequencyKind::Float:
      os << "float, empirical delta=" << delta_ << " NON-RIGOROUS";
      break;
    case FrequencyKind::Rational:
      os << "rational";
      break;
  }
  os << ")";
  return os.str();
}

double divisor_bound(const Frequency& alpha, std::int64_t n) {
  if (n == 0) throw PreconditionError("divisor_bound: n must be nonzero");
  const std::int64_t an = std::llabs(n);
  if (alpha.is_rational()) {
    if ((alpha.numerator() * an) % alpha.denominator() == 0)
      throw ResonanceError("divisor_bound: exact resonance at n = " +
                           std::to_string(n));
    // Exact value: 2 |sin(pi n p/q)| with n p/q reduced mod 1.
    const std::int64_t rem = (alpha.numerator() * an) % alpha.denominator();
    return 2.0 * std::abs(std::sin(kPi * static_cast<double>(rem) /
                                   static_cast<double>(alpha.denominator())));
  }
  if (alpha.kind() == FrequencyKind::ExactQuadratic) {
    // dist(n alpha, Z) >= delta/|n| and |sin(pi x)| >= 2 dist(x, Z).
    return 4.0 * alpha.delta() / static_cast<double>(an);
  }
  // Float kind: directly computed divisor; no rigor claimed.
  const double x = static_cast<double>(an) * alpha.value();
  const double frac = x - std::floor(x);
  return 2.0 * std::abs(std::sin(kPi * frac));
}

}  // namespace qpfc
