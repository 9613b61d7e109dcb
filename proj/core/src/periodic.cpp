#include "qpfc/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dft.hpp"
#include "qpfc/errors.hpp"
#include "qpfc/frequency.hpp"

namespace qpfc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kImagResidueTol = 1e-13;
constexpr double kPrimitiveMeanTol = 1e-12;
}  // namespace

PeriodicFunction::PeriodicFunction() : order_(0), coeffs_(1, Complex(0.0)) {}

PeriodicFunction PeriodicFunction::zero(int order) {
  PeriodicFunction f;
  f.order_ = std::max(order, 0);
  f.coeffs_.assign(2 * f.order_ + 1, Complex(0.0));
  return f;
}

PeriodicFunction PeriodicFunction::constant(double value, int order) {
  PeriodicFunction f = zero(order);
  f.coeffs_[f.order_] = value;
  return f;
}

PeriodicFunction PeriodicFunction::from_samples(
    const std::vector<double>& values, int order) {
  if (values.size() < 2) throw PreconditionError("from_samples: invalid grid (need M >= 2)");
  if (order < 0) throw PreconditionError("from_samples: negative order");
  if (static_cast<int>(values.size()) < 2 * order + 1)
    throw PreconditionError("from_samples: grid must satisfy M >= 2*order+1");
  PeriodicFunction f = zero(order);
  f.coeffs_ = detail::analyze(values, order);
  f.symmetrize();
  return f;
}

PeriodicFunction PeriodicFunction::from_coefficients(std::vector<Complex> coeffs) {
  if (coeffs.empty() || coeffs.size() % 2 == 0)
    throw PreconditionError("from_coefficients: table must have odd length 2N+1");
  PeriodicFunction f;
  f.order_ = static_cast<int>(coeffs.size() / 2);
  f.coeffs_ = std::move(coeffs);
  f.symmetrize();
  return f;
}

void PeriodicFunction::symmetrize() {
  // Force u_{-n} = conj(u_n) exactly; real input only carries rounding-level
  // asymmetry (below 1e-13), which this projects out.
  for (int n = 1; n <= order_; ++n) {
    const Complex avg =
        0.5 * (coeffs_[order_ + n] + std::conj(coeffs_[order_ - n]));
    coeffs_[order_ + n] = avg;
    coeffs_[order_ - n] = std::conj(avg);
  }
  if (std::abs(coeffs_[order_].imag()) > kImagResidueTol)
    throw PreconditionError("coefficients do not describe a real function");
  coeffs_[order_] = Complex(coeffs_[order_].real(), 0.0);
}

PeriodicFunction::Complex PeriodicFunction::coeff(int n) const {
  if (n < -order_ || n > order_) return Complex(0.0);
  return coeffs_[n + order_];
}

double PeriodicFunction::mean() const { return coeffs_[order_].real(); }

double PeriodicFunction::eval(double theta) const {
  // u_0 + 2 Re sum_{n>=1} u_n e^{i n theta}; the imaginary part vanishes by
  // symmetry so it is never formed.
  double acc = coeffs_[order_].real();
  for (int n = 1; n <= order_; ++n) {
    const Complex rot = std::polar(1.0, n * theta);
    const Complex& c = coeffs_[order_ + n];
    acc += 2.0 * (c.real() * rot.real() - c.imag() * rot.imag());
  }
  return acc;
}

std::vector<double> PeriodicFunction::sample(int m) const {
  if (m < 1) throw PreconditionError("sample: need m >= 1");
  if (m >= 2 * order_ + 1) return detail::synthesize(coeffs_, m);
  std::vector<double> values(m);
  for (int j = 0; j < m; ++j) values[j] = eval(kTwoPi * j / m);
  return values;
}

PeriodicFunction PeriodicFunction::derivative() const {
  PeriodicFunction g = *this;
  for (int n = -order_; n <= order_; ++n)
    g.coeffs_[n + order_] *= Complex(0.0, n);
  return g;
}

PeriodicFunction PeriodicFunction::zero_mean_primitive() const {
  if (std::abs(mean()) > kPrimitiveMeanTol)
    throw PreconditionError("zero_mean_primitive: input has nonzero mean");
  PeriodicFunction g = *this;
  g.coeffs_[order_] = Complex(0.0);
  for (int n = -order_; n <= order_; ++n) {
    if (n == 0) continue;
    g.coeffs_[n + order_] /= Complex(0.0, n);
  }
  return g;
}

PeriodicFunction PeriodicFunction::shifted(double rotations) const {
  PeriodicFunction g = *this;
  for (int n = -order_; n <= order_; ++n)
    g.coeffs_[n + order_] *= std::polar(1.0, kTwoPi * n * rotations);
  return g;
}

PeriodicFunction PeriodicFunction::shifted(const Frequency& alpha) const {
  return shifted(alpha.value());
}

PeriodicFunction PeriodicFunction::truncated(int order) const {
  if (order < 0) throw PreconditionError("truncated: negative order");
  PeriodicFunction g = zero(order);
  const int keep = std::min(order, order_);
  for (int n = -keep; n <= keep; ++n) g.coeffs_[n + order] = coeff(n);
  return g;
}

double PeriodicFunction::sobolev_norm(int k) const {
  if (k < 0 || k > 2) throw PreconditionError("sobolev_norm: k must be 0, 1 or 2");
  double acc = 0.0;
  for (int n = -order_; n <= order_; ++n) {
    double w = 1.0;
    const double nn = static_cast<double>(n) * n;
    if (k == 1) w = nn;
    if (k == 2) w = nn * nn;
    acc += w * std::norm(coeffs_[n + order_]);
  }
  return std::sqrt(kTwoPi * acc);
}

double PeriodicFunction::sup_norm_bound() const {
  double acc = 0.0;
  for (const Complex& c : coeffs_) acc += std::abs(c);
  return acc;
}

double PeriodicFunction::tail_energy_fraction() const {
  double total = 0.0, tail = 0.0;
  for (int n = -order_; n <= order_; ++n) {
    const double e = std::norm(coeffs_[n + order_]);
    total += e;
    if (2 * std::abs(n) > order_) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

PeriodicFunction& PeriodicFunction::operator+=(const PeriodicFunction& g) {
  if (g.order_ > order_) *this = truncated(g.order_);
  for (int n = -g.order_; n <= g.order_; ++n)
    coeffs_[n + order_] += g.coeffs_[n + g.order_];
  return *this;
}

PeriodicFunction& PeriodicFunction::operator-=(const PeriodicFunction& g) {
  if (g.order_ > order_) *this = truncated(g.order_);
  for (int n = -g.order_; n <= g.order_; ++n)
    coeffs_[n + order_] -= g.coeffs_[n + g.order_];
  return *this;
}

PeriodicFunction& PeriodicFunction::operator*=(double s) {
  for (Complex& c : coeffs_) c *= s;
  return *this;
}

PeriodicFunction& PeriodicFunction::operator+=(double c) {
  coeffs_[order_] += c;
  return *this;
}

PeriodicFunction operator+(PeriodicFunction f, const PeriodicFunction& g) {
  f += g;
  return f;
}

PeriodicFunction operator-(PeriodicFunction f, const PeriodicFunction& g) {
  f -= g;
  return f;
}

PeriodicFunction operator*(double s, PeriodicFunction f) {
  f *= s;
  return f;
}

PeriodicFunction operator+(PeriodicFunction f, double c) {
  f += c;
  return f;
}

PeriodicFunction operator-(PeriodicFunction f) {
  f *= -1.0;
  return f;
}

PeriodicFunction product(const PeriodicFunction& f, const PeriodicFunction& g) {
  const int order = f.order() + g.order();
  std::vector<PeriodicFunction::Complex> conv(2 * order + 1,
                                              PeriodicFunction::Complex(0.0));
  for (int a = -f.order(); a <= f.order(); ++a) {
    const auto fa = f.coeff(a);
    if (fa == PeriodicFunction::Complex(0.0)) continue;
    for (int b = -g.order(); b <= g.order(); ++b)
      conv[a + b + order] += fa * g.coeff(b);
  }
  return PeriodicFunction::from_coefficients(std::move(conv));
}

double inner_mean(const PeriodicFunction& f, const PeriodicFunction& g) {
  const int k = std::min(f.order(), g.order());
  double acc = 0.0;
  for (int n = -k; n <= k; ++n)
    acc += (std::conj(f.coeff(n)) * g.coeff(n)).real();
  return acc;
}

}  // namespace qpfc
