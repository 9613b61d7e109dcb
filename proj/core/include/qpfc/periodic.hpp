// Real 2*pi-periodic functions stored as truncated Fourier series,
// with the calculus (derivative, primitive, rotation) and the Sobolev
// norms the translated-curve machinery needs.
#pragma once

#include <complex>
#include <vector>

namespace qpfc {

class Frequency;

/// A real-valued 2*pi-periodic function represented by its Fourier
/// coefficients u_n for |n| <= order. Coefficients satisfy the Hermitian
/// symmetry u_{-n} = conj(u_n); that invariant is enforced on construction
/// and preserved by every operation. Instances are immutable values: all
/// operations return new objects and are safe to use from parallel workers.
class PeriodicFunction {
 public:
  using Complex = std::complex<double>;

  /// The zero function with order 0.
  PeriodicFunction();

  static PeriodicFunction zero(int order);
  static PeriodicFunction constant(double value, int order = 0);

  /// Build from samples at the uniform grid theta_j = 2*pi*j/M, j = 0..M-1.
  /// Requires M >= 2*order+1 (anti-aliasing margin) and M >= 2.
  static PeriodicFunction from_samples(const std::vector<double>& values,
                                       int order);

  /// Build from a full coefficient table c[-order..order] (index n+order).
  /// The table is symmetrized: u_n <- (c_n + conj(c_{-n}))/2.
  static PeriodicFunction from_coefficients(std::vector<Complex> coeffs);

  int order() const { return order_; }

  /// u_n; zero for |n| > order.
  Complex coeff(int n) const;

  /// u_0 (real by symmetry).
  double mean() const;

  /// Pointwise value sum u_n e^{i n theta}.
  double eval(double theta) const;

  /// Values on the uniform grid theta_j = 2*pi*j/m.
  std::vector<double> sample(int m) const;

  PeriodicFunction derivative() const;

  /// Primitive with zero mean; requires |mean()| <= 1e-12.
  PeriodicFunction zero_mean_primitive() const;

  /// theta -> theta + 2*pi*rotations. Unitary on every Sobolev norm.
  PeriodicFunction shifted(double rotations) const;
  PeriodicFunction shifted(const Frequency& alpha) const;

  /// Copy truncated (or zero-padded) to the given order.
  PeriodicFunction truncated(int order) const;

  /// k = 0: L2 norm sqrt(2*pi sum |u_n|^2);
  /// k = 1: sqrt(2*pi sum |n|^2 |u_n|^2) = ||Du||_{L2};
  /// k = 2: sqrt(2*pi sum |n|^4 |u_n|^2) = ||D^2 u||_{L2}.
  double sobolev_norm(int k) const;

  /// sum |u_n| >= sup |u|; a rigorous uniform bound.
  double sup_norm_bound() const;

  /// Energy in modes |n| > order/2 as a fraction of the total (diagnostic).
  double tail_energy_fraction() const;

  PeriodicFunction& operator+=(const PeriodicFunction& g);
  PeriodicFunction& operator-=(const PeriodicFunction& g);
  PeriodicFunction& operator*=(double s);
  PeriodicFunction& operator+=(double c);

 private:
  int order_;
  std::vector<Complex> coeffs_;  // index n + order_

  void symmetrize();
};

PeriodicFunction operator+(PeriodicFunction f, const PeriodicFunction& g);
PeriodicFunction operator-(PeriodicFunction f, const PeriodicFunction& g);
PeriodicFunction operator*(double s, PeriodicFunction f);
PeriodicFunction operator+(PeriodicFunction f, double c);
PeriodicFunction operator-(PeriodicFunction f);

/// Exact coefficient convolution; result order is the sum of the bandwidths.
PeriodicFunction product(const PeriodicFunction& f, const PeriodicFunction& g);

/// Mean of f*g computed in coefficient space: sum conj(f_n) g_n (real).
double inner_mean(const PeriodicFunction& f, const PeriodicFunction& g);

}  // namespace qpfc
