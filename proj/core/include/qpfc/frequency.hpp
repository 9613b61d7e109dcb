// Rotation-number arithmetic: continued fractions, constant-type margins,
// and lower bounds on the small divisors |e^{2 pi i n alpha} - 1|.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qpfc {

enum class FrequencyKind { ExactQuadratic, Float, Rational };

struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 1;
};

struct ContinuedFraction {
  std::vector<std::int64_t> quotients;   // a_1, a_2, ... for x in (0,1)
  std::vector<Convergent> convergents;   // p_k/q_k aligned with quotients
  bool terminated = false;               // expansion ended (rational input or
                                         // a quotient past 1e12)
};

/// Standard continued-fraction expansion of x in (0,1). Stops early when a
/// quotient exceeds 1e12 (the float is effectively rational) or a convergent
/// denominator would overflow. Requires depth >= 1.
ContinuedFraction continued_fraction(double x, int depth);

/// A rotation number alpha in (0,1) together with its arithmetic data:
/// the continued fraction, and the constant-type margin delta such that
/// |alpha - p/q| >= delta/q^2 for every rational p/q. For the quadratic
/// builtins delta is exact; for float inputs it is the empirical minimum of
/// q_k^2 |alpha - p_k/q_k| over the computed convergents and carries a
/// non-rigorous flag. Immutable value type.
class Frequency {
 public:
  /// (sqrt(5)-1)/2 = [0; 1, 1, 1, ...]; delta = (3-sqrt(5))/2, attained q=1.
  static Frequency golden();

  /// sqrt(2)-1 = [0; 2, 2, 2, ...]; delta = 6-4*sqrt(2), attained at q=2.
  static Frequency sqrt2_minus_1();

  static Frequency rational(std::int64_t p, std::int64_t q);

  static Frequency from_double(double alpha, int cf_depth = 32);

  /// Parse "golden", "sqrt2m1", "p/q" or a decimal literal.
  static Frequency parse(const std::string& text);

  double value() const { return value_; }
  FrequencyKind kind() const { return kind_; }
  const ContinuedFraction& cf() const { return cf_; }

  double delta() const { return delta_; }
  bool delta_rigorous() const { return delta_rigorous_; }

  /// Lemma-style constant mu with |e^{2 pi i n alpha} - 1| >= 1/(mu |n|).
  double mu() const { return 1.0 / (4.0 * delta_); }

  bool is_rational() const { return kind_ == FrequencyKind::Rational; }
  std::int64_t numerator() const;    // Rational only
  std::int64_t denominator() const;  // Rational only

  std::string describe() const;

 private:
  Frequency() = default;

  FrequencyKind kind_ = FrequencyKind::Float;
  double value_ = 0.0;
  double delta_ = 0.0;
  bool delta_rigorous_ = false;
  ContinuedFraction cf_;
  std::int64_t num_ = 0, den_ = 1;
  std::string label_;
};

/// Positive lower bound on |e^{2 pi i n alpha} - 1|. For constant-type alpha
/// with rigorous delta this is the bound 4*delta/|n| (from |sin(pi x)| >=
/// 2*dist(x, Z)); for float alpha it is the directly computed divisor with no
/// rigor claim; for rational alpha it is exact, and n a multiple of the
/// denominator raises ResonanceError.
double divisor_bound(const Frequency& alpha, std::int64_t n);

}  // namespace qpfc
