#pragma once

// Exact arithmetic used everywhere in the library: arbitrary-precision
// rationals and real numbers of the form  r + sum_k c_k * log2(B_k)
// (rational r, c_k, positive integer bases B_k).  Every entropy or
// density threshold is expressed in this form and compared exactly.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace qclift {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses "p", "p/q" or a finite decimal such as "0.25".
/// p/q in lowest terms.
Rational ratio(long p, long q);
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& value);
/// 12 significant digits, prefixed with '~' when the rendering is inexact.
std::string to_decimal(const Rational& value);

Rational pow2(long exponent);
Rational pow(const Rational& base, unsigned long exponent);
Integer lcm(const Integer& a, const Integer& b);

/// A real number  constant + sum_k coeff_k * log2(base_k).
///
/// Terms are kept normalized: bases are integers >= 3 that are not powers of
/// two (powers of two fold into the constant), bases are unique and sorted,
/// coefficients are nonzero.  Sign determination is exact: a double
/// approximation decides clear cases, and near-ties fall back to comparing
/// integer powers after clearing all denominators.
class LogReal {
 public:
  LogReal() = default;
  LogReal(const Rational& constant);  // NOLINT(google-explicit-constructor)
  LogReal(long constant) : LogReal(Rational(constant)) {}  // NOLINT

  /// log2(value) for a positive rational.
  static LogReal log2_of(const Rational& value);
  /// log2(value) for a positive integer.
  static LogReal log2_of(const Integer& value);

  const Rational& constant() const { return constant_; }
  const std::vector<std::pair<Integer, Rational>>& terms() const { return terms_; }
  bool is_rational() const { return terms_.empty(); }

  /// -1, 0 or +1.
  int sign() const;
  double approx() const;
  std::string to_string() const;

  LogReal& operator+=(const LogReal& other);
  LogReal& operator-=(const LogReal& other);
  LogReal& operator*=(const Rational& factor);

  friend LogReal operator+(LogReal a, const LogReal& b) { return a += b; }
  friend LogReal operator-(LogReal a, const LogReal& b) { return a -= b; }
  friend LogReal operator-(LogReal a) { return a *= Rational(-1); }
  friend LogReal operator*(LogReal a, const Rational& f) { return a *= f; }
  friend LogReal operator*(const Rational& f, LogReal a) { return a *= f; }
  friend LogReal operator/(LogReal a, const Rational& f) { return a *= Rational(1) / f; }

  friend std::strong_ordering operator<=>(const LogReal& a, const LogReal& b);
  friend bool operator==(const LogReal& a, const LogReal& b) { return (a - b).sign() == 0; }

 private:
  void add_term(const Integer& base, const Rational& coeff);

  Rational constant_{0};
  std::vector<std::pair<Integer, Rational>> terms_;
};

/// The value 2^(-bits); never materialized as a float.
struct DyadicThreshold {
  LogReal bits;
};

/// Sign of p - 2^(-q).  Writing q = a/d, this is the sign of p^d - 2^(-a).
std::strong_ordering compare_prob_to_threshold(const Rational& p, const Rational& q);
std::strong_ordering compare_prob_to_threshold(const Rational& p, const DyadicThreshold& t);

/// Sign of u * v - q when u and v involve at most one logarithm base
/// (r0 + r1 log2 B).  The quadratic in log2 B is bounded on a dyadic bracket
/// of width about 2^-17 around log2 B; nullopt when more bases occur or a root
/// lies inside the bracket.
std::optional<int> sign_of_product_minus(const LogReal& u, const LogReal& v, const Rational& q);

/// p <= 2^exponent, exactly.  p must be nonnegative.
bool le_pow2(const Rational& p, const LogReal& exponent);
/// p < 2^exponent, exactly.
bool lt_pow2(const Rational& p, const LogReal& exponent);

}  // namespace qclift
