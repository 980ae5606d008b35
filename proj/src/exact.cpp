#include "qclift/exact.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "qclift/error.hpp"

namespace qclift {

namespace {

double log2_integer(const Integer& value) {
  long exponent = 0;
  double mantissa = mpz_get_d_2exp(&exponent, value.get_mpz_t());
  return std::log2(mantissa) + static_cast<double>(exponent);
}

double rational_to_double(const Rational& value) {
  if (value == 0) return 0.0;
  long num_exp = 0;
  long den_exp = 0;
  double num = mpz_get_d_2exp(&num_exp, value.get_num_mpz_t());
  double den = mpz_get_d_2exp(&den_exp, value.get_den_mpz_t());
  return std::ldexp(num / den, static_cast<int>(num_exp - den_exp));
}

bool is_power_of_two(const Integer& value, unsigned long* exponent) {
  if (value <= 0) return false;
  unsigned long bits = mpz_sizeinbase(value.get_mpz_t(), 2) - 1;
  if (mpz_scan1(value.get_mpz_t(), 0) != bits) return false;
  *exponent = bits;
  return true;
}

Integer integer_power(const Integer& base, const Integer& exponent) {
  if (!exponent.fits_ulong_p() || exponent > 1'000'000'000UL) {
    throw Error("exact comparison exponent too large to clear");
  }
  Integer result;
  mpz_pow_ui(result.get_mpz_t(), base.get_mpz_t(), exponent.get_ui());
  return result;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw ParseError("empty rational");
  auto dot = text.find('.');
  if (dot != std::string::npos) {
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t frac_len = text.size() - dot - 1;
    Rational value;
    try {
      value = Rational(Integer(digits.empty() || digits == "-" ? digits + "0" : digits, 10),
                       Integer(1));
    } catch (const std::invalid_argument&) {
      throw ParseError("malformed decimal '" + text + "'");
    }
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac_len);
    value /= scale;
    value.canonicalize();
    return value;
  }
  Rational value;
  if (value.set_str(text, 10) != 0) throw ParseError("malformed rational '" + text + "'");
  if (value.get_den() == 0) throw ParseError("zero denominator in '" + text + "'");
  value.canonicalize();
  return value;
}

Rational ratio(long p, long q) {
  if (q == 0) throw Error("zero denominator");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& value) { return value.get_str(); }

std::string to_decimal(const Rational& value) {
  std::ostringstream out;
  out << std::setprecision(12) << rational_to_double(value);
  std::string text = out.str();
  // Exact iff the denominator is 2^a 5^b and the rendering round-trips.
  bool exact = false;
  try {
    exact = parse_rational(text) == value;
  } catch (const ParseError&) {
    exact = false;
  }
  return exact ? text : "~" + text;
}

Rational pow2(long exponent) {
  Integer p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(std::labs(exponent)));
  return exponent >= 0 ? Rational(p) : Rational(Integer(1), p);
}

Rational pow(const Rational& base, unsigned long exponent) {
  Integer num;
  Integer den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  Rational result(num, den);
  result.canonicalize();
  return result;
}

Integer lcm(const Integer& a, const Integer& b) {
  Integer result;
  mpz_lcm(result.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return result;
}

LogReal::LogReal(const Rational& constant) : constant_(constant) {}

LogReal LogReal::log2_of(const Integer& value) {
  if (value <= 0) throw Error("log2 of a nonpositive value");
  LogReal result;
  result.add_term(value, Rational(1));
  return result;
}

LogReal LogReal::log2_of(const Rational& value) {
  if (value <= 0) throw Error("log2 of a nonpositive value");
  LogReal result;
  result.add_term(value.get_num(), Rational(1));
  result.add_term(value.get_den(), Rational(-1));
  return result;
}

void LogReal::add_term(const Integer& base, const Rational& coeff) {
  if (coeff == 0 || base == 1) return;
  unsigned long two_exp = 0;
  if (is_power_of_two(base, &two_exp)) {
    constant_ += coeff * Rational(static_cast<long>(two_exp));
    return;
  }
  auto it = std::lower_bound(terms_.begin(), terms_.end(), base,
                             [](const auto& term, const Integer& b) { return term.first < b; });
  if (it != terms_.end() && it->first == base) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  } else {
    terms_.insert(it, {base, coeff});
  }
}

LogReal& LogReal::operator+=(const LogReal& other) {
  constant_ += other.constant_;
  for (const auto& [base, coeff] : other.terms_) add_term(base, coeff);
  return *this;
}

LogReal& LogReal::operator-=(const LogReal& other) {
  constant_ -= other.constant_;
  for (const auto& [base, coeff] : other.terms_) add_term(base, -coeff);
  return *this;
}

LogReal& LogReal::operator*=(const Rational& factor) {
  if (factor == 0) {
    constant_ = 0;
    terms_.clear();
    return *this;
  }
  constant_ *= factor;
  for (auto& term : terms_) term.second *= factor;
  return *this;
}

double LogReal::approx() const {
  double total = rational_to_double(constant_);
  for (const auto& [base, coeff] : terms_) total += rational_to_double(coeff) * log2_integer(base);
  return total;
}

int LogReal::sign() const {
  if (terms_.empty()) return sgn(constant_);

  double total = rational_to_double(constant_);
  double magnitude = std::fabs(total);
  for (const auto& [base, coeff] : terms_) {
    double term = rational_to_double(coeff) * log2_integer(base);
    total += term;
    magnitude += std::fabs(term);
  }
  double tolerance = 1e-9 * (1.0 + magnitude);
  if (total > tolerance) return 1;
  if (total < -tolerance) return -1;

  // Near-tie: compare 2^(a*D) * prod B^(c*D) against 1 in integers.
  Integer denom = constant_.get_den();
  for (const auto& term : terms_) denom = lcm(denom, term.second.get_den());
  Integer lhs = 1;
  Integer rhs = 1;
  auto accumulate = [&](const Integer& base, const Rational& coeff) {
    Rational scaled = coeff * Rational(denom);
    Integer exponent = scaled.get_num();
    if (exponent > 0) {
      lhs *= integer_power(base, exponent);
    } else if (exponent < 0) {
      rhs *= integer_power(base, Integer(-exponent));
    }
  };
  accumulate(Integer(2), constant_);
  for (const auto& [base, coeff] : terms_) accumulate(base, coeff);
  return cmp(lhs, rhs) > 0 ? 1 : (cmp(lhs, rhs) < 0 ? -1 : 0);
}

std::string LogReal::to_string() const {
  std::string out = constant_.get_str();
  for (const auto& [base, coeff] : terms_) {
    out += (coeff > 0 ? " + " : " - ");
    Rational magnitude = abs(coeff);
    if (magnitude != 1) out += magnitude.get_str() + "*";
    out += "log2(" + base.get_str() + ")";
  }
  return out;
}

std::strong_ordering operator<=>(const LogReal& a, const LogReal& b) {
  int s = (a - b).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::strong_ordering compare_prob_to_threshold(const Rational& p, const Rational& q) {
  return compare_prob_to_threshold(p, DyadicThreshold{LogReal(q)});
}

std::strong_ordering compare_prob_to_threshold(const Rational& p, const DyadicThreshold& t) {
  if (p < 0) throw Error("probability must be nonnegative");
  if (p == 0) return std::strong_ordering::less;
  // p vs 2^(-q)  <=>  log2(p) + q vs 0
  return (LogReal::log2_of(p) + t.bits) <=> LogReal(0);
}

bool le_pow2(const Rational& p, const LogReal& exponent) {
  if (p <= 0) return true;
  return LogReal::log2_of(p) <= exponent;
}

bool lt_pow2(const Rational& p, const LogReal& exponent) {
  if (p <= 0) return true;
  return LogReal::log2_of(p) < exponent;
}

std::optional<int> sign_of_product_minus(const LogReal& u, const LogReal& v, const Rational& q) {
  std::optional<Integer> base;
  for (const LogReal* x : {&u, &v}) {
    if (x->terms().size() > 1) return std::nullopt;
    if (x->terms().size() == 1) {
      if (base && *base != x->terms()[0].first) return std::nullopt;
      base = x->terms()[0].first;
    }
  }
  auto coeff = [](const LogReal& x) { return x.terms().empty() ? Rational(0) : x.terms()[0].second; };
  const Rational u0 = u.constant(), u1 = coeff(u), v0 = v.constant(), v1 = coeff(v);
  const Rational a = u1 * v1, b = u0 * v1 + u1 * v0, c = u0 * v0 - q;
  auto f = [&](const Rational& l) { return Rational(a * l * l + b * l + c); };
  if (!base) return sgn(c);

  // Bracket log2(B) between dyadic rationals about 2^-17 apart, then bound f
  // on the bracket; a root of f inside the bracket leaves the sign undecided.
  const LogReal ell = LogReal::log2_of(*base);
  const double scale = 1 << 20;
  const double e = ell.approx() * scale;
  Rational lo = Rational(static_cast<long>(std::floor(e)) - 4) / Rational(static_cast<long>(scale));
  Rational hi = Rational(static_cast<long>(std::ceil(e)) + 4) / Rational(static_cast<long>(scale));
  if ((ell - LogReal(lo)).sign() <= 0 || (ell - LogReal(hi)).sign() >= 0) return std::nullopt;
  Rational fmin = std::min(f(lo), f(hi));
  Rational fmax = std::max(f(lo), f(hi));
  if (a != 0) {
    Rational vertex = -b / (2 * a);
    if (vertex > lo && vertex < hi) {
      fmin = std::min(fmin, f(vertex));
      fmax = std::max(fmax, f(vertex));
    }
  }
  if (fmin > 0) return 1;
  if (fmax < 0) return -1;
  return std::nullopt;
}

}  // namespace qclift
