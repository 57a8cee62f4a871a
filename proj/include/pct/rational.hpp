#ifndef PCT_RATIONAL_HPP
#define PCT_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <cstdlib>
#include <string>

#include "pct/errors.hpp"

namespace pct {

using Integer = boost::multiprecision::cpp_int;
// Always stored in lowest terms with positive denominator.
using Rational = boost::multiprecision::cpp_rational;

inline Integer rational_num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer rational_den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline bool is_integer(const Rational& q) { return rational_den(q) == 1; }

inline double to_double(const Rational& q) { return q.template convert_to<double>(); }

inline Rational rational_from_double(double x) {
  // Doubles are dyadic rationals; the conversion is exact.
  return Rational(x);
}

inline std::string rational_str(const Rational& q) {
  std::string s = rational_num(q).str();
  if (!is_integer(q)) s += "/" + rational_den(q).str();
  return s;
}

inline std::size_t pow_exponent_budget() {
  static std::size_t budget = [] {
    if (const char* env = std::getenv("PCT_POW_BUDGET")) {
      long long v = std::atoll(env);
      if (v > 0) return static_cast<std::size_t>(v);
    }
    return static_cast<std::size_t>(1) << 20;
  }();
  return budget;
}

// b^e for integer e; e < 0 inverts. Exponent magnitude is budget-capped so
// runaway towers surface as Budget errors instead of exhausting memory.
inline Rational rational_pow(const Rational& base, const Integer& exponent) {
  bool negative = exponent < 0;
  Integer mag = negative ? Integer(-exponent) : exponent;
  if (mag > Integer(pow_exponent_budget()))
    fail(ErrorKind::Budget, "pow exponent " + mag.str() + " exceeds budget");
  unsigned long e = mag.template convert_to<unsigned long>();
  Integer num = boost::multiprecision::pow(rational_num(base), e);
  Integer den = boost::multiprecision::pow(rational_den(base), e);
  if (negative) {
    if (num == 0) fail(ErrorKind::DivisionByZero, "0 raised to a negative exponent");
    std::swap(num, den);
  }
  Rational r(num, den);  // cpp_rational normalizes sign and gcd
  return r;
}

inline Rational rational_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline Integer rational_floor(const Rational& q) {
  Integer n = rational_num(q), d = rational_den(q);
  Integer quot = n / d, rem = n % d;
  if (rem != 0 && n < 0) quot -= 1;
  return quot;
}

// Smallest k such that the k-fold exponential tower of `base` reaches `value`
// (0 when value <= base). Agrees with the exact exponent count on tower members.
inline Integer tower_height(const Rational& base, const Rational& value) {
  if (!is_integer(base) || base < 2)
    fail(ErrorKind::Domain, "tower_height base must be an integer >= 2");
  if (value <= base) return 0;
  Integer b = rational_num(base);
  Rational t(b);
  Integer k = 0;
  while (t < value) {
    if (!is_integer(t)) fail(ErrorKind::Domain, "tower_height reached a non-integer level");
    t = rational_pow(Rational(b), rational_num(t));
    k += 1;
  }
  return k;
}

}  // namespace pct

#endif
