#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace qpot {

/// Arbitrary-precision integer and rational used wherever identities must hold exactly.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(long long num, long long den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// "p/q" or "p" when the denominator is one.
inline std::string to_fraction_string(const Rational& q) {
  const BigInt& num = boost::multiprecision::numerator(q);
  const BigInt& den = boost::multiprecision::denominator(q);
  if (den == 1) {
    return num.str();
  }
  return num.str() + "/" + den.str();
}

inline BigInt factorial(unsigned n) {
  BigInt f = 1;
  for (unsigned k = 2; k <= n; ++k) {
    f *= k;
  }
  return f;
}

}  // namespace qpot
