#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace skz {

// Exact rational coefficients. Arbitrary precision: no floating point
// anywhere in the kernel.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline std::string to_string(const Rational& q) { return q.str(); }

inline Rational rational_pow(const Rational& base, long exp) {
  Rational acc{1};
  Rational b = base;
  bool neg = exp < 0;
  unsigned long e = neg ? static_cast<unsigned long>(-exp) : static_cast<unsigned long>(exp);
  while (e) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  if (neg) acc = Rational{1} / acc;
  return acc;
}

inline Rational factorial(int k) {
  Rational acc{1};
  for (int i = 2; i <= k; ++i) acc *= i;
  return acc;
}

}  // namespace skz
