#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <string_view>

namespace disq {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using BigFloat = boost::multiprecision::mpfr_float;

// Accepts "3", "-7", "1/2", "0.25" and "2.5e-3"; everything is converted
// exactly, no rounding.
Rational parse_rational(std::string_view text);

// "n/d", or just "n" when the denominator is 1.
std::string to_fraction_string(const Rational& q);

double to_double(const Rational& q);

// Natural log of |x|, safe for values far outside double range. x != 0.
double log_abs(const Integer& n);
double log_abs(const Rational& q);

Integer factorial(int n);

Rational rational_pow(const Rational& base, int exp);

}  // namespace disq
