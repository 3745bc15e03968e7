#include "disq/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace disq {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// Digits only; leading zeros are stripped so GMP does not read them as octal.
Integer digits_to_integer(std::string_view s) {
  while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
  return Integer{std::string(s)};
}

// [+-]?digits
Integer parse_integer(std::string_view s, std::string_view whole) {
  bool neg = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s))
    throw std::invalid_argument("not a rational number: '" + std::string(whole) + "'");
  Integer v = digits_to_integer(s);
  return neg ? Integer(-v) : v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw std::invalid_argument("empty rational literal");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(s.substr(0, slash), text);
    Integer den = parse_integer(s.substr(slash + 1), text);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(num) / Rational(den);
  }

  // Decimal form, optionally with an exponent.
  long exp10 = 0;
  std::string_view mantissa = s;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    exp10 = static_cast<long>(parse_integer(s.substr(e + 1), text).convert_to<long long>());
    mantissa = s.substr(0, e);
  }
  bool neg = false;
  if (!mantissa.empty() && (mantissa[0] == '+' || mantissa[0] == '-')) {
    neg = mantissa[0] == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    auto frac = mantissa.substr(dot + 1);
    digits = std::string(mantissa.substr(0, dot)) + std::string(frac);
    exp10 -= static_cast<long>(frac.size());
  } else {
    digits = std::string(mantissa);
  }
  if (!all_digits(digits))
    throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");

  Rational r{digits_to_integer(digits)};
  Integer scale = 1;
  for (long i = 0; i < std::labs(exp10); ++i) scale *= 10;
  if (exp10 >= 0)
    r *= Rational(scale);
  else
    r /= Rational(scale);
  return neg ? Rational(-r) : r;
}

std::string to_fraction_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

double log_abs(const Integer& n) {
  if (n == 0) throw std::domain_error("log_abs(0)");
  long e = 0;
  double d = mpz_get_d_2exp(&e, n.backend().data());
  return std::log(std::fabs(d)) + static_cast<double>(e) * M_LN2;
}

double log_abs(const Rational& q) {
  return log_abs(numerator(q)) - log_abs(denominator(q));
}

Integer factorial(int n) {
  Integer f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Rational rational_pow(const Rational& base, int exp) {
  if (exp < 0) return 1 / rational_pow(base, -exp);
  Rational r = 1, b = base;
  int e = exp;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

}  // namespace disq
