#pragma once

// Exact rational scalars. All coordinate and parameter arithmetic in this
// library is exact: values are arbitrary-precision rationals kept canonical
// (reduced, sign on the numerator) by the backend, so equality is structural.

#include <boost/multiprecision/gmp.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mtpkit {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// Canonical text form: integers bare ("3"), everything else "p/q" with the
/// sign on the numerator ("-7/2"). Never a decimal expansion.
inline std::string format_rational(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline double approx(const Rational& value) {
  return value.template convert_to<double>();
}

/// Parse a scalar written as an integer ("3"), a finite decimal ("-2.5") or
/// a quotient of integers ("7/2"). The result is exact; "-2.5" parses to
/// -5/2, not to a nearby double. Throws std::invalid_argument on anything
/// else, including a zero denominator.
inline Rational parse_rational(std::string_view text) {
  const auto fail = [&]() -> Rational {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  };
  std::size_t pos = 0;
  const auto take_sign = [&]() -> bool {
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      return text[pos++] == '-';
    }
    return false;
  };
  const auto take_digits = [&]() -> std::string_view {
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    return text.substr(start, pos - start);
  };

  const bool negative = take_sign();
  const std::string_view int_digits = take_digits();
  if (int_digits.empty()) return fail();

  const BigInt whole{std::string(int_digits)};
  Rational result;
  if (pos == text.size()) {
    result = Rational(whole);
  } else if (text[pos] == '.') {
    ++pos;
    const std::string_view frac_digits = take_digits();
    if (frac_digits.empty() || pos != text.size()) return fail();
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac_digits.size(); ++i) scale *= 10;
    const BigInt frac{std::string(frac_digits)};
    result = Rational(whole * scale + frac, scale);
  } else if (text[pos] == '/') {
    ++pos;
    const bool den_negative = take_sign();
    const std::string_view den_digits = take_digits();
    if (den_digits.empty() || pos != text.size()) return fail();
    const BigInt den{std::string(den_digits)};
    if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
    result = Rational(whole, den);
    if (den_negative) result = -result;
  } else {
    return fail();
  }
  if (negative) result = -result;
  return result;
}

}  // namespace mtpkit
