#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace infoflow {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact conversion of a decimal literal ("12", "0.5", "1.25") to a rational.
Rational rational_from_decimal(const std::string& text);

/// base^exp with integer exponent; negative exponents invert. 0^0 == 1.
/// Throws std::domain_error for 0 raised to a negative power.
Rational rational_pow(const Rational& base, long long exp);

/// Exact rational square root, when one exists.
std::optional<Rational> rational_sqrt(const Rational& nonneg);

double rational_to_double(const Rational& r);

/// "p" or "p/q", canonical sign on the numerator.
std::string rational_to_string(const Rational& r);

}  // namespace infoflow
