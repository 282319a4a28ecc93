#include "infoflow/rational.hpp"

#include <stdexcept>

namespace infoflow {

Rational rational_from_decimal(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(BigInt(text));
  std::string head = text.substr(0, dot);
  std::string frac = text.substr(dot + 1);
  if (frac.empty()) throw std::invalid_argument("malformed decimal literal: " + text);
  BigInt scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  BigInt numer = BigInt(head.empty() ? "0" : head) * scale + BigInt(frac);
  return Rational(numer, scale);
}

Rational rational_pow(const Rational& base, long long exp) {
  if (exp == 0) return Rational(1);
  if (base == 0 && exp < 0) throw std::domain_error("zero raised to a negative power");
  unsigned long long n = exp < 0 ? static_cast<unsigned long long>(-(exp + 1)) + 1ULL
                                 : static_cast<unsigned long long>(exp);
  Rational acc(1);
  Rational b = base;
  while (n > 0) {
    if (n & 1ULL) acc *= b;
    b *= b;
    n >>= 1;
  }
  if (exp < 0) acc = Rational(1) / acc;
  return acc;
}

namespace {

std::optional<BigInt> integer_sqrt_exact(const BigInt& n) {
  if (n < 0) return std::nullopt;
  BigInt r = boost::multiprecision::sqrt(n);
  if (r * r == n) return r;
  return std::nullopt;
}

}  // namespace

std::optional<Rational> rational_sqrt(const Rational& nonneg) {
  if (nonneg < 0) return std::nullopt;
  auto n = integer_sqrt_exact(boost::multiprecision::numerator(nonneg));
  if (!n) return std::nullopt;
  auto d = integer_sqrt_exact(boost::multiprecision::denominator(nonneg));
  if (!d) return std::nullopt;
  return Rational(*n, *d);
}

double rational_to_double(const Rational& r) { return r.convert_to<double>(); }

std::string rational_to_string(const Rational& r) {
  const BigInt& num = boost::multiprecision::numerator(r);
  const BigInt& den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace infoflow
