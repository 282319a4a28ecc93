#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "infoflow/expr.hpp"
#include "infoflow/rational.hpp"

namespace infoflow {

/// Sparse exponent vector: (variable index, exponent > 0), sorted by index.
using Monomial = std::vector<std::pair<int, int>>;

struct PolyLimits {
  int max_total_degree = 16;
  std::size_t max_terms = 10000;
};

class PolyOverflow : public std::runtime_error {
 public:
  PolyOverflow() : std::runtime_error("polynomial exceeds normal-form limits") {}
};

/// Sparse multivariate polynomial with exact rational coefficients.
class Poly {
 public:
  Poly() = default;
  static Poly constant(Rational c);
  static Poly var(int index);

  Poly add(const Poly& other, const PolyLimits& limits) const;
  Poly mul(const Poly& other, const PolyLimits& limits) const;
  Poly pow(long long n, const PolyLimits& limits) const;
  Poly negated() const;

  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  int total_degree() const;
  int degree_in(int var) const;

  Rational eval(const std::vector<Rational>& point) const;
  /// Substitutes one variable by a rational value.
  Poly eval_partial(int var, const Rational& value, const PolyLimits& limits) const;

  const std::map<Monomial, Rational>& terms() const { return terms_; }

 private:
  void prune();
  void check(const PolyLimits& limits) const;
  std::map<Monomial, Rational> terms_;
};

/// Rational function num/den in polynomial normal form.
struct RationalFn {
  Poly num;
  Poly den;
};

/// Converts a sqrt-free expression into num/den normal form over the given
/// variable ordering. Returns nullopt when the expression contains sqrt;
/// throws PolyOverflow when the limits are exceeded.
std::optional<RationalFn> expr_to_rational_fn(const Expr& e,
                                              const std::vector<std::string>& vars,
                                              const PolyLimits& limits);

}  // namespace infoflow
