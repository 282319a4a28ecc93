#pragma once

#include <initializer_list>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "infoflow/rational.hpp"

namespace infoflow {

enum class ExprKind { Constant, Variable, Sum, Product, Power, Negate, Sqrt };

/// Immutable symbolic expression over named real variables.
///
/// Constants are exact rationals; Power carries an integer exponent; Sqrt is
/// the only non-rational operation. Nodes are shared and never mutated, so
/// expressions can be copied and evaluated concurrently.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(Rational value);
  static Expr constant(long long value);
  static Expr variable(std::string name);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(Expr base, long long exponent);
  static Expr negate(Expr operand);
  static Expr sqrt(Expr operand);

  ExprKind kind() const { return kind_; }
  const Rational& value() const;             // Constant only
  const std::string& name() const;           // Variable only
  const std::vector<Expr>& operands() const; // children (Power: base at [0])
  long long exponent() const;                // Power only

  bool is_constant() const { return kind_ == ExprKind::Constant; }
  bool is_constant(const Rational& v) const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);

  ExprKind kind_;
  std::shared_ptr<const Node> node_;
};

// Convenience builders; results are raw nodes (callers simplify when needed).
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

/// Canonical total order on expression trees; 0 means structurally equal.
int compare(const Expr& a, const Expr& b);
bool structurally_equal(const Expr& a, const Expr& b);

struct SourceLocation {
  int line = 1;
  int column = 1;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, SourceLocation where);
  SourceLocation where;
};

class EvalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses the expression grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := atom ('^' integer)?
///   atom   := number | ident | '(' expr ')' | 'sqrt' '(' expr ')' | '-' atom
/// Division is represented as multiplication by power(-1). Decimal literals
/// become exact rationals. Throws ParseError with line/column on bad input.
Expr parse_expr(const std::string& text);

/// Normalizes an expression: folds rational constants, flattens and sorts
/// sums/products, cancels identical terms (x - x -> 0), removes 0/1 units,
/// merges powers, and expands small products/powers of sums. The result is
/// numerically equal to the input on its domain.
Expr simplify(const Expr& e);

/// Partial derivative, simplified. Exact for rational expressions; sqrt by
/// the chain rule.
Expr differentiate(const Expr& e, const std::string& var);

/// Replaces variables by expressions, then simplifies.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl);

/// Variables remaining in the simplified tree.
std::set<std::string> free_vars(const Expr& e);

/// Floating-point evaluation. Throws EvalError for missing variables,
/// negative sqrt arguments, and division by zero.
double evaluate(const Expr& e, const std::map<std::string, double>& at);

/// Exact rational evaluation; sqrt is allowed only when the argument has an
/// exact rational root.
Rational evaluate_exact(const Expr& e, const std::map<std::string, Rational>& at);

/// Grammar-compatible rendering; parse_expr(to_string(e)) reproduces e for
/// simplified expressions.
std::string to_string(const Expr& e);

bool contains_sqrt(const Expr& e);

/// Number of top-level addends of the simplified expression (>= 1).
std::size_t term_count(const Expr& e);

}  // namespace infoflow
