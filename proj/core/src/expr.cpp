#include "infoflow/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace infoflow {

struct Expr::Node {
  ExprKind kind;
  Rational value;            // Constant
  std::string name;          // Variable
  std::vector<Expr> kids;    // Sum/Product: n-ary; Negate/Sqrt: 1; Power: base
  long long exponent = 0;    // Power
};

namespace {

const Rational kZero(0);
const Rational kOne(1);

}  // namespace

Expr::Expr() : Expr(constant(0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : kind_(node->kind), node_(std::move(node)) {}

Expr Expr::constant(Rational value) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Constant;
  n->value = std::move(value);
  return Expr(std::move(n));
}

Expr Expr::constant(long long value) { return constant(Rational(value)); }

Expr Expr::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Variable;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Sum;
  n->kids = std::move(terms);
  return Expr(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Product;
  n->kids = std::move(factors);
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, long long exponent) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Power;
  n->kids.push_back(std::move(base));
  n->exponent = exponent;
  return Expr(std::move(n));
}

Expr Expr::negate(Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Negate;
  n->kids.push_back(std::move(operand));
  return Expr(std::move(n));
}

Expr Expr::sqrt(Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Sqrt;
  n->kids.push_back(std::move(operand));
  return Expr(std::move(n));
}

const Rational& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
const std::vector<Expr>& Expr::operands() const { return node_->kids; }
long long Expr::exponent() const { return node_->exponent; }

bool Expr::is_constant(const Rational& v) const {
  return kind_ == ExprKind::Constant && node_->value == v;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, Expr::negate(b)}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator-(const Expr& a) { return Expr::negate(a); }

int compare(const Expr& a, const Expr& b) {
  auto rank = [](ExprKind k) {
    switch (k) {
      case ExprKind::Constant: return 0;
      case ExprKind::Variable: return 1;
      case ExprKind::Sqrt: return 2;
      case ExprKind::Power: return 3;
      case ExprKind::Negate: return 4;
      case ExprKind::Product: return 5;
      case ExprKind::Sum: return 6;
    }
    return 7;
  };
  if (rank(a.kind()) != rank(b.kind())) return rank(a.kind()) < rank(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case ExprKind::Constant:
      if (a.value() == b.value()) return 0;
      return a.value() < b.value() ? -1 : 1;
    case ExprKind::Variable:
      return a.name().compare(b.name());
    case ExprKind::Power:
      if (int c = compare(a.operands()[0], b.operands()[0]); c != 0) return c;
      if (a.exponent() == b.exponent()) return 0;
      return a.exponent() < b.exponent() ? -1 : 1;
    default: {
      const auto& ka = a.operands();
      const auto& kb = b.operands();
      if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
      for (std::size_t i = 0; i < ka.size(); ++i)
        if (int c = compare(ka[i], kb[i]); c != 0) return c;
      return 0;
    }
  }
}

bool structurally_equal(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

ParseError::ParseError(const std::string& message, SourceLocation loc)
    : std::runtime_error(message + " at line " + std::to_string(loc.line) + ", column " +
                         std::to_string(loc.column)),
      where(loc) {}

// ---------------------------------------------------------------------------
// Simplification
// ---------------------------------------------------------------------------

namespace {

// Expansion stops when a distributed product would exceed this many terms.
constexpr std::size_t kExpandTermLimit = 512;

Expr simplify_impl(const Expr& e);

std::vector<Expr> terms_of(const Expr& e) {
  if (e.kind() == ExprKind::Sum) return e.operands();
  return {e};
}

// Splits a simplified product into (rational coefficient, sorted core factors).
std::pair<Rational, std::vector<Expr>> split_coefficient(const Expr& term) {
  if (term.kind() == ExprKind::Constant) return {term.value(), {}};
  if (term.kind() == ExprKind::Product) {
    Rational coeff(1);
    std::vector<Expr> rest;
    for (const auto& f : term.operands()) {
      if (f.kind() == ExprKind::Constant)
        coeff *= f.value();
      else
        rest.push_back(f);
    }
    return {coeff, std::move(rest)};
  }
  return {Rational(1), {term}};
}

Expr make_term(const Rational& coeff, std::vector<Expr> core) {
  if (coeff == 0) return Expr::constant(0);
  if (core.empty()) return Expr::constant(coeff);
  if (coeff == 1 && core.size() == 1) return core[0];
  std::vector<Expr> factors;
  if (coeff != 1) factors.push_back(Expr::constant(coeff));
  for (auto& c : core) factors.push_back(std::move(c));
  if (factors.size() == 1) return factors[0];
  return Expr::product(std::move(factors));
}

Expr simplify_sum(std::vector<Expr> kids) {
  // kids are already simplified
  std::vector<Expr> flat;
  for (auto& k : kids) {
    if (k.kind() == ExprKind::Sum)
      for (const auto& t : k.operands()) flat.push_back(t);
    else
      flat.push_back(std::move(k));
  }
  Rational constant_part(0);
  // like terms keyed by their sorted non-constant core
  std::vector<std::pair<std::vector<Expr>, Rational>> groups;
  auto core_less = [](const std::vector<Expr>& a, const std::vector<Expr>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
      int c = compare(a[i], b[i]);
      if (c != 0) return c < 0;
    }
    return false;
  };
  auto core_equal = [](const std::vector<Expr>& a, const std::vector<Expr>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (compare(a[i], b[i]) != 0) return false;
    return true;
  };
  for (auto& t : flat) {
    auto [coeff, core] = split_coefficient(t);
    if (core.empty()) {
      constant_part += coeff;
      continue;
    }
    bool merged = false;
    for (auto& g : groups) {
      if (core_equal(g.first, core)) {
        g.second += coeff;
        merged = true;
        break;
      }
    }
    if (!merged) groups.emplace_back(std::move(core), coeff);
  }
  std::sort(groups.begin(), groups.end(),
            [&](const auto& a, const auto& b) { return core_less(a.first, b.first); });
  std::vector<Expr> out;
  for (auto& g : groups) {
    if (g.second == 0) continue;
    out.push_back(make_term(g.second, g.first));
  }
  if (constant_part != 0) out.push_back(Expr::constant(constant_part));
  if (out.empty()) return Expr::constant(0);
  if (out.size() == 1) return out[0];
  return Expr::sum(std::move(out));
}

// Multiplies two sums term by term; factors inside each resulting term are
// recombined through simplify_product below.
Expr simplify_product(std::vector<Expr> kids);

Expr expand_two(const Expr& a, const Expr& b) {
  std::vector<Expr> out;
  for (const auto& ta : terms_of(a))
    for (const auto& tb : terms_of(b)) out.push_back(simplify_product({ta, tb}));
  return simplify_sum(std::move(out));
}

Expr simplify_product(std::vector<Expr> kids) {
  // kids are already simplified
  std::vector<Expr> flat;
  for (auto& k : kids) {
    if (k.kind() == ExprKind::Product)
      for (const auto& f : k.operands()) flat.push_back(f);
    else
      flat.push_back(std::move(k));
  }
  Rational coeff(1);
  // collect exponents per canonical base
  std::vector<std::pair<Expr, long long>> powers;
  for (auto& f : flat) {
    if (f.kind() == ExprKind::Constant) {
      coeff *= f.value();
      if (coeff == 0) return Expr::constant(0);
      continue;
    }
    Expr base = f;
    long long exp = 1;
    if (f.kind() == ExprKind::Power) {
      base = f.operands()[0];
      exp = f.exponent();
    }
    bool merged = false;
    for (auto& p : powers) {
      if (structurally_equal(p.first, base)) {
        p.second += exp;
        merged = true;
        break;
      }
    }
    if (!merged) powers.emplace_back(std::move(base), exp);
  }
  std::vector<Expr> factors;
  for (auto& [base, exp] : powers) {
    if (exp == 0) continue;  // x * x^-1 -> 1
    if (exp == 1)
      factors.push_back(base);
    else
      factors.push_back(Expr::power(base, exp));
  }
  std::sort(factors.begin(), factors.end(),
            [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });

  // distribute over sums while small enough
  std::size_t expansion = 1;
  bool has_sum = false;
  for (const auto& f : factors) {
    if (f.kind() == ExprKind::Sum) {
      has_sum = true;
      expansion *= f.operands().size();
    }
    if (expansion > kExpandTermLimit) break;
  }
  if (has_sum && expansion <= kExpandTermLimit && factors.size() > 1) {
    Expr acc = factors[0];
    for (std::size_t i = 1; i < factors.size(); ++i) acc = expand_two(acc, factors[i]);
    if (coeff == 1) return acc;
    std::vector<Expr> scaled;
    for (const auto& t : terms_of(acc)) scaled.push_back(simplify_product({Expr::constant(coeff), t}));
    return simplify_sum(std::move(scaled));
  }

  if (factors.empty()) return Expr::constant(coeff);
  if (coeff == 1 && factors.size() == 1) return factors[0];
  std::vector<Expr> out;
  if (coeff != 1) out.push_back(Expr::constant(coeff));
  for (auto& f : factors) out.push_back(std::move(f));
  if (out.size() == 1) return out[0];
  return Expr::product(std::move(out));
}

Expr simplify_power(const Expr& base, long long exp) {
  // base is already simplified
  if (exp == 0) return Expr::constant(1);  // convention: x^0 == 1, including x == 0
  if (exp == 1) return base;
  if (base.kind() == ExprKind::Constant) {
    if (base.value() == 0 && exp < 0) return Expr::power(base, exp);  // undefined; kept
    return Expr::constant(rational_pow(base.value(), exp));
  }
  if (base.kind() == ExprKind::Power)
    return simplify_power(base.operands()[0], base.exponent() * exp);
  if (base.kind() == ExprKind::Product) {
    std::vector<Expr> kids;
    for (const auto& f : base.operands()) kids.push_back(simplify_power(f, exp));
    return simplify_product(std::move(kids));
  }
  if (base.kind() == ExprKind::Sum && exp > 1) {
    double estimate = 1;
    for (int i = 0; i < exp && estimate <= kExpandTermLimit; ++i)
      estimate *= static_cast<double>(base.operands().size());
    if (estimate <= kExpandTermLimit) {
      Expr acc = base;
      for (long long i = 1; i < exp; ++i) acc = expand_two(acc, base);
      return acc;
    }
  }
  return Expr::power(base, exp);
}

Expr simplify_impl(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Constant:
    case ExprKind::Variable:
      return e;
    case ExprKind::Negate:
      return simplify_product({Expr::constant(-1), simplify_impl(e.operands()[0])});
    case ExprKind::Sqrt: {
      Expr arg = simplify_impl(e.operands()[0]);
      if (arg.kind() == ExprKind::Constant && arg.value() >= 0) {
        if (auto root = rational_sqrt(arg.value())) return Expr::constant(*root);
      }
      return Expr::sqrt(std::move(arg));
    }
    case ExprKind::Power:
      return simplify_power(simplify_impl(e.operands()[0]), e.exponent());
    case ExprKind::Sum: {
      std::vector<Expr> kids;
      kids.reserve(e.operands().size());
      for (const auto& k : e.operands()) kids.push_back(simplify_impl(k));
      return simplify_sum(std::move(kids));
    }
    case ExprKind::Product: {
      std::vector<Expr> kids;
      kids.reserve(e.operands().size());
      for (const auto& k : e.operands()) kids.push_back(simplify_impl(k));
      return simplify_product(std::move(kids));
    }
  }
  return e;
}

}  // namespace

Expr simplify(const Expr& e) { return simplify_impl(e); }

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

namespace {

Expr diff_impl(const Expr& e, const std::string& var) {
  switch (e.kind()) {
    case ExprKind::Constant:
      return Expr::constant(0);
    case ExprKind::Variable:
      return Expr::constant(e.name() == var ? 1 : 0);
    case ExprKind::Negate:
      return Expr::negate(diff_impl(e.operands()[0], var));
    case ExprKind::Sum: {
      std::vector<Expr> kids;
      for (const auto& k : e.operands()) kids.push_back(diff_impl(k, var));
      return Expr::sum(std::move(kids));
    }
    case ExprKind::Product: {
      std::vector<Expr> addends;
      const auto& fs = e.operands();
      for (std::size_t i = 0; i < fs.size(); ++i) {
        std::vector<Expr> factors;
        for (std::size_t j = 0; j < fs.size(); ++j)
          factors.push_back(i == j ? diff_impl(fs[j], var) : fs[j]);
        addends.push_back(Expr::product(std::move(factors)));
      }
      return Expr::sum(std::move(addends));
    }
    case ExprKind::Power: {
      const Expr& base = e.operands()[0];
      long long n = e.exponent();
      if (n == 0) return Expr::constant(0);
      return Expr::product(
          {Expr::constant(n), Expr::power(base, n - 1), diff_impl(base, var)});
    }
    case ExprKind::Sqrt: {
      const Expr& arg = e.operands()[0];
      // d sqrt(u) = u' / (2 sqrt(u))
      return Expr::product({Expr::constant(Rational(1, 2)), diff_impl(arg, var),
                            Expr::power(Expr::sqrt(arg), -1)});
    }
  }
  return Expr::constant(0);
}

}  // namespace

Expr differentiate(const Expr& e, const std::string& var) {
  return simplify(diff_impl(e, var));
}

// ---------------------------------------------------------------------------
// Substitution and variables
// ---------------------------------------------------------------------------

namespace {

Expr subst_impl(const Expr& e, const std::map<std::string, Expr>& repl) {
  switch (e.kind()) {
    case ExprKind::Constant:
      return e;
    case ExprKind::Variable: {
      auto it = repl.find(e.name());
      return it == repl.end() ? e : it->second;
    }
    case ExprKind::Power:
      return Expr::power(subst_impl(e.operands()[0], repl), e.exponent());
    default: {
      std::vector<Expr> kids;
      for (const auto& k : e.operands()) kids.push_back(subst_impl(k, repl));
      switch (e.kind()) {
        case ExprKind::Sum: return Expr::sum(std::move(kids));
        case ExprKind::Product: return Expr::product(std::move(kids));
        case ExprKind::Negate: return Expr::negate(std::move(kids[0]));
        case ExprKind::Sqrt: return Expr::sqrt(std::move(kids[0]));
        default: return e;
      }
    }
  }
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
  if (e.kind() == ExprKind::Variable) {
    out.insert(e.name());
    return;
  }
  for (const auto& k : e.operands()) collect_vars(k, out);
}

}  // namespace

Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl) {
  return simplify(subst_impl(e, repl));
}

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  collect_vars(simplify(e), out);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

double evaluate(const Expr& e, const std::map<std::string, double>& at) {
  switch (e.kind()) {
    case ExprKind::Constant:
      return rational_to_double(e.value());
    case ExprKind::Variable: {
      auto it = at.find(e.name());
      if (it == at.end()) throw EvalError("missing variable: " + e.name());
      return it->second;
    }
    case ExprKind::Negate:
      return -evaluate(e.operands()[0], at);
    case ExprKind::Sum: {
      double acc = 0;
      for (const auto& k : e.operands()) acc += evaluate(k, at);
      return acc;
    }
    case ExprKind::Product: {
      double acc = 1;
      for (const auto& k : e.operands()) acc *= evaluate(k, at);
      return acc;
    }
    case ExprKind::Power: {
      double base = evaluate(e.operands()[0], at);
      long long n = e.exponent();
      if (n == 0) return 1.0;
      if (base == 0.0 && n < 0) throw EvalError("division by zero");
      double acc = 1.0;
      double b = base;
      unsigned long long m =
          n < 0 ? static_cast<unsigned long long>(-(n + 1)) + 1ULL : static_cast<unsigned long long>(n);
      while (m > 0) {
        if (m & 1ULL) acc *= b;
        b *= b;
        m >>= 1;
      }
      return n < 0 ? 1.0 / acc : acc;
    }
    case ExprKind::Sqrt: {
      double arg = evaluate(e.operands()[0], at);
      if (arg < 0) throw EvalError("negative sqrt argument");
      return std::sqrt(arg);
    }
  }
  throw EvalError("unreachable expression kind");
}

Rational evaluate_exact(const Expr& e, const std::map<std::string, Rational>& at) {
  switch (e.kind()) {
    case ExprKind::Constant:
      return e.value();
    case ExprKind::Variable: {
      auto it = at.find(e.name());
      if (it == at.end()) throw EvalError("missing variable: " + e.name());
      return it->second;
    }
    case ExprKind::Negate:
      return -evaluate_exact(e.operands()[0], at);
    case ExprKind::Sum: {
      Rational acc(0);
      for (const auto& k : e.operands()) acc += evaluate_exact(k, at);
      return acc;
    }
    case ExprKind::Product: {
      Rational acc(1);
      for (const auto& k : e.operands()) acc *= evaluate_exact(k, at);
      return acc;
    }
    case ExprKind::Power: {
      Rational base = evaluate_exact(e.operands()[0], at);
      if (base == 0 && e.exponent() < 0) throw EvalError("division by zero");
      return rational_pow(base, e.exponent());
    }
    case ExprKind::Sqrt: {
      Rational arg = evaluate_exact(e.operands()[0], at);
      if (arg < 0) throw EvalError("negative sqrt argument");
      if (auto root = rational_sqrt(arg)) return *root;
      throw EvalError("sqrt argument has no exact rational root");
    }
  }
  throw EvalError("unreachable expression kind");
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// precedence levels: 0 sum, 1 product, 2 power/unary, 3 atom
void print(std::ostream& os, const Expr& e, int parent_level);

void print_parens(std::ostream& os, const Expr& e, int level, int parent_level) {
  if (level < parent_level) {
    os << '(';
    print(os, e, 0);
    os << ')';
  } else {
    print(os, e, parent_level);
  }
}

bool starts_negative(const Expr& e) {
  if (e.kind() == ExprKind::Constant) return e.value() < 0;
  if (e.kind() == ExprKind::Negate) return true;
  if (e.kind() == ExprKind::Product && !e.operands().empty())
    return starts_negative(e.operands()[0]);
  return false;
}

Expr flip_sign(const Expr& e) {
  if (e.kind() == ExprKind::Constant) return Expr::constant(-e.value());
  if (e.kind() == ExprKind::Negate) return e.operands()[0];
  if (e.kind() == ExprKind::Product) {
    std::vector<Expr> kids = e.operands();
    kids[0] = flip_sign(kids[0]);
    if (kids[0].is_constant(Rational(1)) && kids.size() > 1) {
      kids.erase(kids.begin());
      if (kids.size() == 1) return kids[0];
    }
    return Expr::product(std::move(kids));
  }
  return Expr::negate(e);
}

void print(std::ostream& os, const Expr& e, int parent_level) {
  switch (e.kind()) {
    case ExprKind::Constant: {
      const Rational& v = e.value();
      const BigInt& num = boost::multiprecision::numerator(v);
      const BigInt& den = boost::multiprecision::denominator(v);
      bool needs_wrap = (v < 0 && parent_level > 0) || (den != 1 && parent_level > 1);
      if (needs_wrap) os << '(';
      os << num.str();
      if (den != 1) os << '/' << den.str();
      if (needs_wrap) os << ')';
      break;
    }
    case ExprKind::Variable:
      os << e.name();
      break;
    case ExprKind::Negate:
      os << '-';
      print_parens(os, e.operands()[0], 2, 2);
      break;
    case ExprKind::Sqrt:
      os << "sqrt(";
      print(os, e.operands()[0], 0);
      os << ')';
      break;
    case ExprKind::Power: {
      print_parens(os, e.operands()[0], 3, 3);
      os << '^' << e.exponent();
      break;
    }
    case ExprKind::Product: {
      const auto& kids = e.operands();
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i > 0) os << '*';
        print_parens(os, kids[i], kids[i].kind() == ExprKind::Sum ? 0 : 2, 1);
      }
      break;
    }
    case ExprKind::Sum: {
      const auto& kids = e.operands();
      if (parent_level > 0) os << '(';
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i == 0) {
          print(os, kids[i], 1);
        } else if (starts_negative(kids[i])) {
          os << " - ";
          print(os, flip_sign(kids[i]), 1);
        } else {
          os << " + ";
          print(os, kids[i], 1);
        }
      }
      if (parent_level > 0) os << ')';
      break;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(os, e, 0);
  return os.str();
}

bool contains_sqrt(const Expr& e) {
  if (e.kind() == ExprKind::Sqrt) return true;
  for (const auto& k : e.operands())
    if (contains_sqrt(k)) return true;
  return false;
}

std::size_t term_count(const Expr& e) {
  Expr s = simplify(e);
  return s.kind() == ExprKind::Sum ? s.operands().size() : 1;
}

}  // namespace infoflow
