#include "infoflow/poly.hpp"

#include <algorithm>

namespace infoflow {

Poly Poly::constant(Rational c) {
  Poly p;
  if (c != 0) p.terms_[Monomial{}] = std::move(c);
  return p;
}

Poly Poly::var(int index) {
  Poly p;
  p.terms_[Monomial{{index, 1}}] = Rational(1);
  return p;
}

void Poly::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == 0)
      it = terms_.erase(it);
    else
      ++it;
  }
}

void Poly::check(const PolyLimits& limits) const {
  if (terms_.size() > limits.max_terms) throw PolyOverflow();
  if (total_degree() > limits.max_total_degree) throw PolyOverflow();
}

int Poly::total_degree() const {
  int best = 0;
  for (const auto& [mono, coeff] : terms_) {
    int d = 0;
    for (const auto& [var, exp] : mono) d += exp;
    best = std::max(best, d);
  }
  return best;
}

int Poly::degree_in(int var) const {
  int best = 0;
  for (const auto& [mono, coeff] : terms_) {
    for (const auto& [v, exp] : mono)
      if (v == var) best = std::max(best, exp);
  }
  return best;
}

Poly Poly::add(const Poly& other, const PolyLimits& limits) const {
  Poly out = *this;
  for (const auto& [mono, coeff] : other.terms_) out.terms_[mono] += coeff;
  out.prune();
  out.check(limits);
  return out;
}

Poly Poly::negated() const {
  Poly out = *this;
  for (auto& [mono, coeff] : out.terms_) coeff = -coeff;
  return out;
}

namespace {

Monomial merge_monomials(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

Poly Poly::mul(const Poly& other, const PolyLimits& limits) const {
  Poly out;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : other.terms_) {
      out.terms_[merge_monomials(ma, mb)] += ca * cb;
      if (out.terms_.size() > 4 * limits.max_terms) throw PolyOverflow();
    }
  }
  out.prune();
  out.check(limits);
  return out;
}

Poly Poly::pow(long long n, const PolyLimits& limits) const {
  if (n < 0) throw std::invalid_argument("Poly::pow expects a nonnegative exponent");
  Poly acc = Poly::constant(Rational(1));
  Poly base = *this;
  unsigned long long m = static_cast<unsigned long long>(n);
  while (m > 0) {
    if (m & 1ULL) acc = acc.mul(base, limits);
    if (m >>= 1) base = base.mul(base, limits);
  }
  return acc;
}

Rational Poly::eval(const std::vector<Rational>& point) const {
  Rational acc(0);
  for (const auto& [mono, coeff] : terms_) {
    Rational term = coeff;
    for (const auto& [var, exp] : mono)
      term *= rational_pow(point.at(static_cast<std::size_t>(var)), exp);
    acc += term;
  }
  return acc;
}

Poly Poly::eval_partial(int var, const Rational& value, const PolyLimits& limits) const {
  Poly out;
  for (const auto& [mono, coeff] : terms_) {
    Rational c = coeff;
    Monomial rest;
    for (const auto& [v, exp] : mono) {
      if (v == var)
        c *= rational_pow(value, exp);
      else
        rest.emplace_back(v, exp);
    }
    out.terms_[rest] += c;
  }
  out.prune();
  out.check(limits);
  return out;
}

namespace {

std::optional<RationalFn> to_fn(const Expr& e, const std::map<std::string, int>& index,
                                const PolyLimits& limits) {
  switch (e.kind()) {
    case ExprKind::Constant:
      return RationalFn{Poly::constant(e.value()), Poly::constant(Rational(1))};
    case ExprKind::Variable:
      return RationalFn{Poly::var(index.at(e.name())), Poly::constant(Rational(1))};
    case ExprKind::Sqrt:
      return std::nullopt;
    case ExprKind::Negate: {
      auto inner = to_fn(e.operands()[0], index, limits);
      if (!inner) return std::nullopt;
      return RationalFn{inner->num.negated(), inner->den};
    }
    case ExprKind::Sum: {
      RationalFn acc{Poly::constant(Rational(0)), Poly::constant(Rational(1))};
      for (const auto& k : e.operands()) {
        auto f = to_fn(k, index, limits);
        if (!f) return std::nullopt;
        // a/b + c/d = (a d + c b) / (b d)
        Poly num = acc.num.mul(f->den, limits).add(f->num.mul(acc.den, limits), limits);
        acc = RationalFn{std::move(num), acc.den.mul(f->den, limits)};
      }
      return acc;
    }
    case ExprKind::Product: {
      RationalFn acc{Poly::constant(Rational(1)), Poly::constant(Rational(1))};
      for (const auto& k : e.operands()) {
        auto f = to_fn(k, index, limits);
        if (!f) return std::nullopt;
        acc = RationalFn{acc.num.mul(f->num, limits), acc.den.mul(f->den, limits)};
      }
      return acc;
    }
    case ExprKind::Power: {
      auto base = to_fn(e.operands()[0], index, limits);
      if (!base) return std::nullopt;
      long long n = e.exponent();
      if (n >= 0) return RationalFn{base->num.pow(n, limits), base->den.pow(n, limits)};
      return RationalFn{base->den.pow(-n, limits), base->num.pow(-n, limits)};
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<RationalFn> expr_to_rational_fn(const Expr& e,
                                              const std::vector<std::string>& vars,
                                              const PolyLimits& limits) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < vars.size(); ++i) index[vars[i]] = static_cast<int>(i);
  return to_fn(e, index, limits);
}

}  // namespace infoflow
