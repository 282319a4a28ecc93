#include "infoflow/zero.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace infoflow {

double zero_tolerance(const Expr& e, double base_tolerance) {
  return base_tolerance * static_cast<double>(std::max<std::size_t>(1, term_count(e)));
}

namespace {

Rational rational_in_box(std::pair<double, double> iv, std::mt19937_64& rng) {
  constexpr long long kGrid = 1 << 20;
  std::uniform_int_distribution<long long> dist(0, kGrid);
  Rational lo(iv.first), hi(iv.second);
  return lo + (hi - lo) * Rational(dist(rng), kGrid);
}

std::map<std::string, Rational> sample_point(const std::vector<std::string>& vars,
                                             const DomainBox& box, std::mt19937_64& rng) {
  std::map<std::string, Rational> point;
  for (const auto& v : vars) point[v] = rational_in_box(box.get(v), rng);
  return point;
}

// Deterministic witness search for a nonzero rational function: chooses one
// variable at a time from a grid large enough that some value keeps both the
// numerator and denominator nonzero.
std::map<std::string, Rational> grid_witness(Poly num, Poly den,
                                             const std::vector<std::string>& vars,
                                             const DomainBox& box, const PolyLimits& limits) {
  std::map<std::string, Rational> point;
  for (std::size_t vi = 0; vi < vars.size(); ++vi) {
    int v = static_cast<int>(vi);
    int dmax = num.degree_in(v) + den.degree_in(v);
    auto iv = box.get(vars[vi]);
    Rational lo(iv.first), hi(iv.second);
    bool placed = false;
    for (int t = 0; t <= dmax && !placed; ++t) {
      Rational r = lo + (hi - lo) * Rational(t + 1, dmax + 2);
      Poly num2 = num.eval_partial(v, r, limits);
      Poly den2 = den.eval_partial(v, r, limits);
      if (!num2.is_zero() && !den2.is_zero()) {
        num = std::move(num2);
        den = std::move(den2);
        point[vars[vi]] = r;
        placed = true;
      }
    }
    if (!placed) {
      // unreachable for nonzero num*den; keep a midpoint to stay total
      point[vars[vi]] = lo + (hi - lo) * Rational(1, 2);
    }
  }
  return point;
}

}  // namespace

ZeroVerdict is_zero(const Expr& e, const DomainBox& box, const ZeroConfig& config) {
  Expr s = simplify(e);
  ZeroVerdict verdict;

  if (s.is_constant()) {
    if (s.value() == 0) {
      verdict.kind = ZeroKind::IdenticallyZero;
      verdict.exact = true;
    } else {
      verdict.kind = ZeroKind::NotIdenticallyZero;
      verdict.exact = true;
      verdict.witness_value = rational_to_double(s.value());
    }
    return verdict;
  }

  std::vector<std::string> vars(free_vars(s).begin(), free_vars(s).end());
  const double tol = zero_tolerance(s, config.base_tolerance);

  if (!contains_sqrt(s)) {
    try {
      auto fn = expr_to_rational_fn(s, vars, config.limits);
      if (fn) {
        if (fn->den.is_zero()) {
          verdict.kind = ZeroKind::Unknown;
          verdict.note = "denominator is identically zero";
          return verdict;
        }
        if (fn->num.is_zero()) {
          verdict.kind = ZeroKind::IdenticallyZero;
          verdict.exact = true;
          return verdict;
        }
        // exact nonzero: produce a witness, preferring random samples
        std::mt19937_64 rng(config.seed);
        std::vector<Rational> coords(vars.size());
        for (int k = 0; k < config.samples; ++k) {
          auto point = sample_point(vars, box, rng);
          for (std::size_t i = 0; i < vars.size(); ++i) coords[i] = point[vars[i]];
          Rational dv = fn->den.eval(coords);
          if (dv == 0) continue;
          Rational nv = fn->num.eval(coords);
          if (nv != 0) {
            verdict.kind = ZeroKind::NotIdenticallyZero;
            verdict.exact = true;
            verdict.witness = std::move(point);
            verdict.witness_value = rational_to_double(nv / dv);
            return verdict;
          }
        }
        auto point = grid_witness(fn->num, fn->den, vars, box, config.limits);
        for (std::size_t i = 0; i < vars.size(); ++i) coords[i] = point[vars[i]];
        Rational dv = fn->den.eval(coords);
        verdict.kind = ZeroKind::NotIdenticallyZero;
        verdict.exact = true;
        verdict.witness = std::move(point);
        verdict.witness_value =
            dv == 0 ? 0.0 : rational_to_double(fn->num.eval(coords) / dv);
        return verdict;
      }
    } catch (const PolyOverflow&) {
      // fall through to exact sampling
    }

    // sqrt-free but too large to expand: exact evaluation at sample points
    std::mt19937_64 rng(config.seed);
    bool all_zero = true;
    int evaluated = 0;
    for (int k = 0; k < config.samples; ++k) {
      auto point = sample_point(vars, box, rng);
      try {
        Rational v = evaluate_exact(s, point);
        ++evaluated;
        if (v != 0) {
          verdict.kind = ZeroKind::NotIdenticallyZero;
          verdict.exact = true;
          verdict.witness = std::move(point);
          verdict.witness_value = rational_to_double(v);
          return verdict;
        }
      } catch (const EvalError&) {
        all_zero = false;  // pole at the sample; inconclusive contribution
      }
    }
    if (all_zero && evaluated > 0) {
      verdict.kind = ZeroKind::IdenticallyZero;
      verdict.exact = false;
      verdict.note = "sampled decision (normal form over limits)";
    } else {
      verdict.kind = ZeroKind::Unknown;
      verdict.note = "evaluation failures during sampling";
    }
    return verdict;
  }

  // sqrt-bearing: samples can refute, never certify
  std::mt19937_64 rng(config.seed);
  for (int k = 0; k < config.samples; ++k) {
    auto point = sample_point(vars, box, rng);
    std::map<std::string, double> at;
    for (const auto& [name, r] : point) at[name] = rational_to_double(r);
    try {
      double v = evaluate(s, at);
      if (std::abs(v) > tol) {
        verdict.kind = ZeroKind::NotIdenticallyZero;
        verdict.witness = std::move(point);
        verdict.witness_value = v;
        return verdict;
      }
    } catch (const EvalError&) {
      // outside the expression's domain; skip
    }
  }
  verdict.kind = ZeroKind::Unknown;
  verdict.note = "sqrt expression within tolerance at all samples";
  return verdict;
}

}  // namespace infoflow
