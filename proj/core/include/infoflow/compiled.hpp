#pragma once

#include <span>
#include <string>
#include <vector>

#include "infoflow/expr.hpp"

namespace infoflow {

/// Expression flattened to a postfix program over a fixed variable slot
/// table. Used on hot paths (integration, sampling) where map lookups per
/// node would dominate.
class CompiledExpr {
 public:
  /// Throws EvalError if the expression references a name outside slots.
  static CompiledExpr compile(const Expr& e, const std::vector<std::string>& slots);

  double eval(std::span<const double> slot_values) const;

 private:
  enum class OpCode { PushConst, PushVar, Add, Mul, Neg, PowInt, Sqrt };
  struct Op {
    OpCode code;
    double constant = 0.0;
    int slot = 0;
    long long exponent = 0;
  };
  std::vector<Op> ops_;
  std::size_t max_depth_ = 0;
};

}  // namespace infoflow
