#include "infoflow/compiled.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace infoflow {

CompiledExpr CompiledExpr::compile(const Expr& e, const std::vector<std::string>& slots) {
  std::map<std::string, int> slot_of;
  for (std::size_t i = 0; i < slots.size(); ++i) slot_of[slots[i]] = static_cast<int>(i);

  CompiledExpr out;
  std::size_t depth = 0;
  std::size_t max_depth = 0;

  auto emit = [&](auto&& self, const Expr& node) -> void {
    auto push = [&](Op op) {
      out.ops_.push_back(op);
    };
    switch (node.kind()) {
      case ExprKind::Constant:
        push({OpCode::PushConst, rational_to_double(node.value()), 0, 0});
        ++depth;
        break;
      case ExprKind::Variable: {
        auto it = slot_of.find(node.name());
        if (it == slot_of.end()) throw EvalError("unbound variable: " + node.name());
        push({OpCode::PushVar, 0.0, it->second, 0});
        ++depth;
        break;
      }
      case ExprKind::Negate:
        self(self, node.operands()[0]);
        push({OpCode::Neg, 0.0, 0, 0});
        break;
      case ExprKind::Sqrt:
        self(self, node.operands()[0]);
        push({OpCode::Sqrt, 0.0, 0, 0});
        break;
      case ExprKind::Power:
        self(self, node.operands()[0]);
        push({OpCode::PowInt, 0.0, 0, node.exponent()});
        break;
      case ExprKind::Sum: {
        const auto& kids = node.operands();
        if (kids.empty()) {
          push({OpCode::PushConst, 0.0, 0, 0});
          ++depth;
          break;
        }
        self(self, kids[0]);
        for (std::size_t i = 1; i < kids.size(); ++i) {
          self(self, kids[i]);
          push({OpCode::Add, 0.0, 0, 0});
          --depth;
        }
        break;
      }
      case ExprKind::Product: {
        const auto& kids = node.operands();
        if (kids.empty()) {
          push({OpCode::PushConst, 1.0, 0, 0});
          ++depth;
          break;
        }
        self(self, kids[0]);
        for (std::size_t i = 1; i < kids.size(); ++i) {
          self(self, kids[i]);
          push({OpCode::Mul, 0.0, 0, 0});
          --depth;
        }
        break;
      }
    }
    max_depth = std::max(max_depth, depth);
  };
  emit(emit, e);

  out.max_depth_ = max_depth + 1;
  return out;
}

double CompiledExpr::eval(std::span<const double> slot_values) const {
  thread_local std::vector<double> scratch;
  if (scratch.size() < max_depth_) scratch.resize(max_depth_);
  double* sp = scratch.data();
  std::size_t top = 0;
  for (const Op& op : ops_) {
    switch (op.code) {
      case OpCode::PushConst:
        sp[top++] = op.constant;
        break;
      case OpCode::PushVar:
        sp[top++] = slot_values[static_cast<std::size_t>(op.slot)];
        break;
      case OpCode::Add:
        sp[top - 2] += sp[top - 1];
        --top;
        break;
      case OpCode::Mul:
        sp[top - 2] *= sp[top - 1];
        --top;
        break;
      case OpCode::Neg:
        sp[top - 1] = -sp[top - 1];
        break;
      case OpCode::Sqrt:
        sp[top - 1] = std::sqrt(sp[top - 1]);
        break;
      case OpCode::PowInt: {
        double base = sp[top - 1];
        long long n = op.exponent;
        if (n == 0) {
          sp[top - 1] = 1.0;
          break;
        }
        bool invert = n < 0;
        unsigned long long m = invert ? static_cast<unsigned long long>(-(n + 1)) + 1ULL
                                      : static_cast<unsigned long long>(n);
        double acc = 1.0;
        double b = base;
        while (m > 0) {
          if (m & 1ULL) acc *= b;
          b *= b;
          m >>= 1;
        }
        sp[top - 1] = invert ? 1.0 / acc : acc;
        break;
      }
    }
  }
  return top > 0 ? sp[top - 1] : 0.0;
}

}  // namespace infoflow
