#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "infoflow/expr.hpp"
#include "infoflow/poly.hpp"

namespace infoflow {

/// Per-variable closed intervals used for sampling and witness search.
/// Variables without an entry default to [-1, 1].
struct DomainBox {
  std::map<std::string, std::pair<double, double>> intervals;

  std::pair<double, double> get(const std::string& var) const {
    auto it = intervals.find(var);
    return it == intervals.end() ? std::pair<double, double>{-1.0, 1.0} : it->second;
  }
};

enum class ZeroKind { IdenticallyZero, NotIdenticallyZero, Unknown };

struct ZeroVerdict {
  ZeroKind kind = ZeroKind::Unknown;
  /// For NotIdenticallyZero: a point where the expression is nonzero.
  std::map<std::string, Rational> witness;
  double witness_value = 0.0;
  /// True when the verdict came from the exact polynomial route.
  bool exact = false;
  std::string note;
};

struct ZeroConfig {
  int samples = 64;
  std::uint64_t seed = 0xDECE;
  double base_tolerance = 1e-9;
  PolyLimits limits;
};

/// Absolute comparison tolerance for e: base scaled by max(1, #terms).
double zero_tolerance(const Expr& e, double base_tolerance);

/// Decides whether e vanishes identically on the box.
///
/// sqrt-free expressions are decided exactly through the rational normal form
/// when within limits, and otherwise by exact evaluation at deterministic
/// pseudorandom rational points. Expressions containing sqrt are only ever
/// refuted by a sample; when all samples stay within tolerance the verdict is
/// Unknown, never IdenticallyZero.
ZeroVerdict is_zero(const Expr& e, const DomainBox& box, const ZeroConfig& config = {});

}  // namespace infoflow
