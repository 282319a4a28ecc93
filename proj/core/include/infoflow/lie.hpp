#pragma once

#include <string>
#include <vector>

#include "infoflow/model.hpp"

namespace infoflow {

/// Directional derivative of each observation component along g:
/// result[c] = sum_j g_j * d h^c / d x_j, simplified.
std::vector<Expr> lie_derivative(const VectorField& g, const std::vector<Expr>& h_components,
                                 const std::vector<std::string>& state_vars);

/// Jacobian matrix: entry (r, c) = d g_r / d x_c.
std::vector<std::vector<Expr>> jacobian(const VectorField& g,
                                        const std::vector<std::string>& state_vars);

/// [g1, g2] = (dg2/dx) g1 - (dg1/dx) g2.
VectorField lie_bracket(const VectorField& g1, const VectorField& g2,
                        const std::vector<std::string>& state_vars);

struct ClosureMember {
  std::string word;  // e.g. "[g1,[g1,g2]]"
  VectorField field;
  int length = 1;  // bracket word length
};

struct BracketClosure {
  std::vector<ClosureMember> members;
  int depth = 1;
};

/// All iterated bracket words of length <= depth over the generators, in a
/// canonical generation order. Fields certified identically zero are dropped
/// and members certified equal to an earlier member are deduplicated, so the
/// result is deterministic.
BracketClosure bracket_closure(const std::vector<NamedField>& generators,
                               const std::vector<std::string>& state_vars, int depth,
                               const DomainBox& box, const ZeroConfig& config = {});

}  // namespace infoflow
