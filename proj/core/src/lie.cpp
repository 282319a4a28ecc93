#include "infoflow/lie.hpp"

namespace infoflow {

std::vector<Expr> lie_derivative(const VectorField& g, const std::vector<Expr>& h_components,
                                 const std::vector<std::string>& state_vars) {
  if (g.components.size() != state_vars.size())
    throw ValidationError("vector field dimension mismatch in lie_derivative");
  std::vector<Expr> out;
  out.reserve(h_components.size());
  for (const auto& h : h_components) {
    std::vector<Expr> addends;
    for (std::size_t j = 0; j < state_vars.size(); ++j)
      addends.push_back(g.components[j] * differentiate(h, state_vars[j]));
    out.push_back(simplify(Expr::sum(std::move(addends))));
  }
  return out;
}

std::vector<std::vector<Expr>> jacobian(const VectorField& g,
                                        const std::vector<std::string>& state_vars) {
  std::vector<std::vector<Expr>> out(g.components.size());
  for (std::size_t r = 0; r < g.components.size(); ++r) {
    out[r].reserve(state_vars.size());
    for (const auto& var : state_vars) out[r].push_back(differentiate(g.components[r], var));
  }
  return out;
}

VectorField lie_bracket(const VectorField& g1, const VectorField& g2,
                        const std::vector<std::string>& state_vars) {
  if (g1.components.size() != g2.components.size() || g1.components.size() != state_vars.size())
    throw ValidationError("vector field dimension mismatch in lie_bracket");
  auto j1 = jacobian(g1, state_vars);
  auto j2 = jacobian(g2, state_vars);
  VectorField out;
  out.components.reserve(state_vars.size());
  for (std::size_t r = 0; r < state_vars.size(); ++r) {
    std::vector<Expr> addends;
    for (std::size_t c = 0; c < state_vars.size(); ++c) {
      addends.push_back(j2[r][c] * g1.components[c]);
      addends.push_back(Expr::negate(j1[r][c] * g2.components[c]));
    }
    out.components.push_back(simplify(Expr::sum(std::move(addends))));
  }
  return out;
}

namespace {

bool field_is_zero(const VectorField& f, const DomainBox& box, const ZeroConfig& config) {
  for (const auto& c : f.components)
    if (is_zero(c, box, config).kind != ZeroKind::IdenticallyZero) return false;
  return true;
}

bool fields_equal(const VectorField& a, const VectorField& b, const DomainBox& box,
                  const ZeroConfig& config) {
  for (std::size_t i = 0; i < a.components.size(); ++i)
    if (is_zero(simplify(a.components[i] - b.components[i]), box, config).kind !=
        ZeroKind::IdenticallyZero)
      return false;
  return true;
}

}  // namespace

BracketClosure bracket_closure(const std::vector<NamedField>& generators,
                               const std::vector<std::string>& state_vars, int depth,
                               const DomainBox& box, const ZeroConfig& config) {
  if (depth < 1) throw ValidationError("bracket closure depth must be >= 1");
  BracketClosure closure;
  closure.depth = depth;

  auto add_member = [&](std::string word, VectorField field, int length) {
    if (field_is_zero(field, box, config)) return;
    for (const auto& m : closure.members)
      if (fields_equal(m.field, field, box, config)) return;
    closure.members.push_back({std::move(word), std::move(field), length});
  };

  for (const auto& g : generators) add_member(g.name, g.field, 1);

  for (int len = 2; len <= depth; ++len) {
    // snapshot: members added for this length must not feed themselves
    std::size_t existing = closure.members.size();
    for (std::size_t a = 0; a < existing; ++a) {
      for (std::size_t b = 0; b < existing; ++b) {
        if (a == b) continue;
        if (closure.members[a].length + closure.members[b].length != len) continue;
        VectorField bracket =
            lie_bracket(closure.members[a].field, closure.members[b].field, state_vars);
        add_member("[" + closure.members[a].word + "," + closure.members[b].word + "]",
                   std::move(bracket), len);
      }
    }
  }
  return closure;
}

}  // namespace infoflow
