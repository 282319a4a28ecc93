#include "infoflow/model.hpp"

#include <algorithm>
#include <set>

namespace infoflow {

int FlowGraph::vertex_index(const std::string& name) const {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] == name) return static_cast<int>(i);
  return -1;
}

const Agent& SystemDef::agent(int index) const {
  for (const auto& a : agents)
    if (a.index == index) return a;
  throw ValidationError("no agent with index " + std::to_string(index));
}

bool SystemDef::is_state_var(const std::string& v) const {
  return std::find(state_vars.begin(), state_vars.end(), v) != state_vars.end();
}

bool SystemDef::is_parameter_var(const std::string& v) const {
  return std::find(parameter_vars.begin(), parameter_vars.end(), v) != parameter_vars.end();
}

std::vector<std::string> SystemDef::control_slot_names(const Agent& a) const {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < a.observation.components.size(); ++k)
    names.push_back(a.observation.name + "_" + std::to_string(k + 1));
  if (a.observation.components.size() == 1) names.push_back(a.observation.name);
  std::string delta_base = "delta" + std::to_string(a.index);
  for (std::size_t k = 0; k < a.delta.size(); ++k)
    names.push_back(delta_base + "_" + std::to_string(k + 1));
  if (a.delta.size() == 1) names.push_back(delta_base);
  return names;
}

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

void check_vars_declared(const Expr& e, const SystemDef& sys, bool allow_state,
                         bool allow_param, const std::string& context) {
  for (const auto& v : free_vars(e)) {
    bool ok = (allow_state && sys.is_state_var(v)) || (allow_param && sys.is_parameter_var(v));
    require(ok, "undeclared variable '" + v + "' in " + context);
  }
}

}  // namespace

void validate_system(const SystemDef& sys) {
  require(!sys.state_vars.empty(), "system declares no state variables");
  std::set<std::string> seen;
  for (const auto& v : sys.state_vars)
    require(seen.insert(v).second, "duplicate variable '" + v + "'");
  for (const auto& v : sys.parameter_vars)
    require(seen.insert(v).second, "duplicate variable '" + v + "'");

  require(!sys.agents.empty(), "system declares no agents");
  std::set<std::string> obs_names;
  std::set<std::string> owned_seen;
  for (std::size_t i = 0; i < sys.agents.size(); ++i) {
    const Agent& a = sys.agents[i];
    require(a.index == static_cast<int>(i) + 1,
            "agent indices must be contiguous starting at 1");
    const std::string ctx = "agent " + std::to_string(a.index);

    require(!a.observation.name.empty(), ctx + " observation has no name");
    require(obs_names.insert(a.observation.name).second,
            "duplicate observation name '" + a.observation.name + "'");
    require(!a.observation.components.empty(), ctx + " observation has no components");
    for (const auto& c : a.observation.components)
      check_vars_declared(c, sys, true, false, ctx + " observation");

    require(!a.fields.empty(), ctx + " declares no control vector fields");
    for (const auto& f : a.fields) {
      require(f.field.components.size() == sys.state_vars.size(),
              "vector field length mismatch for '" + f.name + "' in " + ctx);
      for (const auto& c : f.field.components)
        check_vars_declared(c, sys, true, false, ctx + " field " + f.name);
    }
    require(a.controls.empty() || a.controls.size() == a.fields.size(),
            ctx + " controls must align with fields");

    for (const auto& d : a.delta) check_vars_declared(d, sys, false, true, ctx + " delta");
    if (a.local_objective) {
      require(!a.local_objective->components.empty(), ctx + " local objective is empty");
      for (const auto& c : a.local_objective->components)
        check_vars_declared(c, sys, true, true, ctx + " local objective");
    }
    for (const auto& v : a.owned_vars) {
      require(sys.is_state_var(v), "agent " + std::to_string(a.index) +
                                       " owns undeclared variable '" + v + "'");
      require(owned_seen.insert(v).second,
              "variable '" + v + "' owned by more than one agent");
    }
  }

  if (sys.global_objective) {
    require(!sys.global_objective->components.empty(), "global objective is empty");
    for (const auto& c : sys.global_objective->components)
      check_vars_declared(c, sys, true, true, "global objective");
  }

  for (const auto& e : sys.formation_edges) {
    require(e.agent_a >= 1 && e.agent_a <= static_cast<int>(sys.agents.size()) &&
                e.agent_b >= 1 && e.agent_b <= static_cast<int>(sys.agents.size()),
            "formation edge references an unknown agent");
    require(sys.is_parameter_var(e.target_param),
            "formation edge target '" + e.target_param + "' is not a parameter");
  }

  for (const auto& ch : sys.changes) {
    require(ch.new_vars.size() == sys.state_vars.size(),
            "coordinate change must introduce one variable per state variable");
    require(ch.forward.size() == ch.new_vars.size(),
            "coordinate change forward map is incomplete");
    require(ch.inverse.size() == sys.state_vars.size(),
            "coordinate change inverse map is incomplete");
    std::set<std::string> nv;
    for (const auto& v : ch.new_vars) {
      require(nv.insert(v).second, "duplicate coordinate '" + v + "' in change");
      require(!sys.is_state_var(v) && !sys.is_parameter_var(v),
              "new coordinate '" + v + "' clashes with a declared variable");
    }
    for (const auto& f : ch.forward) check_vars_declared(f, sys, true, false, "change forward");
    for (const auto& f : ch.inverse)
      for (const auto& v : free_vars(f))
        require(nv.count(v) > 0, "undeclared variable '" + v + "' in change inverse");
  }
}

void validate_change(const SystemDef& sys, const CoordinateChange& change,
                     const ZeroConfig& config) {
  std::map<std::string, Expr> inv_subst;  // x_i -> inverse_i(z)
  for (std::size_t i = 0; i < sys.state_vars.size(); ++i)
    inv_subst[sys.state_vars[i]] = change.inverse[i];
  std::map<std::string, Expr> fwd_subst;  // z_k -> forward_k(x)
  for (std::size_t k = 0; k < change.new_vars.size(); ++k)
    fwd_subst[change.new_vars[k]] = change.forward[k];

  DomainBox box = sys.domain_box;  // new vars default to [-1, 1]
  for (std::size_t k = 0; k < change.new_vars.size(); ++k) {
    Expr diff = substitute(change.forward[k], inv_subst) - Expr::variable(change.new_vars[k]);
    if (is_zero(diff, box, config).kind != ZeroKind::IdenticallyZero)
      throw ValidationError("coordinate change round-trip failed for " + change.new_vars[k]);
  }
  for (std::size_t i = 0; i < sys.state_vars.size(); ++i) {
    Expr diff = substitute(change.inverse[i], fwd_subst) - Expr::variable(sys.state_vars[i]);
    if (is_zero(diff, box, config).kind != ZeroKind::IdenticallyZero)
      throw ValidationError("coordinate change round-trip failed for " + sys.state_vars[i]);
  }
}

SystemDef transform_system(const SystemDef& sys, const CoordinateChange& change,
                           const ZeroConfig& config) {
  if (change.new_vars.size() != sys.state_vars.size())
    throw ValidationError("coordinate change dimension mismatch");
  validate_change(sys, change, config);

  std::map<std::string, Expr> inv_subst;
  for (std::size_t i = 0; i < sys.state_vars.size(); ++i)
    inv_subst[sys.state_vars[i]] = change.inverse[i];

  // rows of the Jacobian of the forward map, as expressions in x
  std::vector<std::vector<Expr>> jac(change.new_vars.size());
  for (std::size_t r = 0; r < change.new_vars.size(); ++r) {
    jac[r].reserve(sys.state_vars.size());
    for (const auto& xv : sys.state_vars) jac[r].push_back(differentiate(change.forward[r], xv));
  }

  SystemDef out = sys;
  out.state_vars = change.new_vars;
  out.changes.clear();
  out.domain_box.intervals.clear();
  for (const auto& p : sys.parameter_vars) {
    auto it = sys.domain_box.intervals.find(p);
    if (it != sys.domain_box.intervals.end()) out.domain_box.intervals[p] = it->second;
  }

  std::map<std::string, std::string> positional;  // old state var -> new var
  for (std::size_t i = 0; i < sys.state_vars.size(); ++i)
    positional[sys.state_vars[i]] = change.new_vars[i];

  for (auto& a : out.agents) {
    for (auto& c : a.observation.components) c = substitute(c, inv_subst);
    for (auto& f : a.fields) {
      std::vector<Expr> comps(change.new_vars.size());
      for (std::size_t r = 0; r < change.new_vars.size(); ++r) {
        std::vector<Expr> addends;
        for (std::size_t c = 0; c < sys.state_vars.size(); ++c)
          addends.push_back(jac[r][c] * f.field.components[c]);
        comps[r] = substitute(simplify(Expr::sum(std::move(addends))), inv_subst);
      }
      f.field.components = std::move(comps);
    }
    if (a.local_objective)
      for (auto& c : a.local_objective->components) c = substitute(c, inv_subst);
    for (auto& v : a.owned_vars) v = positional.at(v);
  }
  if (out.global_objective)
    for (auto& c : out.global_objective->components) c = substitute(c, inv_subst);

  validate_system(out);
  return out;
}

FlowGraph naive_flow_graph(const SystemDef& sys, const ZeroConfig& config) {
  for (const auto& a : sys.agents)
    if (a.owned_vars.empty())
      throw ValidationError("agent " + std::to_string(a.index) +
                            " has no owned variables (required for the naive flow graph)");

  std::map<std::string, int> owner;
  for (const auto& a : sys.agents)
    for (const auto& v : a.owned_vars) owner[v] = a.index;

  FlowGraph g;
  for (const auto& a : sys.agents) g.vertices.push_back(std::to_string(a.index));

  for (const auto& a : sys.agents) {
    // Variables read by the dynamics this agent's controls induce on its own
    // group: the control arguments (observation and delta components) when
    // some own-group component of a field is nonzero, plus the free variables
    // of those components themselves.
    std::set<std::string> reads;
    std::set<std::string> control_args;
    for (const auto& c : a.observation.components) {
      auto fv = free_vars(c);
      control_args.insert(fv.begin(), fv.end());
    }
    for (const auto& d : a.delta) {
      auto fv = free_vars(d);
      control_args.insert(fv.begin(), fv.end());
    }
    for (const auto& f : a.fields) {
      bool drives_own_group = false;
      for (std::size_t c = 0; c < sys.state_vars.size(); ++c) {
        if (std::find(a.owned_vars.begin(), a.owned_vars.end(), sys.state_vars[c]) ==
            a.owned_vars.end())
          continue;
        const Expr& comp = f.field.components[c];
        if (is_zero(comp, sys.domain_box, config).kind == ZeroKind::IdenticallyZero) continue;
        drives_own_group = true;
        auto fv = free_vars(comp);
        reads.insert(fv.begin(), fv.end());
      }
      if (drives_own_group) reads.insert(control_args.begin(), control_args.end());
    }

    for (const auto& v : reads) {
      auto it = owner.find(v);
      if (it == owner.end() || it->second == a.index) continue;
      auto key = std::make_pair(a.index - 1, it->second - 1);
      if (g.edges.insert(key).second) {
        EdgeEvidence ev;
        ev.bracket_word = "depends on " + v;
        g.evidence[key] = std::move(ev);
      }
    }
  }
  return g;
}

}  // namespace infoflow
