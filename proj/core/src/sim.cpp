#include "infoflow/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace infoflow {

namespace {

constexpr double kDivergenceCutoff = 1e9;
constexpr double kObjectiveTolerance = 1e-6;

std::vector<std::string> state_slot_names(const SystemDef& sys) { return sys.state_vars; }

}  // namespace

ClosedLoop::ClosedLoop(const SystemDef& sys, const std::vector<std::vector<Expr>>& controls,
                       const std::map<std::string, double>& mu) {
  if (controls.size() != sys.agents.size())
    throw ValidationError("one control list per agent is required");
  state_dim_ = sys.state_vars.size();
  system_name_ = sys.name;

  std::map<std::string, double> mu_map = mu;
  auto state_slots = state_slot_names(sys);

  for (std::size_t ai = 0; ai < sys.agents.size(); ++ai) {
    const Agent& a = sys.agents[ai];
    if (controls[ai].size() != a.fields.size())
      throw ValidationError("agent " + std::to_string(a.index) +
                            " needs one control per field");
    AgentProgram prog;
    for (const auto& c : a.observation.components)
      prog.observation.push_back(CompiledExpr::compile(c, state_slots));
    for (const auto& d : a.delta) {
      std::map<std::string, double> pvals;
      for (const auto& v : free_vars(d)) {
        auto it = mu_map.find(v);
        if (it == mu_map.end())
          throw ValidationError("parameter '" + v + "' missing from mu assignment");
        pvals[v] = it->second;
      }
      prog.delta_values.push_back(evaluate(d, pvals));
    }

    // control expressions live over this agent's observation/delta names only
    std::vector<std::string> slot_names = sys.control_slot_names(a);
    std::set<std::string> allowed(slot_names.begin(), slot_names.end());
    for (std::size_t fi = 0; fi < a.fields.size(); ++fi) {
      for (const auto& v : free_vars(controls[ai][fi]))
        if (!allowed.count(v))
          throw ValidationError("control for field '" + a.fields[fi].name + "' references '" +
                                v + "', which is not an observation or delta component of agent " +
                                std::to_string(a.index));
      prog.controls.push_back(CompiledExpr::compile(controls[ai][fi], slot_names));

      std::vector<std::pair<std::size_t, CompiledExpr>> comps;
      const auto& field = a.fields[fi].field;
      for (std::size_t c = 0; c < field.components.size(); ++c) {
        if (field.components[c].is_constant(Rational(0))) continue;
        comps.emplace_back(c, CompiledExpr::compile(field.components[c], state_slots));
      }
      prog.field_components.push_back(std::move(comps));
    }
    agents_.push_back(std::move(prog));
  }
}

ClosedLoop ClosedLoop::from_system_controls(const SystemDef& sys,
                                            const std::map<std::string, double>& mu) {
  std::vector<std::vector<Expr>> controls;
  for (const auto& a : sys.agents) {
    std::vector<Expr> list;
    for (std::size_t i = 0; i < a.fields.size(); ++i) {
      if (i >= a.controls.size() || !a.controls[i])
        throw ValidationError("agent " + std::to_string(a.index) + " field '" +
                              a.fields[i].name + "' has no control law");
      list.push_back(*a.controls[i]);
    }
    controls.push_back(std::move(list));
  }
  return ClosedLoop(sys, controls, mu);
}

std::vector<double> ClosedLoop::rhs(std::span<const double> state) const {
  std::vector<double> out(state_dim_, 0.0);
  std::vector<double> slot_values;
  for (const auto& prog : agents_) {
    slot_values.clear();
    for (const auto& obs : prog.observation) slot_values.push_back(obs.eval(state));
    bool single_obs = prog.observation.size() == 1;
    if (single_obs) slot_values.push_back(slot_values[0]);  // bare-name alias slot
    for (double d : prog.delta_values) slot_values.push_back(d);
    if (prog.delta_values.size() == 1) slot_values.push_back(prog.delta_values[0]);

    for (std::size_t fi = 0; fi < prog.controls.size(); ++fi) {
      double u = prog.controls[fi].eval(slot_values);
      if (u == 0.0) continue;
      for (const auto& [idx, comp] : prog.field_components[fi]) out[idx] += u * comp.eval(state);
    }
  }
  return out;
}

Trajectory integrate(const ClosedLoop& loop, const std::vector<double>& x0, double dt,
                     double t_end) {
  if (dt <= 0 || t_end <= 0) throw ValidationError("dt and t_end must be positive");
  if (x0.size() != loop.dimension()) throw ValidationError("initial state dimension mismatch");

  Trajectory traj;
  traj.dt = dt;
  traj.meta.system = loop.system_name();
  traj.meta.control_law = "file";

  std::size_t steps = static_cast<std::size_t>(std::llround(t_end / dt));
  std::vector<double> x = x0;
  std::vector<double> xt(x.size());
  traj.times.push_back(0.0);
  traj.states.push_back(x);

  for (std::size_t s = 1; s <= steps; ++s) {
    auto k1 = loop.rhs(x);
    for (std::size_t i = 0; i < x.size(); ++i) xt[i] = x[i] + 0.5 * dt * k1[i];
    auto k2 = loop.rhs(xt);
    for (std::size_t i = 0; i < x.size(); ++i) xt[i] = x[i] + 0.5 * dt * k2[i];
    auto k3 = loop.rhs(xt);
    for (std::size_t i = 0; i < x.size(); ++i) xt[i] = x[i] + dt * k3[i];
    auto k4 = loop.rhs(xt);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] += dt * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) / 6.0;

    bool finite = true;
    for (double v : x)
      if (!std::isfinite(v) || std::abs(v) > kDivergenceCutoff) finite = false;
    if (!finite) {
      traj.diverged = true;
      break;
    }
    traj.times.push_back(static_cast<double>(s) * dt);
    traj.states.push_back(x);
  }
  return traj;
}

Trajectory integrate(const SystemDef& sys, const std::vector<std::vector<Expr>>& controls,
                     const std::vector<double>& x0, const std::map<std::string, double>& mu,
                     double dt, double t_end) {
  ClosedLoop loop(sys, controls, mu);
  Trajectory t = integrate(loop, x0, dt, t_end);
  t.meta.system = sys.name;
  return t;
}

std::vector<double> edge_errors(const SystemDef& sys, std::span<const double> state,
                                const std::map<std::string, double>& mu, bool squared) {
  std::map<std::string, std::size_t> state_index;
  for (std::size_t i = 0; i < sys.state_vars.size(); ++i) state_index[sys.state_vars[i]] = i;

  std::vector<double> out;
  for (const auto& e : sys.formation_edges) {
    const Agent& a = sys.agent(e.agent_a);
    const Agent& b = sys.agent(e.agent_b);
    if (a.owned_vars.size() != b.owned_vars.size() || a.owned_vars.empty())
      throw ValidationError("formation edge endpoints must own equally sized variable groups");
    double dist2 = 0;
    for (std::size_t c = 0; c < a.owned_vars.size(); ++c) {
      double diff = state[state_index.at(b.owned_vars[c])] - state[state_index.at(a.owned_vars[c])];
      dist2 += diff * diff;
    }
    auto it = mu.find(e.target_param);
    if (it == mu.end())
      throw ValidationError("edge target parameter '" + e.target_param + "' missing from mu");
    out.push_back(squared ? dist2 - it->second : std::sqrt(dist2) - it->second);
  }
  return out;
}

Matrix numeric_jacobian(const std::function<std::vector<double>(std::span<const double>)>& f,
                        const std::vector<double>& x) {
  std::vector<double> base = f(x);
  Matrix jac(base.size(), std::vector<double>(x.size(), 0.0));
  std::vector<double> xp = x;
  for (std::size_t c = 0; c < x.size(); ++c) {
    double h = 1e-6 * std::max(1.0, std::abs(x[c]));
    xp[c] = x[c] + h;
    auto fp = f(xp);
    xp[c] = x[c] - h;
    auto fm = f(xp);
    xp[c] = x[c];
    for (std::size_t r = 0; r < base.size(); ++r) {
      double v = (fp[r] - fm[r]) / (2.0 * h);
      if (!std::isfinite(v)) throw EvalError("non-finite value in numeric Jacobian");
      jac[r][c] = v;
    }
  }
  return jac;
}

std::vector<double> stability_margins(const Matrix& jacobian) {
  std::size_t n = jacobian.size();
  if (n == 0 || n > 64) throw ValidationError("stability margins support 1..64 dimensions");
  Eigen::MatrixXd m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    if (jacobian[r].size() != n) throw ValidationError("jacobian must be square");
    for (std::size_t c = 0; c < n; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = jacobian[r][c];
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw EvalError("eigenvalue iteration did not converge");
  std::vector<std::pair<double, double>> spectrum;  // (re, im)
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    spectrum.emplace_back(solver.eigenvalues()[i].real(), solver.eigenvalues()[i].imag());
  std::sort(spectrum.begin(), spectrum.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  });
  std::vector<double> margins;
  for (const auto& [re, im] : spectrum) margins.push_back(-re);
  return margins;
}

ObjectiveResult evaluate_objective(const ObjectiveSpec& objective,
                                   const std::map<std::string, double>& assignment,
                                   const std::optional<Matrix>& jacobian) {
  if (objective.uses_jacobian_eigenvalues && !jacobian)
    throw ValidationError("objective declares eigenvalue components but no Jacobian was given");

  ObjectiveResult result;
  for (const auto& c : objective.components) result.values.push_back(evaluate(c, assignment));
  if (objective.uses_jacobian_eigenvalues) {
    for (double m : stability_margins(*jacobian)) result.values.push_back(m);
  }
  for (std::size_t i = 0; i < result.values.size(); ++i) {
    double v = result.values[i];
    bool ok = objective.kind == ObjectiveKind::Equality ? std::abs(v) <= kObjectiveTolerance
                                                        : v >= -kObjectiveTolerance;
    if (!ok) {
      result.satisfied = false;
      result.violated_components.push_back(static_cast<int>(i));
    }
  }
  return result;
}

std::string trajectory_to_csv(const Trajectory& t, const std::vector<std::string>& state_vars) {
  std::ostringstream os;
  os << "t";
  for (const auto& v : state_vars) os << "," << v;
  os << "\n";
  char buf[32];
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", t.times[k]);
    os << buf;
    for (double x : t.states[k]) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      os << "," << buf;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace infoflow
