#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infoflow/compiled.hpp"
#include "infoflow/model.hpp"

namespace infoflow {

using Matrix = std::vector<std::vector<double>>;

struct TrajectoryMeta {
  std::string system;
  std::string control_law;
  std::uint64_t seed = 0;
};

struct Trajectory {
  std::vector<double> times;                // strictly increasing, uniform dt
  std::vector<std::vector<double>> states;  // aligned with times
  double dt = 0;
  TrajectoryMeta meta;
  /// Set when the state left the divergence cutoff and the run was truncated.
  bool diverged = false;
};

/// Closed-loop right-hand side sum_ij u_ij(h_i, delta_i) g_ij assembled from
/// a system and per-field control expressions. Controls may reference only
/// their own agent's observation/delta component names; violations throw
/// ValidationError at construction.
class ClosedLoop {
 public:
  ClosedLoop(const SystemDef& sys, const std::vector<std::vector<Expr>>& controls_per_agent,
             const std::map<std::string, double>& mu);

  /// Uses the control laws embedded in the system definition.
  static ClosedLoop from_system_controls(const SystemDef& sys,
                                         const std::map<std::string, double>& mu);

  std::vector<double> rhs(std::span<const double> state) const;
  std::size_t dimension() const { return state_dim_; }
  const std::string& system_name() const { return system_name_; }

 private:
  struct AgentProgram {
    std::vector<CompiledExpr> observation;   // over state slots
    std::vector<double> delta_values;        // delta at mu, fixed
    std::vector<CompiledExpr> controls;      // over [obs..., delta...] slots
    std::vector<std::vector<std::pair<std::size_t, CompiledExpr>>> field_components;
    // per field: (state index, component) for nonzero components only
  };
  std::size_t state_dim_ = 0;
  std::string system_name_;
  std::vector<AgentProgram> agents_;
};

/// Classical fixed-step fourth-order Runge-Kutta integration. Truncates with
/// the diverged flag when |x|_inf exceeds 1e9.
Trajectory integrate(const ClosedLoop& loop, const std::vector<double>& x0, double dt,
                     double t_end);

Trajectory integrate(const SystemDef& sys, const std::vector<std::vector<Expr>>& controls,
                     const std::vector<double>& x0, const std::map<std::string, double>& mu,
                     double dt, double t_end);

/// e_k = ||x_b - x_a||^2 - d_k over the system's formation edges (or the
/// unsquared ||x_b - x_a|| - d_k variant). Agent positions are their owned
/// variables, which must have equal counts across each edge's pair.
std::vector<double> edge_errors(const SystemDef& sys, std::span<const double> state,
                                const std::map<std::string, double>& mu, bool squared = true);

/// Central finite differences with step 1e-6 * max(1, |x_j|).
Matrix numeric_jacobian(const std::function<std::vector<double>(std::span<const double>)>& f,
                        const std::vector<double>& x);

/// -Re(lambda_i), ordered by descending real part of the spectrum; all
/// entries positive certifies the stabilization components of an objective.
/// Throws ValidationError for matrices larger than 64x64 and EvalError when
/// the eigenvalue iteration fails to converge.
std::vector<double> stability_margins(const Matrix& jacobian);

struct ObjectiveResult {
  bool satisfied = true;
  std::vector<int> violated_components;
  std::vector<double> values;  // expression components, then margins
};

/// Entrywise objective check with tolerance 1e-6: equality components use
/// |v| <= tol, inequality components v >= -tol. The Jacobian is required
/// exactly when the objective declares eigenvalue components.
ObjectiveResult evaluate_objective(const ObjectiveSpec& objective,
                                   const std::map<std::string, double>& assignment,
                                   const std::optional<Matrix>& jacobian = std::nullopt);

std::string trajectory_to_csv(const Trajectory& t, const std::vector<std::string>& state_vars);

}  // namespace infoflow
