#pragma once

#include <optional>
#include <string>
#include <vector>

#include "infoflow/expr.hpp"
#include "infoflow/graph.hpp"
#include "infoflow/zero.hpp"

namespace infoflow {

class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Vector field: one component per state variable, in declaration order.
struct VectorField {
  std::vector<Expr> components;
};

struct NamedField {
  std::string name;
  VectorField field;
};

struct ObservationFn {
  std::string name;
  std::vector<Expr> components;  // simplified on load
};

enum class ObjectiveKind { Equality, Inequality };

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::Equality;
  std::vector<Expr> components;
  /// When set, the spectrum margins -Re(lambda_i) of the closed-loop Jacobian
  /// are appended as extra components at evaluation time.
  bool uses_jacobian_eigenvalues = false;
};

struct Agent {
  int index = 0;
  ObservationFn observation;
  std::vector<NamedField> fields;
  std::vector<Expr> delta;  // objective restriction, over parameter variables
  std::optional<ObjectiveSpec> local_objective;
  std::vector<std::string> owned_vars;
  /// Closed-loop control laws aligned with fields; expressions over this
  /// agent's observation/delta component names. Optional: only needed for
  /// simulation.
  std::vector<std::optional<Expr>> controls;
};

struct CoordinateChange {
  std::vector<std::string> new_vars;
  std::vector<Expr> forward;  // z_i = forward[i](x), one per new variable
  std::vector<Expr> inverse;  // x_i = inverse[i](z), one per old variable
};

/// Edge of a formation with a distance-target parameter, used by the
/// simulator's edge-error series.
struct FormationEdge {
  int agent_a = 0;
  int agent_b = 0;
  std::string target_param;
};

enum class SamplingHint { Box, Sphere };

struct SystemDef {
  std::string name;
  std::vector<std::string> state_vars;
  std::vector<std::string> parameter_vars;
  std::vector<Agent> agents;
  std::optional<ObjectiveSpec> global_objective;
  DomainBox domain_box;
  std::vector<CoordinateChange> changes;
  std::vector<FormationEdge> formation_edges;
  SamplingHint sampling = SamplingHint::Box;

  const Agent& agent(int index) const;  // 1-based
  bool is_state_var(const std::string& v) const;
  bool is_parameter_var(const std::string& v) const;
  /// Component names visible to agent controls: "<obs>_<k>" and
  /// "delta<i>_<k>", plus the bare name when there is a single component.
  std::vector<std::string> control_slot_names(const Agent& a) const;
};

/// Loads and fully validates a system-definition file. Throws ParseError
/// with location information or ValidationError.
SystemDef load_system(const std::string& path);
SystemDef load_system_from_string(const std::string& text, const std::string& origin = "<string>");

/// Canonical JSON serialization; load(serialize(s)) is structurally identical.
std::string system_to_json(const SystemDef& sys);
SystemDef system_from_json(const std::string& json_text);

/// Validates all invariants (also called by the loaders).
void validate_system(const SystemDef& sys);

/// Verifies that forward/inverse round-trip to the identity over the box.
void validate_change(const SystemDef& sys, const CoordinateChange& change,
                     const ZeroConfig& config = {});

/// Rewrites the system in the new coordinates: h_i := h_i o inverse,
/// g_ij := (Jacobian(forward) g_ij) o inverse. Agent structure, deltas and
/// parameter-space data are preserved; owned variables map positionally.
SystemDef transform_system(const SystemDef& sys, const CoordinateChange& change,
                           const ZeroConfig& config = {});

/// Coordinate-dependent variable-group dependency graph: vertices are the
/// agents' owned-variable groups; there is an edge i -> j when the dynamics
/// that agent i's controls induce on its own group read some variable owned
/// by agent j. Control arguments are the agent's observation and delta
/// components, treated as opaque.
FlowGraph naive_flow_graph(const SystemDef& sys, const ZeroConfig& config = {});

}  // namespace infoflow
