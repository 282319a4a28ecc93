#pragma once

#include <optional>
#include <string>
#include <vector>

#include "infoflow/graph.hpp"
#include "infoflow/model.hpp"

namespace infoflow {

/// Abstract simplicial complex over named vertices. Simplices are stored as
/// sorted vertex-index sets (all dimensions, including the vertices
/// themselves) and the set is closed under facets.
struct FlowComplex {
  std::vector<std::string> vertices;
  std::vector<std::vector<int>> simplices;  // sorted by (size, lexicographic)
  std::set<std::pair<int, int>> unknown_edges;

  bool contains(const std::vector<int>& simplex) const;
};

enum class LoopClass { Trivial, Nontrivial };

struct LoopReport {
  std::vector<int> loop;  // v_1 ... v_k with v_1 == v_k
  LoopClass classification = LoopClass::Trivial;
  std::set<std::pair<int, int>> generated_subgraph;
};

enum class Centralization { Centralized, Decentralized };

/// Coordinate-free information flow graph: vertices are the observation
/// functions; there is an edge h_j -> h_i when some member of the depth-
/// bounded bracket closure of agent i's fields has a derivative of h_j that
/// is not identically zero. Unknown zero-test verdicts become potential
/// edges in unknown_edges.
FlowGraph info_flow_graph(const SystemDef& sys, int depth, const ZeroConfig& config = {});

/// Whitney-style information flow complex: a pair {h_i, h_j} is a 1-simplex
/// when either directed derivative test fires; a set of three or more
/// vertices spans a simplex only when every ordered pair inside it fires.
FlowComplex info_flow_complex(const SystemDef& sys, int depth, const ZeroConfig& config = {});
FlowComplex complex_from_graph(const FlowGraph& g);

/// Centralized iff every unordered vertex pair is connected in both
/// directions (vacuously true for a single vertex).
Centralization classify(const FlowGraph& g);

/// All simple directed cycles with at most max_len edges (2-cycles included),
/// in deterministic order, each classified against the subgraph generated by
/// its vertex set. Enumeration stops at max_cycles.
std::vector<LoopReport> find_information_loops(const FlowGraph& g, int max_len,
                                               std::size_t max_cycles = 100000);

enum class InvarianceVerdict { Equal, Differ, Inconclusive };

struct InvarianceReport {
  InvarianceVerdict verdict = InvarianceVerdict::Equal;
  FlowGraph original;
  FlowGraph transformed;
  /// Edges present on one side only, as vertex-name pairs.
  std::vector<std::pair<std::string, std::string>> only_in_original;
  std::vector<std::pair<std::string, std::string>> only_in_transformed;
  bool naive = false;
};

/// Compares the information flow graph (or the naive variant) of the system
/// with that of the transformed system, under the identity correspondence of
/// vertex names. Nonempty unknown-edge sets make the info-flow comparison
/// inconclusive rather than failed.
InvarianceReport check_invariance(const SystemDef& sys, const CoordinateChange& change,
                                  int depth, bool naive = false, const ZeroConfig& config = {});

// --- report emission -------------------------------------------------------

std::string graph_to_dot(const FlowGraph& g, const std::vector<LoopReport>& loops);
std::string complex_to_dot(const FlowComplex& c);

}  // namespace infoflow
