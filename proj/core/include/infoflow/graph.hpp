#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "infoflow/rational.hpp"

namespace infoflow {

struct EdgeEvidence {
  std::string bracket_word;  // which member of the closure fired (empty for naive edges)
  int component = 0;         // index of the observation component
  std::map<std::string, Rational> witness;
  double value = 0.0;
};

/// Mixed directed graph on named vertices. An undirected edge is represented
/// by both directions being present.
struct FlowGraph {
  std::vector<std::string> vertices;
  std::set<std::pair<int, int>> edges;  // (from, to), no self-edges
  std::map<std::pair<int, int>, EdgeEvidence> evidence;
  /// Pairs whose edge predicate returned Unknown; kept separate so that
  /// inconclusive zero tests are reported rather than dropped.
  std::set<std::pair<int, int>> unknown_edges;

  bool has_edge(int from, int to) const { return edges.count({from, to}) > 0; }
  bool mutual(int a, int b) const { return has_edge(a, b) && has_edge(b, a); }
  int vertex_index(const std::string& name) const;
};

}  // namespace infoflow
