#include "infoflow/flow.hpp"

#include <algorithm>
#include <sstream>

#include "infoflow/lie.hpp"

namespace infoflow {

bool FlowComplex::contains(const std::vector<int>& simplex) const {
  std::vector<int> key = simplex;
  std::sort(key.begin(), key.end());
  return std::find(simplices.begin(), simplices.end(), key) != simplices.end();
}

FlowGraph info_flow_graph(const SystemDef& sys, int depth, const ZeroConfig& config) {
  if (depth < 1) throw ValidationError("bracket depth must be >= 1");
  FlowGraph g;
  for (const auto& a : sys.agents) g.vertices.push_back(a.observation.name);

  for (std::size_t i = 0; i < sys.agents.size(); ++i) {
    const Agent& agent_i = sys.agents[i];
    BracketClosure closure =
        bracket_closure(agent_i.fields, sys.state_vars, depth, sys.domain_box, config);
    for (std::size_t j = 0; j < sys.agents.size(); ++j) {
      if (i == j) continue;
      const Agent& agent_j = sys.agents[j];
      bool found = false;
      bool unknown = false;
      for (const auto& member : closure.members) {
        auto derivative =
            lie_derivative(member.field, agent_j.observation.components, sys.state_vars);
        for (std::size_t c = 0; c < derivative.size() && !found; ++c) {
          ZeroVerdict v = is_zero(derivative[c], sys.domain_box, config);
          if (v.kind == ZeroKind::NotIdenticallyZero) {
            found = true;
            auto key = std::make_pair(static_cast<int>(j), static_cast<int>(i));
            g.edges.insert(key);
            EdgeEvidence ev;
            ev.bracket_word = member.word;
            ev.component = static_cast<int>(c);
            ev.witness = v.witness;
            ev.value = v.witness_value;
            g.evidence[key] = std::move(ev);
          } else if (v.kind == ZeroKind::Unknown) {
            unknown = true;
          }
        }
        if (found) break;
      }
      if (!found && unknown)
        g.unknown_edges.insert({static_cast<int>(j), static_cast<int>(i)});
    }
  }
  return g;
}

namespace {

// Bron-Kerbosch with pivoting on the mutual-edge graph; cliques come out in
// a deterministic order because candidate sets are index-ordered.
void bron_kerbosch(const std::vector<std::vector<bool>>& adj, std::vector<int>& r,
                   std::vector<int> p, std::vector<int> x,
                   std::vector<std::vector<int>>& out) {
  if (p.empty() && x.empty()) {
    if (r.size() >= 3) out.push_back(r);
    return;
  }
  int pivot = -1;
  std::size_t best = 0;
  for (int v : p) {
    std::size_t cnt = 0;
    for (int u : p)
      if (adj[v][u]) ++cnt;
    if (pivot == -1 || cnt > best) {
      pivot = v;
      best = cnt;
    }
  }
  std::vector<int> candidates;
  for (int v : p)
    if (pivot == -1 || !adj[pivot][v]) candidates.push_back(v);
  for (int v : candidates) {
    std::vector<int> p2, x2;
    for (int u : p)
      if (adj[v][u]) p2.push_back(u);
    for (int u : x)
      if (adj[v][u]) x2.push_back(u);
    r.push_back(v);
    bron_kerbosch(adj, r, std::move(p2), std::move(x2), out);
    r.pop_back();
    p.erase(std::find(p.begin(), p.end(), v));
    x.insert(std::lower_bound(x.begin(), x.end(), v), v);
  }
}

}  // namespace

FlowComplex complex_from_graph(const FlowGraph& g) {
  FlowComplex cx;
  cx.vertices = g.vertices;
  cx.unknown_edges = g.unknown_edges;
  int n = static_cast<int>(g.vertices.size());

  std::set<std::vector<int>> simplices;
  for (int v = 0; v < n; ++v) simplices.insert({v});

  // 1-simplices: either direction fires
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (g.has_edge(a, b) || g.has_edge(b, a)) simplices.insert({a, b});

  // higher simplices: mutual cliques, closed under subsets
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && g.mutual(a, b)) adj[a][b] = true;
  std::vector<int> p(n), r;
  for (int v = 0; v < n; ++v) p[v] = v;
  std::vector<std::vector<int>> cliques;
  bron_kerbosch(adj, r, p, {}, cliques);
  for (auto clique : cliques) {
    std::sort(clique.begin(), clique.end());
    // every subset of size >= 2 is a simplex (pairs are already covered by
    // the one-directional rule since mutual implies either direction)
    int m = static_cast<int>(clique.size());
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
      std::vector<int> subset;
      for (int k = 0; k < m; ++k)
        if (mask & (1u << k)) subset.push_back(clique[k]);
      if (subset.size() >= 2) simplices.insert(subset);
    }
  }

  cx.simplices.assign(simplices.begin(), simplices.end());
  std::sort(cx.simplices.begin(), cx.simplices.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  return cx;
}

FlowComplex info_flow_complex(const SystemDef& sys, int depth, const ZeroConfig& config) {
  return complex_from_graph(info_flow_graph(sys, depth, config));
}

Centralization classify(const FlowGraph& g) {
  int n = static_cast<int>(g.vertices.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (!g.mutual(a, b)) return Centralization::Decentralized;
  return Centralization::Centralized;
}

namespace {

void cycle_dfs(const FlowGraph& g, const std::vector<std::vector<int>>& adjacency, int root,
               std::vector<int>& path, std::vector<bool>& on_path, int max_len,
               std::size_t max_cycles, std::vector<LoopReport>& out) {
  if (out.size() >= max_cycles) return;
  int current = path.back();
  for (int next : adjacency[current]) {
    if (out.size() >= max_cycles) return;
    if (next == root && path.size() >= 2) {
      LoopReport report;
      report.loop = path;
      report.loop.push_back(root);
      std::vector<int> distinct = path;
      std::sort(distinct.begin(), distinct.end());
      bool trivial = true;
      for (int a : distinct)
        for (int b : distinct) {
          if (a == b) continue;
          if (g.has_edge(a, b)) report.generated_subgraph.insert({a, b});
          if (!g.mutual(a, b)) trivial = false;
        }
      report.classification = trivial ? LoopClass::Trivial : LoopClass::Nontrivial;
      out.push_back(std::move(report));
    } else if (next > root && !on_path[next] && static_cast<int>(path.size()) < max_len) {
      path.push_back(next);
      on_path[next] = true;
      cycle_dfs(g, adjacency, root, path, on_path, max_len, max_cycles, out);
      on_path[next] = false;
      path.pop_back();
    }
  }
}

}  // namespace

std::vector<LoopReport> find_information_loops(const FlowGraph& g, int max_len,
                                               std::size_t max_cycles) {
  if (max_len < 2) throw ValidationError("loop search requires max_len >= 2");
  int n = static_cast<int>(g.vertices.size());
  std::vector<std::vector<int>> adjacency(n);
  for (const auto& [from, to] : g.edges) adjacency[from].push_back(to);
  for (auto& list : adjacency) std::sort(list.begin(), list.end());

  std::vector<LoopReport> out;
  // each cycle is discovered exactly once, rooted at its smallest vertex
  for (int root = 0; root < n && out.size() < max_cycles; ++root) {
    std::vector<int> path{root};
    std::vector<bool> on_path(n, false);
    on_path[root] = true;
    cycle_dfs(g, adjacency, root, path, on_path, max_len, max_cycles, out);
  }
  return out;
}

InvarianceReport check_invariance(const SystemDef& sys, const CoordinateChange& change,
                                  int depth, bool naive, const ZeroConfig& config) {
  InvarianceReport report;
  report.naive = naive;
  SystemDef transformed = transform_system(sys, change, config);
  if (naive) {
    report.original = naive_flow_graph(sys, config);
    report.transformed = naive_flow_graph(transformed, config);
  } else {
    report.original = info_flow_graph(sys, depth, config);
    report.transformed = info_flow_graph(transformed, depth, config);
  }

  auto named_edges = [](const FlowGraph& g) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& [from, to] : g.edges)
      out.insert({g.vertices[static_cast<std::size_t>(from)],
                  g.vertices[static_cast<std::size_t>(to)]});
    return out;
  };
  auto ea = named_edges(report.original);
  auto eb = named_edges(report.transformed);
  for (const auto& e : ea)
    if (!eb.count(e)) report.only_in_original.push_back(e);
  for (const auto& e : eb)
    if (!ea.count(e)) report.only_in_transformed.push_back(e);

  if (!naive &&
      (!report.original.unknown_edges.empty() || !report.transformed.unknown_edges.empty()))
    report.verdict = InvarianceVerdict::Inconclusive;
  else if (report.only_in_original.empty() && report.only_in_transformed.empty())
    report.verdict = InvarianceVerdict::Equal;
  else
    report.verdict = InvarianceVerdict::Differ;
  return report;
}

// ---------------------------------------------------------------------------
// DOT emission
// ---------------------------------------------------------------------------

std::string graph_to_dot(const FlowGraph& g, const std::vector<LoopReport>& loops) {
  std::ostringstream os;
  os << "digraph infoflow {\n";
  for (const auto& v : g.vertices) os << "  \"" << v << "\";\n";
  for (const auto& [from, to] : g.edges) {
    if (g.has_edge(to, from) && to < from) continue;  // mutual pair already printed
    os << "  \"" << g.vertices[static_cast<std::size_t>(from)] << "\" -> \""
       << g.vertices[static_cast<std::size_t>(to)] << "\"";
    if (g.has_edge(to, from)) os << " [dir=both]";
    os << ";\n";
  }
  for (const auto& [from, to] : g.unknown_edges)
    os << "  \"" << g.vertices[static_cast<std::size_t>(from)] << "\" -> \""
       << g.vertices[static_cast<std::size_t>(to)] << "\" [style=dotted, label=\"unknown\"];\n";
  for (const auto& loop : loops) {
    if (loop.classification != LoopClass::Nontrivial) continue;
    os << "  // nontrivial loop (color=red):";
    for (std::size_t i = 0; i < loop.loop.size(); ++i)
      os << (i == 0 ? " " : " -> ") << g.vertices[static_cast<std::size_t>(loop.loop[i])];
    os << "\n";
  }
  os << "}\n";
  return os.str();
}

std::string complex_to_dot(const FlowComplex& c) {
  std::ostringstream os;
  os << "graph infoflow_complex {\n";
  for (const auto& v : c.vertices) os << "  \"" << v << "\";\n";
  for (const auto& s : c.simplices) {
    if (s.size() != 2) continue;
    os << "  \"" << c.vertices[static_cast<std::size_t>(s[0])] << "\" -- \""
       << c.vertices[static_cast<std::size_t>(s[1])] << "\";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace infoflow
