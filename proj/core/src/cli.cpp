#include "infoflow/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "infoflow/flow.hpp"
#include "infoflow/lie.hpp"
#include "infoflow/model.hpp"
#include "infoflow/order.hpp"
#include "infoflow/sim.hpp"

#ifndef INFOFLOW_VERSION
#define INFOFLOW_VERSION "0.0.0"
#endif

namespace infoflow {

namespace {

using ordered_json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  std::string input;
  int depth = 3;
  int max_len = 12;
  std::uint64_t seed = 42;
  std::size_t samples = 512;
  double tolerance = 1e-9;
  std::string format = "json";
  std::string output;

  ZeroConfig zero() const {
    ZeroConfig z;
    z.base_tolerance = tolerance;
    return z;  // zero-test sampling keeps its own fixed seed for reproducibility
  }
};

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["tool"] = "infoflow";
  j["version"] = INFOFLOW_VERSION;
  j["command"] = c.command;
  j["input"] = c.input;
  j["depth"] = c.depth;
  j["max_len"] = c.max_len;
  j["seed"] = c.seed;
  j["zero_seed"] = c.zero().seed;
  j["samples"] = c.samples;
  j["tolerance"] = c.tolerance;
  j["format"] = c.format;
  return j;
}

std::string dot_header(const RunConfig& c) {
  std::ostringstream os;
  os << "// infoflow " << INFOFLOW_VERSION << " " << c.command << " " << c.input
     << " depth=" << c.depth << " max_len=" << c.max_len << " seed=" << c.seed
     << " tolerance=" << c.tolerance << "\n";
  return os.str();
}

void write_output(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.output.empty()) {
    out << text;
    return;
  }
  std::string tmp = c.output + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw ValidationError("cannot write output file: " + c.output);
    f << text;
  }
  if (std::rename(tmp.c_str(), c.output.c_str()) != 0)
    throw ValidationError("cannot move output into place: " + c.output);
}

void write_sidecar(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write output file: " + path);
  f << text;
}

ordered_json witness_json(const std::map<std::string, Rational>& witness) {
  ordered_json j = ordered_json::object();
  for (const auto& [var, value] : witness) j[var] = rational_to_string(value);
  return j;
}

ordered_json graph_json(const FlowGraph& g) {
  ordered_json j;
  j["vertices"] = g.vertices;
  j["edges"] = ordered_json::array();
  for (const auto& [from, to] : g.edges) {
    ordered_json je;
    je["from"] = g.vertices[static_cast<std::size_t>(from)];
    je["to"] = g.vertices[static_cast<std::size_t>(to)];
    auto it = g.evidence.find({from, to});
    if (it != g.evidence.end()) {
      ordered_json ev;
      ev["bracket"] = it->second.bracket_word;
      ev["component"] = it->second.component;
      ev["witness"] = witness_json(it->second.witness);
      ev["value"] = it->second.value;
      je["evidence"] = std::move(ev);
    }
    j["edges"].push_back(std::move(je));
  }
  j["unknown_edges"] = ordered_json::array();
  for (const auto& [from, to] : g.unknown_edges)
    j["unknown_edges"].push_back({{"from", g.vertices[static_cast<std::size_t>(from)]},
                                  {"to", g.vertices[static_cast<std::size_t>(to)]}});
  return j;
}

ordered_json loops_json(const FlowGraph& g, const std::vector<LoopReport>& loops) {
  ordered_json j = ordered_json::array();
  for (const auto& loop : loops) {
    ordered_json jl;
    jl["vertices"] = ordered_json::array();
    for (int v : loop.loop) jl["vertices"].push_back(g.vertices[static_cast<std::size_t>(v)]);
    jl["classification"] =
        loop.classification == LoopClass::Nontrivial ? "nontrivial" : "trivial";
    j.push_back(std::move(jl));
  }
  return j;
}

ordered_json complex_json(const FlowComplex& cx) {
  ordered_json j;
  j["simplices"] = ordered_json::array();
  for (const auto& s : cx.simplices) {
    ordered_json js = ordered_json::array();
    for (int v : s) js.push_back(cx.vertices[static_cast<std::size_t>(v)]);
    j["simplices"].push_back(std::move(js));
  }
  return j;
}

std::map<std::string, double> parse_assignment(const std::string& text) {
  std::map<std::string, double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ValidationError("expected name=value in assignment: '" + item + "'");
    std::string name = item.substr(0, eq);
    name.erase(std::remove_if(name.begin(), name.end(), ::isspace), name.end());
    out[name] = std::stod(item.substr(eq + 1));
  }
  return out;
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

SampleSet make_samples(const SystemDef& sys, const RunConfig& config,
                       const std::string& sampling_override,
                       const std::string& samples_file,
                       const std::vector<std::string>& vars) {
  if (!samples_file.empty()) {
    SampleSet s = load_samples_csv(samples_file, config.tolerance);
    return s;
  }
  bool sphere = sampling_override.empty() ? sys.sampling == SamplingHint::Sphere
                                          : sampling_override == "sphere";
  if (sphere) return make_sphere_samples(vars, config.samples, config.seed, config.tolerance);
  return make_box_samples(vars, sys.domain_box, config.samples, config.seed, config.tolerance);
}

/// Resolves an order-comparison operand: a named function of the system or an
/// inline component list.
std::vector<Expr> resolve_function(const SystemDef& sys, const std::string& id) {
  for (const auto& a : sys.agents)
    if (a.observation.name == id) return a.observation.components;
  if (id.rfind("delta", 0) == 0 && id.size() > 5) {
    int idx = std::atoi(id.c_str() + 5);
    if (idx >= 1 && idx <= static_cast<int>(sys.agents.size())) {
      const auto& d = sys.agent(idx).delta;
      if (d.empty()) throw ValidationError("agent " + std::to_string(idx) + " has no delta");
      return d;
    }
  }
  if (id.rfind("local", 0) == 0 && id.size() > 5) {
    int idx = std::atoi(id.c_str() + 5);
    if (idx >= 1 && idx <= static_cast<int>(sys.agents.size())) {
      const auto& lo = sys.agent(idx).local_objective;
      if (!lo) throw ValidationError("agent " + std::to_string(idx) + " has no local objective");
      return lo->components;
    }
  }
  if (id == "F") {
    if (!sys.global_objective) throw ValidationError("system has no global objective");
    return sys.global_objective->components;
  }
  // inline expression list
  std::string body = id;
  if (!body.empty() && body.front() == '(' && body.back() == ')')
    body = body.substr(1, body.size() - 2);
  std::vector<Expr> out;
  std::string cur;
  int depth = 0;
  auto flush = [&]() {
    if (cur.find_first_not_of(" \t") == std::string::npos)
      throw ValidationError("empty component in '" + id + "'");
    out.push_back(simplify(parse_expr(cur)));
    cur.clear();
  };
  for (char c : body) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0)
      flush();
    else
      cur.push_back(c);
  }
  flush();
  for (const auto& e : out)
    for (const auto& v : free_vars(e))
      if (!sys.is_state_var(v) && !sys.is_parameter_var(v))
        throw ValidationError("undeclared variable '" + v + "' in '" + id + "'");
  return out;
}

ordered_json violations_json(const std::vector<Counterexample>& violations,
                             const SampleSet& samples) {
  ordered_json j = ordered_json::array();
  for (const auto& v : violations) {
    ordered_json jv;
    jv["i"] = v.i;
    jv["j"] = v.j;
    jv["point_i"] = samples.points[v.i];
    jv["point_j"] = samples.points[v.j];
    j.push_back(std::move(jv));
  }
  return j;
}

// --- subcommand bodies ------------------------------------------------------

int cmd_analyze(const RunConfig& config, bool naive, std::ostream& out) {
  SystemDef sys = load_system(config.input);
  FlowGraph g = naive ? naive_flow_graph(sys, config.zero())
                      : info_flow_graph(sys, config.depth, config.zero());
  auto loops = find_information_loops(g, config.max_len);

  if (config.format == "dot") {
    write_output(config, dot_header(config) + graph_to_dot(g, loops), out);
  } else {
    ordered_json j;
    j["config"] = config_json(config);
    j["naive"] = naive;
    ordered_json gj = graph_json(g);
    j["vertices"] = gj["vertices"];
    j["edges"] = gj["edges"];
    j["unknown_edges"] = gj["unknown_edges"];
    j["classification"] =
        classify(g) == Centralization::Centralized ? "centralized" : "decentralized";
    j["loops"] = loops_json(g, loops);
    write_output(config, j.dump(2) + "\n", out);
  }
  return g.unknown_edges.empty() ? 0 : 2;
}

int cmd_complex(const RunConfig& config, std::ostream& out) {
  SystemDef sys = load_system(config.input);
  FlowGraph g = info_flow_graph(sys, config.depth, config.zero());
  FlowComplex cx = complex_from_graph(g);
  auto loops = find_information_loops(g, config.max_len);

  if (config.format == "dot") {
    std::string sidecar = complex_json(cx).dump(2) + "\n";
    std::string body = dot_header(config) + complex_to_dot(cx) + "/* simplices\n" + sidecar + "*/\n";
    write_output(config, body, out);
    if (!config.output.empty()) write_sidecar(config.output + ".simplices.json", sidecar);
  } else {
    ordered_json j;
    j["config"] = config_json(config);
    ordered_json gj = graph_json(g);
    j["vertices"] = gj["vertices"];
    j["edges"] = gj["edges"];
    j["unknown_edges"] = gj["unknown_edges"];
    j["complex"] = complex_json(cx);
    j["classification"] =
        classify(g) == Centralization::Centralized ? "centralized" : "decentralized";
    j["loops"] = loops_json(g, loops);
    write_output(config, j.dump(2) + "\n", out);
  }
  return cx.unknown_edges.empty() ? 0 : 2;
}

int cmd_invariance(const RunConfig& config, int change_index, bool naive, std::ostream& out) {
  SystemDef sys = load_system(config.input);
  if (sys.changes.empty()) throw ValidationError("system file declares no coordinate change");
  if (change_index < 1 || change_index > static_cast<int>(sys.changes.size()))
    throw ValidationError("change index out of range");
  InvarianceReport report = check_invariance(sys, sys.changes[static_cast<std::size_t>(change_index - 1)],
                                             config.depth, naive, config.zero());

  ordered_json j;
  j["config"] = config_json(config);
  j["naive"] = naive;
  j["change"] = change_index;
  switch (report.verdict) {
    case InvarianceVerdict::Equal: j["verdict"] = "equal"; break;
    case InvarianceVerdict::Differ: j["verdict"] = "differ"; break;
    case InvarianceVerdict::Inconclusive: j["verdict"] = "inconclusive"; break;
  }
  j["original"] = graph_json(report.original);
  j["transformed"] = graph_json(report.transformed);
  auto pairs_json = [](const std::vector<std::pair<std::string, std::string>>& pairs) {
    ordered_json arr = ordered_json::array();
    for (const auto& [from, to] : pairs) arr.push_back({{"from", from}, {"to", to}});
    return arr;
  };
  j["only_in_original"] = pairs_json(report.only_in_original);
  j["only_in_transformed"] = pairs_json(report.only_in_transformed);
  write_output(config, j.dump(2) + "\n", out);

  switch (report.verdict) {
    case InvarianceVerdict::Equal: return 0;
    case InvarianceVerdict::Inconclusive: return 2;
    case InvarianceVerdict::Differ: return 3;
  }
  return 1;
}

int cmd_order(const RunConfig& config, const std::string& lhs, const std::string& rhs,
              bool superlevel, const std::string& mu_text, const std::string& sampling_override,
              const std::string& samples_file, std::ostream& out) {
  SystemDef sys = load_system(config.input);

  std::vector<std::string> vars;
  if (superlevel) {
    vars = sys.state_vars;  // superlevel sets live on the state manifold
  } else {
    vars = sys.state_vars;
    for (const auto& p : sys.parameter_vars) vars.push_back(p);
  }
  SampleSet samples = make_samples(sys, config, sampling_override, samples_file, vars);

  OrderVerdict verdict;
  if (superlevel) {
    auto as_objective = [&](const std::string& id) {
      ObjectiveSpec obj;
      obj.kind = ObjectiveKind::Inequality;
      if (id.rfind("local", 0) == 0 && id.size() > 5) {
        int idx = std::atoi(id.c_str() + 5);
        if (idx >= 1 && idx <= static_cast<int>(sys.agents.size()) &&
            sys.agent(idx).local_objective)
          return *sys.agent(idx).local_objective;
      }
      if (id == "F" && sys.global_objective) return *sys.global_objective;
      obj.components = resolve_function(sys, id);
      return obj;
    };
    verdict = compare_superlevel_sets(as_objective(lhs), as_objective(rhs),
                                      parse_assignment(mu_text), samples);
  } else {
    verdict = compare_level_sets(resolve_function(sys, lhs), resolve_function(sys, rhs), samples);
  }

  ordered_json j;
  j["config"] = config_json(config);
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["superlevel"] = superlevel;
  j["relation"] = relation_name(verdict.relation);
  j["finer_holds"] = verdict.finer_holds;
  j["coarser_holds"] = verdict.coarser_holds;
  j["finer_violations"] = violations_json(verdict.finer_violations, samples);
  j["coarser_violations"] = violations_json(verdict.coarser_violations, samples);
  j["resolution"] = {{"samples", verdict.sample_count},
                     {"seed", verdict.seed},
                     {"tolerance", verdict.tolerance}};
  write_output(config, j.dump(2) + "\n", out);
  return 0;
}

int cmd_simulate(const RunConfig& config, double dt, double t_end, const std::string& x0_text,
                 const std::string& x0_file, const std::string& mu_text, std::ostream& out) {
  SystemDef sys = load_system(config.input);
  auto mu = parse_assignment(mu_text);

  std::vector<double> x0;
  if (!x0_file.empty()) {
    std::ifstream f(x0_file);
    if (!f) throw ValidationError("cannot open x0 file: " + x0_file);
    double v;
    while (f >> v) x0.push_back(v);
  } else if (!x0_text.empty()) {
    x0 = parse_vector(x0_text);
  } else {
    throw ValidationError("simulate requires --x0 or --x0-file");
  }

  ClosedLoop loop = ClosedLoop::from_system_controls(sys, mu);
  Trajectory traj = integrate(loop, x0, dt, t_end);

  std::vector<std::vector<double>> errors;
  if (!sys.formation_edges.empty()) {
    errors.reserve(traj.states.size());
    for (const auto& state : traj.states) errors.push_back(edge_errors(sys, state, mu, true));
  }

  if (config.format == "csv") {
    write_output(config, trajectory_to_csv(traj, sys.state_vars), out);
    if (!config.output.empty() && !errors.empty()) {
      std::ostringstream es;
      es << "t";
      for (std::size_t k = 0; k < sys.formation_edges.size(); ++k) es << ",e" << (k + 1);
      es << "\n";
      char buf[32];
      for (std::size_t i = 0; i < errors.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.times[i]);
        es << buf;
        for (double e : errors[i]) {
          std::snprintf(buf, sizeof buf, "%.17g", e);
          es << "," << buf;
        }
        es << "\n";
      }
      std::string base = config.output;
      auto dot = base.rfind('.');
      if (dot != std::string::npos) base = base.substr(0, dot);
      write_sidecar(base + "_errors.csv", es.str());
    }
  } else {
    ordered_json j;
    j["config"] = config_json(config);
    j["system"] = sys.name;
    j["dt"] = dt;
    j["t_end"] = t_end;
    j["diverged"] = traj.diverged;
    j["times"] = traj.times;
    j["states"] = traj.states;
    j["edge_errors"] = errors;
    write_output(config, j.dump(2) + "\n", out);
  }
  return 0;
}

int cmd_wellposed(const RunConfig& config, const std::string& mu_text,
                  const std::string& sampling_override, const std::string& samples_file,
                  std::ostream& out) {
  SystemDef sys = load_system(config.input);
  SampleSet samples = make_samples(sys, config, sampling_override, samples_file, sys.state_vars);
  WellPosedReport report = check_well_posed(sys, parse_assignment(mu_text), samples);

  ordered_json j;
  j["config"] = config_json(config);
  j["well_posed"] = report.well_posed;
  j["premise_count"] = report.premise_count;
  j["sample_count"] = report.sample_count;
  if (report.counterexample_index) {
    ordered_json cx;
    cx["index"] = *report.counterexample_index;
    ordered_json point = ordered_json::object();
    for (std::size_t c = 0; c < samples.vars.size(); ++c)
      point[samples.vars[c]] = report.counterexample_point[c];
    cx["point"] = point;
    j["counterexample"] = std::move(cx);
  } else {
    j["counterexample"] = nullptr;
  }
  write_output(config, j.dump(2) + "\n", out);
  return report.well_posed ? 0 : 3;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"information flow analysis for decentralized control systems"};
  app.set_version_flag("--version", std::string("infoflow ") + INFOFLOW_VERSION);
  app.require_subcommand(1);

  RunConfig config;
  bool naive = false;
  int change_index = 1;
  std::string lhs, rhs, mu_text, sampling_override, samples_file, x0_text, x0_file;
  bool superlevel = false;
  double dt = 1e-3, t_end = 10.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("file", config.input, "system definition file")->required();
    cmd->add_option("--depth", config.depth, "bracket closure depth")->capture_default_str();
    cmd->add_option("--max-len", config.max_len, "maximum loop length")->capture_default_str();
    cmd->add_option("--seed", config.seed, "sampling seed")
        ->envname("INFOFLOW_SEED")
        ->capture_default_str();
    cmd->add_option("--samples", config.samples, "sample count")->capture_default_str();
    cmd->add_option("--tol", config.tolerance, "comparison tolerance")->capture_default_str();
    cmd->add_option("--format", config.format, "output format: json|dot|csv")
        ->capture_default_str();
    cmd->add_option("-o,--output", config.output, "output path (default stdout)");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "information flow graph, loops, class");
  add_common(analyze);
  analyze->add_flag("--naive", naive, "variable-group dependency graph instead");

  CLI::App* complex_cmd = app.add_subcommand("complex", "information flow complex");
  add_common(complex_cmd);

  CLI::App* invariance = app.add_subcommand("invariance", "compare against transformed system");
  add_common(invariance);
  invariance->add_option("--change", change_index, "1-based index of the embedded change")
      ->capture_default_str();
  invariance->add_flag("--naive", naive, "compare the naive graphs instead");

  CLI::App* order = app.add_subcommand("order", "partial-order comparison of two functions");
  add_common(order);
  order->add_option("--lhs", lhs, "left function (name or inline list)")->required();
  order->add_option("--rhs", rhs, "right function (name or inline list)")->required();
  order->add_flag("--superlevel", superlevel, "compare superlevel sets (inequality objectives)");
  order->add_option("--mu", mu_text, "parameter assignment name=value,...");
  order->add_option("--sampling", sampling_override, "box|sphere override");
  order->add_option("--samples-file", samples_file, "CSV sample set (header = variables)");

  CLI::App* simulate = app.add_subcommand("simulate", "closed-loop RK4 simulation");
  add_common(simulate);
  simulate->add_option("--dt", dt, "integration step")->capture_default_str();
  simulate->add_option("--t-end", t_end, "end time")->capture_default_str();
  simulate->add_option("--x0", x0_text, "initial state v1,v2,...");
  simulate->add_option("--x0-file", x0_file, "whitespace separated initial state file");
  simulate->add_option("--mu", mu_text, "parameter assignment name=value,...");

  CLI::App* wellposed = app.add_subcommand("wellposed", "local-implies-global objective check");
  add_common(wellposed);
  wellposed->add_option("--mu", mu_text, "parameter assignment name=value,...");
  wellposed->add_option("--sampling", sampling_override, "box|sphere override");
  wellposed->add_option("--samples-file", samples_file, "CSV sample set");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream os;
    int code = app.exit(e, os, os);
    (code == 0 ? out : err) << os.str();
    return code == 0 ? 0 : 1;
  }

  try {
    if (analyze->parsed()) {
      config.command = "analyze";
      return cmd_analyze(config, naive, out);
    }
    if (complex_cmd->parsed()) {
      config.command = "complex";
      return cmd_complex(config, out);
    }
    if (invariance->parsed()) {
      config.command = "invariance";
      return cmd_invariance(config, change_index, naive, out);
    }
    if (order->parsed()) {
      config.command = "order";
      return cmd_order(config, lhs, rhs, superlevel, mu_text, sampling_override, samples_file,
                       out);
    }
    if (simulate->parsed()) {
      config.command = "simulate";
      if (simulate->count("--format") == 0) config.format = "csv";
      return cmd_simulate(config, dt, t_end, x0_text, x0_file, mu_text, out);
    }
    if (wellposed->parsed()) {
      config.command = "wellposed";
      return cmd_wellposed(config, mu_text, sampling_override, samples_file, out);
    }
    err << "no subcommand selected\n";
    return 1;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const EvalError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace infoflow
