#include <fstream>
#include <sstream>

#include <json.hpp>

#include "infoflow/model.hpp"

namespace infoflow {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

/// Splits "(a, b, c)" (or a bare expression) at top-level commas.
std::vector<std::string> split_components(const std::string& text, int line_no) {
  std::string body = trim(text);
  if (!body.empty() && body.front() == '(' && body.back() == ')') {
    // only strip when the outer parens match each other
    int depth = 0;
    bool outer = true;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '(') ++depth;
      if (body[i] == ')') {
        --depth;
        if (depth == 0 && i + 1 < body.size()) outer = false;
      }
    }
    if (outer) body = body.substr(1, body.size() - 2);
  }
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : body) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  for (auto& p : parts) {
    p = trim(p);
    if (p.empty())
      throw ParseError("empty component in list", {line_no, 1});
  }
  return parts;
}

Expr parse_component(const std::string& text, int line_no) {
  try {
    return simplify(parse_expr(text));
  } catch (const ParseError& e) {
    throw ParseError(std::string(e.what()) + " (in '" + text + "')", {line_no, e.where.column});
  }
}

std::vector<Expr> parse_component_list(const std::string& text, int line_no) {
  std::vector<Expr> out;
  for (const auto& part : split_components(text, line_no)) out.push_back(parse_component(part, line_no));
  return out;
}

ObjectiveKind parse_kind(const std::string& token, int line_no) {
  if (token == "kind=equality") return ObjectiveKind::Equality;
  if (token == "kind=inequality") return ObjectiveKind::Inequality;
  throw ParseError("expected kind=equality or kind=inequality, got '" + token + "'",
                   {line_no, 1});
}

// "z1 = x1+x2 ; z2 = x2 ; inverse x1 = z1-z2 ; x2 = z2"
CoordinateChange parse_change(const std::string& body, const std::vector<std::string>& state_vars,
                              int line_no) {
  CoordinateChange change;
  std::vector<std::pair<std::string, Expr>> forward, inverse;
  bool in_inverse = false;
  std::string rest = body;
  std::vector<std::string> statements;
  {
    std::string cur;
    for (char c : body) {
      if (c == ';') {
        statements.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    statements.push_back(cur);
  }
  for (auto stmt : statements) {
    stmt = trim(stmt);
    if (stmt.empty()) continue;
    if (stmt.rfind("inverse", 0) == 0) {
      in_inverse = true;
      stmt = trim(stmt.substr(7));
      if (stmt.empty()) continue;
    }
    auto eq = stmt.find('=');
    if (eq == std::string::npos) throw ParseError("expected '=' in change statement", {line_no, 1});
    std::string lhs = trim(stmt.substr(0, eq));
    Expr rhs = parse_component(stmt.substr(eq + 1), line_no);
    (in_inverse ? inverse : forward).emplace_back(lhs, std::move(rhs));
  }
  if (forward.empty() || inverse.empty())
    throw ParseError("change requires forward and inverse definitions", {line_no, 1});
  for (auto& [name, e] : forward) {
    change.new_vars.push_back(name);
    change.forward.push_back(std::move(e));
  }
  change.inverse.resize(state_vars.size());
  std::vector<bool> seen(state_vars.size(), false);
  for (auto& [name, e] : inverse) {
    auto it = std::find(state_vars.begin(), state_vars.end(), name);
    if (it == state_vars.end())
      throw ParseError("change inverse defines unknown state variable '" + name + "'",
                       {line_no, 1});
    std::size_t idx = static_cast<std::size_t>(it - state_vars.begin());
    if (seen[idx])
      throw ParseError("change inverse defines '" + name + "' twice", {line_no, 1});
    seen[idx] = true;
    change.inverse[idx] = std::move(e);
  }
  for (std::size_t i = 0; i < state_vars.size(); ++i)
    if (!seen[i])
      throw ParseError("change inverse is missing '" + state_vars[i] + "'", {line_no, 1});
  return change;
}

SystemDef parse_system(std::istream& in, const std::string& origin) {
  SystemDef sys;
  Agent* current_agent = nullptr;
  std::string raw;
  int line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;

    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    std::string rest = trim(line.substr(keyword.size()));

    if (keyword == "name") {
      sys.name = rest;
    } else if (keyword == "statevars") {
      sys.state_vars = split_ws(rest);
    } else if (keyword == "params") {
      sys.parameter_vars = split_ws(rest);
    } else if (keyword == "sampling") {
      if (rest == "sphere")
        sys.sampling = SamplingHint::Sphere;
      else if (rest == "box")
        sys.sampling = SamplingHint::Box;
      else
        throw ParseError("unknown sampling '" + rest + "'", {line_no, 1});
    } else if (keyword == "box") {
      auto toks = split_ws(rest);
      if (toks.size() != 3) throw ParseError("box expects: box <var> <lo> <hi>", {line_no, 1});
      double lo = std::stod(toks[1]);
      double hi = std::stod(toks[2]);
      if (!(lo < hi)) throw ParseError("box interval must have nonempty interior", {line_no, 1});
      sys.domain_box.intervals[toks[0]] = {lo, hi};
    } else if (keyword == "agent") {
      Agent a;
      a.index = std::stoi(rest);
      sys.agents.push_back(std::move(a));
      current_agent = &sys.agents.back();
    } else if (keyword == "owns") {
      if (!current_agent) throw ParseError("owns outside an agent block", {line_no, 1});
      current_agent->owned_vars = split_ws(rest);
    } else if (keyword == "obs") {
      if (!current_agent) throw ParseError("obs outside an agent block", {line_no, 1});
      auto eq = rest.find('=');
      if (eq == std::string::npos) throw ParseError("obs expects: obs <name> = (...)", {line_no, 1});
      current_agent->observation.name = trim(rest.substr(0, eq));
      current_agent->observation.components = parse_component_list(rest.substr(eq + 1), line_no);
    } else if (keyword == "field") {
      if (!current_agent) throw ParseError("field outside an agent block", {line_no, 1});
      auto eq = rest.find('=');
      if (eq == std::string::npos)
        throw ParseError("field expects: field <name> = (...)", {line_no, 1});
      NamedField f;
      f.name = trim(rest.substr(0, eq));
      f.field.components = parse_component_list(rest.substr(eq + 1), line_no);
      current_agent->fields.push_back(std::move(f));
      current_agent->controls.resize(current_agent->fields.size());
    } else if (keyword == "control") {
      if (!current_agent) throw ParseError("control outside an agent block", {line_no, 1});
      auto eq = rest.find('=');
      if (eq == std::string::npos)
        throw ParseError("control expects: control <field> = <expr>", {line_no, 1});
      std::string field_name = trim(rest.substr(0, eq));
      bool found = false;
      current_agent->controls.resize(current_agent->fields.size());
      for (std::size_t i = 0; i < current_agent->fields.size(); ++i) {
        if (current_agent->fields[i].name == field_name) {
          current_agent->controls[i] = parse_component(rest.substr(eq + 1), line_no);
          found = true;
          break;
        }
      }
      if (!found)
        throw ParseError("control references unknown field '" + field_name + "'", {line_no, 1});
    } else if (keyword == "delta") {
      if (!current_agent) throw ParseError("delta outside an agent block", {line_no, 1});
      auto eq = rest.find('=');
      if (eq == std::string::npos) throw ParseError("delta expects: delta = (...)", {line_no, 1});
      current_agent->delta = parse_component_list(rest.substr(eq + 1), line_no);
    } else if (keyword == "local" || keyword == "objective") {
      auto toks = split_ws(rest);
      if (toks.empty()) throw ParseError("missing objective kind", {line_no, 1});
      ObjectiveSpec obj;
      obj.kind = parse_kind(toks[0], line_no);
      std::size_t consumed = toks[0].size();
      std::string after = trim(rest.substr(consumed));
      if (after.rfind("jacobian_eigenvalues", 0) == 0) {
        obj.uses_jacobian_eigenvalues = true;
        after = trim(after.substr(std::string("jacobian_eigenvalues").size()));
      }
      auto eq = after.find('=');
      if (eq == std::string::npos)
        throw ParseError("objective expects: ... <name> = (...)", {line_no, 1});
      obj.components = parse_component_list(after.substr(eq + 1), line_no);
      if (keyword == "local") {
        if (!current_agent) throw ParseError("local outside an agent block", {line_no, 1});
        current_agent->local_objective = std::move(obj);
      } else {
        sys.global_objective = std::move(obj);
      }
    } else if (keyword == "edge") {
      auto toks = split_ws(rest);
      if (toks.size() != 3) throw ParseError("edge expects: edge <i> <j> <param>", {line_no, 1});
      sys.formation_edges.push_back({std::stoi(toks[0]), std::stoi(toks[1]), toks[2]});
    } else if (keyword == "change") {
      sys.changes.push_back(parse_change(rest, sys.state_vars, line_no));
    } else {
      throw ParseError("unknown keyword '" + keyword + "' in " + origin, {line_no, 1});
    }
  }

  validate_system(sys);
  for (const auto& ch : sys.changes) validate_change(sys, ch);
  return sys;
}

}  // namespace

SystemDef load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open system file: " + path);
  return parse_system(in, path);
}

SystemDef load_system_from_string(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  return parse_system(in, origin);
}

// ---------------------------------------------------------------------------
// JSON round trip
// ---------------------------------------------------------------------------

namespace {

ordered_json objective_to_json(const ObjectiveSpec& obj) {
  ordered_json j;
  j["kind"] = obj.kind == ObjectiveKind::Equality ? "equality" : "inequality";
  j["jacobian_eigenvalues"] = obj.uses_jacobian_eigenvalues;
  j["components"] = ordered_json::array();
  for (const auto& c : obj.components) j["components"].push_back(to_string(c));
  return j;
}

ObjectiveSpec objective_from_json(const ordered_json& j) {
  ObjectiveSpec obj;
  obj.kind = j.at("kind") == "equality" ? ObjectiveKind::Equality : ObjectiveKind::Inequality;
  obj.uses_jacobian_eigenvalues = j.at("jacobian_eigenvalues").get<bool>();
  for (const auto& c : j.at("components")) obj.components.push_back(simplify(parse_expr(c)));
  return obj;
}

}  // namespace

std::string system_to_json(const SystemDef& sys) {
  ordered_json j;
  j["name"] = sys.name;
  j["statevars"] = sys.state_vars;
  j["params"] = sys.parameter_vars;
  j["sampling"] = sys.sampling == SamplingHint::Sphere ? "sphere" : "box";
  ordered_json box = ordered_json::object();
  for (const auto& [var, iv] : sys.domain_box.intervals) box[var] = {iv.first, iv.second};
  j["box"] = box;
  j["agents"] = ordered_json::array();
  for (const auto& a : sys.agents) {
    ordered_json ja;
    ja["index"] = a.index;
    ja["owns"] = a.owned_vars;
    ja["obs"] = {{"name", a.observation.name}, {"components", ordered_json::array()}};
    for (const auto& c : a.observation.components) ja["obs"]["components"].push_back(to_string(c));
    ja["fields"] = ordered_json::array();
    for (const auto& f : a.fields) {
      ordered_json jf;
      jf["name"] = f.name;
      jf["components"] = ordered_json::array();
      for (const auto& c : f.field.components) jf["components"].push_back(to_string(c));
      ja["fields"].push_back(std::move(jf));
    }
    ordered_json controls = ordered_json::object();
    for (std::size_t i = 0; i < a.controls.size(); ++i)
      if (a.controls[i]) controls[a.fields[i].name] = to_string(*a.controls[i]);
    ja["controls"] = controls;
    ja["delta"] = ordered_json::array();
    for (const auto& d : a.delta) ja["delta"].push_back(to_string(d));
    if (a.local_objective) ja["local"] = objective_to_json(*a.local_objective);
    j["agents"].push_back(std::move(ja));
  }
  if (sys.global_objective) j["objective"] = objective_to_json(*sys.global_objective);
  j["edges"] = ordered_json::array();
  for (const auto& e : sys.formation_edges)
    j["edges"].push_back({{"a", e.agent_a}, {"b", e.agent_b}, {"target", e.target_param}});
  j["changes"] = ordered_json::array();
  for (const auto& ch : sys.changes) {
    ordered_json jc;
    jc["vars"] = ch.new_vars;
    jc["forward"] = ordered_json::array();
    for (const auto& f : ch.forward) jc["forward"].push_back(to_string(f));
    jc["inverse"] = ordered_json::array();
    for (const auto& f : ch.inverse) jc["inverse"].push_back(to_string(f));
    j["changes"].push_back(std::move(jc));
  }
  return j.dump(2);
}

SystemDef system_from_json(const std::string& json_text) {
  ordered_json j = ordered_json::parse(json_text);
  SystemDef sys;
  sys.name = j.at("name").get<std::string>();
  sys.state_vars = j.at("statevars").get<std::vector<std::string>>();
  sys.parameter_vars = j.at("params").get<std::vector<std::string>>();
  sys.sampling = j.at("sampling") == "sphere" ? SamplingHint::Sphere : SamplingHint::Box;
  for (const auto& [var, iv] : j.at("box").items())
    sys.domain_box.intervals[var] = {iv[0].get<double>(), iv[1].get<double>()};
  for (const auto& ja : j.at("agents")) {
    Agent a;
    a.index = ja.at("index").get<int>();
    a.owned_vars = ja.at("owns").get<std::vector<std::string>>();
    a.observation.name = ja.at("obs").at("name").get<std::string>();
    for (const auto& c : ja.at("obs").at("components"))
      a.observation.components.push_back(simplify(parse_expr(c)));
    for (const auto& jf : ja.at("fields")) {
      NamedField f;
      f.name = jf.at("name").get<std::string>();
      for (const auto& c : jf.at("components"))
        f.field.components.push_back(simplify(parse_expr(c)));
      a.fields.push_back(std::move(f));
    }
    a.controls.resize(a.fields.size());
    for (const auto& [fname, ctrl] : ja.at("controls").items()) {
      for (std::size_t i = 0; i < a.fields.size(); ++i)
        if (a.fields[i].name == fname)
          a.controls[i] = simplify(parse_expr(ctrl.get<std::string>()));
    }
    for (const auto& d : ja.at("delta")) a.delta.push_back(simplify(parse_expr(d)));
    if (ja.contains("local")) a.local_objective = objective_from_json(ja.at("local"));
    sys.agents.push_back(std::move(a));
  }
  if (j.contains("objective")) sys.global_objective = objective_from_json(j.at("objective"));
  for (const auto& je : j.at("edges"))
    sys.formation_edges.push_back(
        {je.at("a").get<int>(), je.at("b").get<int>(), je.at("target").get<std::string>()});
  for (const auto& jc : j.at("changes")) {
    CoordinateChange ch;
    ch.new_vars = jc.at("vars").get<std::vector<std::string>>();
    for (const auto& f : jc.at("forward")) ch.forward.push_back(simplify(parse_expr(f)));
    for (const auto& f : jc.at("inverse")) ch.inverse.push_back(simplify(parse_expr(f)));
    sys.changes.push_back(std::move(ch));
  }
  validate_system(sys);
  return sys;
}

}  // namespace infoflow
