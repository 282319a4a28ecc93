#include "infoflow/order.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "infoflow/compiled.hpp"

namespace infoflow {

std::string relation_name(Relation r) {
  switch (r) {
    case Relation::Equivalent: return "equivalent";
    case Relation::FinerOrEqual: return "finer_or_equal";
    case Relation::CoarserOrEqual: return "coarser_or_equal";
    case Relation::Incomparable: return "incomparable";
  }
  return "?";
}

namespace {

void append_with_flips(std::vector<std::vector<double>>& points, const std::vector<double>& base,
                       const std::vector<std::pair<double, double>>& bounds, std::size_t count) {
  if (points.size() < count) points.push_back(base);
  for (std::size_t c = 0; c < base.size() && points.size() < count; ++c) {
    std::vector<double> flipped = base;
    flipped[c] = -flipped[c];
    if (flipped[c] < bounds[c].first || flipped[c] > bounds[c].second) continue;
    if (flipped[c] == base[c]) continue;
    points.push_back(std::move(flipped));
  }
}

}  // namespace

SampleSet make_box_samples(const std::vector<std::string>& vars, const DomainBox& box,
                           std::size_t count, std::uint64_t seed, double tolerance) {
  SampleSet s;
  s.vars = vars;
  s.source = SampleSource::BoxUniform;
  s.seed = seed;
  s.tolerance = tolerance;
  std::vector<std::pair<double, double>> bounds;
  for (const auto& v : vars) bounds.push_back(box.get(v));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (s.points.size() < count) {
    std::vector<double> base(vars.size());
    for (std::size_t c = 0; c < vars.size(); ++c)
      base[c] = bounds[c].first + (bounds[c].second - bounds[c].first) * unit(rng);
    append_with_flips(s.points, base, bounds, count);
  }
  return s;
}

SampleSet make_sphere_samples(const std::vector<std::string>& vars, std::size_t count,
                              std::uint64_t seed, double tolerance) {
  SampleSet s;
  s.vars = vars;
  s.source = SampleSource::Sphere;
  s.seed = seed;
  s.tolerance = tolerance;
  std::vector<std::pair<double, double>> bounds(vars.size(), {-1.0, 1.0});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (s.points.size() < count) {
    std::vector<double> base(vars.size());
    double norm2 = 0;
    for (auto& x : base) {
      x = gauss(rng);
      norm2 += x * x;
    }
    if (norm2 < 1e-12) continue;
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : base) x *= inv;
    append_with_flips(s.points, base, bounds, count);
  }
  return s;
}

SampleSet load_samples_csv(const std::string& path, double tolerance) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open sample file: " + path);
  SampleSet s;
  s.source = SampleSource::UserFile;
  s.tolerance = tolerance;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty sample file: " + path);
  std::stringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) {
    cell.erase(std::remove_if(cell.begin(), cell.end(), ::isspace), cell.end());
    if (!cell.empty()) s.vars.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::vector<double> point;
    while (std::getline(row, cell, ',')) point.push_back(std::stod(cell));
    if (point.size() != s.vars.size())
      throw ValidationError("sample row width does not match header in " + path);
    s.points.push_back(std::move(point));
  }
  if (s.points.empty()) throw ValidationError("sample file has no points: " + path);
  return s;
}

std::string samples_to_csv(const SampleSet& samples) {
  std::ostringstream os;
  for (std::size_t c = 0; c < samples.vars.size(); ++c)
    os << (c ? "," : "") << samples.vars[c];
  os << "\n";
  char buf[32];
  for (const auto& p : samples.points) {
    for (std::size_t c = 0; c < p.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", p[c]);
      os << (c ? "," : "") << buf;
    }
    os << "\n";
  }
  return os.str();
}

namespace {

std::vector<CompiledExpr> compile_all(const std::vector<Expr>& fs,
                                      const std::vector<std::string>& vars) {
  std::vector<CompiledExpr> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(CompiledExpr::compile(f, vars));
  return out;
}

// values[k] = vector value of f at point k
std::vector<std::vector<double>> evaluate_table(const std::vector<CompiledExpr>& fs,
                                                const SampleSet& samples) {
  std::vector<std::vector<double>> out(samples.points.size());
  for (std::size_t k = 0; k < samples.points.size(); ++k) {
    out[k].reserve(fs.size());
    for (const auto& f : fs) out[k].push_back(f.eval(samples.points[k]));
  }
  return out;
}

bool close_max_norm(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  double scale = 1.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  for (double x : b) scale = std::max(scale, std::abs(x));
  for (std::size_t c = 0; c < a.size(); ++c)
    if (std::abs(a[c] - b[c]) > tol * scale) return false;
  return true;
}

Relation combine(bool finer, bool coarser) {
  if (finer && coarser) return Relation::Equivalent;
  if (finer) return Relation::FinerOrEqual;
  if (coarser) return Relation::CoarserOrEqual;
  return Relation::Incomparable;
}

constexpr std::size_t kMaxRecordedViolations = 8;

}  // namespace

OrderVerdict compare_level_sets(const std::vector<Expr>& f1, const std::vector<Expr>& f2,
                                const SampleSet& samples) {
  OrderVerdict verdict;
  verdict.sample_count = samples.points.size();
  verdict.tolerance = samples.tolerance;
  verdict.seed = samples.seed;

  auto c1 = compile_all(f1, samples.vars);
  auto c2 = compile_all(f2, samples.vars);
  auto v1 = evaluate_table(c1, samples);
  auto v2 = evaluate_table(c2, samples);

  bool finer = true, coarser = true;
  const double tol = samples.tolerance;
  const std::size_t n = samples.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool eq1 = close_max_norm(v1[i], v1[j], tol);
      bool eq2 = close_max_norm(v2[i], v2[j], tol);
      if (eq1 && !eq2) {
        finer = false;
        if (verdict.finer_violations.size() < kMaxRecordedViolations)
          verdict.finer_violations.push_back({i, j});
      }
      if (eq2 && !eq1) {
        coarser = false;
        if (verdict.coarser_violations.size() < kMaxRecordedViolations)
          verdict.coarser_violations.push_back({i, j});
      }
    }
  }
  verdict.finer_holds = finer;
  verdict.coarser_holds = coarser;
  verdict.relation = combine(finer, coarser);
  return verdict;
}

namespace {

bool objective_satisfied(const std::vector<double>& values, ObjectiveKind kind, double tol) {
  for (double v : values) {
    if (kind == ObjectiveKind::Equality && std::abs(v) > tol) return false;
    if (kind == ObjectiveKind::Inequality && v < -tol) return false;
  }
  return true;
}

}  // namespace

OrderVerdict compare_superlevel_sets(const ObjectiveSpec& f1, const ObjectiveSpec& f2,
                                     const std::map<std::string, double>& mu,
                                     const SampleSet& samples) {
  if (f1.uses_jacobian_eigenvalues || f2.uses_jacobian_eigenvalues)
    throw ValidationError("superlevel comparison supports expression objectives only");

  // substitute the parameter point, leaving expressions over sample vars
  std::map<std::string, Expr> mu_subst;
  for (const auto& [name, value] : mu) mu_subst[name] = Expr::constant(Rational(value));
  auto resolve = [&](const std::vector<Expr>& comps) {
    std::vector<Expr> out;
    for (const auto& c : comps) out.push_back(substitute(c, mu_subst));
    return out;
  };

  OrderVerdict verdict;
  verdict.sample_count = samples.points.size();
  verdict.tolerance = samples.tolerance;
  verdict.seed = samples.seed;

  auto c1 = compile_all(resolve(f1.components), samples.vars);
  auto c2 = compile_all(resolve(f2.components), samples.vars);
  auto v1 = evaluate_table(c1, samples);
  auto v2 = evaluate_table(c2, samples);

  bool finer = true, coarser = true;
  for (std::size_t k = 0; k < samples.points.size(); ++k) {
    bool sat1 = objective_satisfied(v1[k], f1.kind, samples.tolerance);
    bool sat2 = objective_satisfied(v2[k], f2.kind, samples.tolerance);
    if (sat1 && !sat2) {
      finer = false;
      if (verdict.finer_violations.size() < kMaxRecordedViolations)
        verdict.finer_violations.push_back({k, k});
    }
    if (sat2 && !sat1) {
      coarser = false;
      if (verdict.coarser_violations.size() < kMaxRecordedViolations)
        verdict.coarser_violations.push_back({k, k});
    }
  }
  verdict.finer_holds = finer;
  verdict.coarser_holds = coarser;
  verdict.relation = combine(finer, coarser);
  return verdict;
}

WellPosedReport check_well_posed(const SystemDef& sys, const std::map<std::string, double>& mu,
                                 const SampleSet& samples) {
  if (!sys.global_objective)
    throw ValidationError("well-posedness check requires a global objective");
  if (sys.global_objective->uses_jacobian_eigenvalues)
    throw ValidationError(
        "well-posedness sampling supports expression objectives only "
        "(jacobian_eigenvalues components need a closed-loop law)");
  for (const auto& a : sys.agents) {
    if (!a.local_objective)
      throw ValidationError("agent " + std::to_string(a.index) + " has no local objective");
    if (a.local_objective->kind != sys.global_objective->kind)
      throw ValidationError("local and global objectives must have matching kind");
  }

  std::map<std::string, Expr> mu_subst;
  for (const auto& [name, value] : mu) mu_subst[name] = Expr::constant(Rational(value));
  auto resolve_compile = [&](const std::vector<Expr>& comps) {
    std::vector<CompiledExpr> out;
    for (const auto& c : comps) out.push_back(CompiledExpr::compile(substitute(c, mu_subst), samples.vars));
    return out;
  };

  std::vector<std::vector<CompiledExpr>> locals;
  for (const auto& a : sys.agents) locals.push_back(resolve_compile(a.local_objective->components));
  auto global = resolve_compile(sys.global_objective->components);
  ObjectiveKind kind = sys.global_objective->kind;

  WellPosedReport report;
  report.sample_count = samples.points.size();
  report.tolerance = samples.tolerance;
  for (std::size_t k = 0; k < samples.points.size(); ++k) {
    const auto& point = samples.points[k];
    bool premise = true;
    for (const auto& lc : locals) {
      for (const auto& comp : lc) {
        double v = comp.eval(point);
        bool ok = kind == ObjectiveKind::Equality ? std::abs(v) <= samples.tolerance
                                                  : v >= -samples.tolerance;
        if (!ok) {
          premise = false;
          break;
        }
      }
      if (!premise) break;
    }
    if (!premise) continue;
    ++report.premise_count;
    for (const auto& comp : global) {
      double v = comp.eval(point);
      bool ok = kind == ObjectiveKind::Equality ? std::abs(v) <= samples.tolerance
                                                : v >= -samples.tolerance;
      if (!ok) {
        report.well_posed = false;
        report.counterexample_index = k;
        report.counterexample_point = point;
        return report;
      }
    }
  }
  return report;
}

}  // namespace infoflow
