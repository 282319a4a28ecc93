#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "infoflow/model.hpp"

namespace infoflow {

enum class SampleSource { BoxUniform, Sphere, UserFile };

/// Finite evaluation domain for the sampled order comparisons. Box and
/// sphere generators interleave each drawn point with its in-domain
/// single-coordinate sign flips, so that coincidence-based counterexamples
/// (equal in one function, different in another) actually occur at finite
/// resolution.
struct SampleSet {
  std::vector<std::string> vars;
  std::vector<std::vector<double>> points;  // aligned with vars
  SampleSource source = SampleSource::BoxUniform;
  std::uint64_t seed = 42;
  double tolerance = 1e-9;
};

SampleSet make_box_samples(const std::vector<std::string>& vars, const DomainBox& box,
                           std::size_t count, std::uint64_t seed, double tolerance = 1e-9);
SampleSet make_sphere_samples(const std::vector<std::string>& vars, std::size_t count,
                              std::uint64_t seed, double tolerance = 1e-9);
SampleSet load_samples_csv(const std::string& path, double tolerance = 1e-9);
std::string samples_to_csv(const SampleSet& samples);

enum class Relation { Equivalent, FinerOrEqual, CoarserOrEqual, Incomparable };

std::string relation_name(Relation r);

/// A pair of sample indices violating an implication; i == j for
/// single-point violations (superlevel comparisons).
struct Counterexample {
  std::size_t i = 0;
  std::size_t j = 0;
};

struct OrderVerdict {
  Relation relation = Relation::Incomparable;
  bool finer_holds = false;    // f1 >= f2 on the samples
  bool coarser_holds = false;  // f2 >= f1 on the samples
  std::vector<Counterexample> finer_violations;    // witnesses against f1 >= f2
  std::vector<Counterexample> coarser_violations;  // witnesses against f2 >= f1
  std::size_t sample_count = 0;
  double tolerance = 0;
  std::uint64_t seed = 0;
};

/// Isolevel-set partition comparison: f1 >= f2 ("finer") iff for all sampled
/// pairs, f1(p) == f1(q) implies f2(p) == f2(q) at the stated tolerance.
/// Vector values compare by max-norm.
OrderVerdict compare_level_sets(const std::vector<Expr>& f1, const std::vector<Expr>& f2,
                                const SampleSet& samples);

/// Superlevel-set comparison for inequality objectives at a fixed parameter
/// point: f1 >= f2 iff every sampled x satisfying f1 also satisfies f2.
OrderVerdict compare_superlevel_sets(const ObjectiveSpec& f1, const ObjectiveSpec& f2,
                                     const std::map<std::string, double>& mu,
                                     const SampleSet& samples);

struct WellPosedReport {
  bool well_posed = true;
  std::optional<std::size_t> counterexample_index;
  std::vector<double> counterexample_point;
  std::size_t premise_count = 0;  // samples where all local objectives hold
  std::size_t sample_count = 0;
  double tolerance = 0;
};

/// Tests "all local objectives satisfied implies the global objective
/// satisfied" at every sample. Equality objectives use |.| <= tol, inequality
/// objectives use >= -tol. Requires expression-only objectives.
WellPosedReport check_well_posed(const SystemDef& sys, const std::map<std::string, double>& mu,
                                 const SampleSet& samples);

}  // namespace infoflow
