// survey.hpp
// Seeded experiments over a family of modules: truth-table tallies of the
// three relations, chain violations, and per-space equivalence flags.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bjo/io.hpp"

namespace bjo {

enum class ElementKind { Ginibre, Positive, UnitaryColumn, QuasiEnriched };
const char* to_string(ElementKind kind);
ElementKind parse_element_kind(const std::string& text);

struct EnsembleConfig {
  std::vector<ModuleSpace> spaces;
  int samples_per_space = 1000;
  /// Extra pairs from make_quasi_pair per space (used when QuasiEnriched is
  /// among the kinds, always in the equivalence survey).
  int quasi_samples_per_space = 100;
  std::uint64_t seed = 42;
  std::vector<ElementKind> element_kinds{ElementKind::Ginibre, ElementKind::Positive,
                                         ElementKind::UnitaryColumn, ElementKind::QuasiEnriched};
  Tolerances tolerances;
  /// Also run is_bj_minimization on every pair and tally agreement.
  bool minimization_check = false;
  int threads = 0;  // 0 = hardware concurrency
};

/// Throws Config on empty spaces/kinds or non-positive sample counts.
void validate(const EnsembleConfig& config);

json config_to_json(const EnsembleConfig& config);
/// Fields absent from `doc` keep their defaults. Throws Parse or Config.
EnsembleConfig config_from_json(const json& doc);

/// Deterministic in the generator state. QuasiEnriched is a pair kind and is
/// rejected here.
ModuleElement sample_element(Rng& rng, const ModuleSpace& space, ElementKind kind);

/// The three predicate answers packed as strong*4 + quasi*2 + bj, Holds = 1.
int truth_index(bool strong, bool quasi, bool bj);

struct Exhibit {
  std::string source;  // "sampled", "sqc" or "prime"
  std::string note;
  std::int64_t sample = -1;
  json pair;           // ProblemFile-compatible
};

struct EquivalenceFlags {
  bool strong_quasi = true;
  bool quasi_bj = true;
  bool strong_bj = true;
  friend bool operator==(const EquivalenceFlags&, const EquivalenceFlags&) = default;
};

/// strong~quasi iff commutative; quasi~BJ iff one block; strong~BJ iff C.
EquivalenceFlags predicted_flags(const ModuleSpace& space);

struct SpaceReport {
  std::string label;
  ModuleSpace space;
  long random_pairs = 0;
  long enriched_pairs = 0;
  std::array<long, 8> truth_counts{};  // certified samples only
  long certified = 0;
  long borderline = 0;
  long errors = 0;
  std::string first_error{};
  long chain_violations = 0;
  std::vector<Exhibit> violation_exhibits{};  // first few

  // Pairwise agreement over samples where both answers are certified.
  long strong_quasi_disagree = 0;
  long quasi_bj_disagree = 0;
  long strong_bj_disagree = 0;

  // minimization_check only.
  long method_compared = 0;
  long method_disagree = 0;
  double max_holds_gap = 0.0;  // | min ||x + l y|| - ||x|| | when both routes Hold

  // Equivalence survey only.
  bool equivalence = false;
  EquivalenceFlags flags{};
  EquivalenceFlags predicted{};
  bool pattern_matches = true;
  std::string sqc_outcome{};  // "ok", "uncertified" or "error: <code>"
  std::string prime_outcome{};
  std::vector<Exhibit> exhibits{};

  double borderline_rate() const;
};

struct SurveyReport {
  std::string kind;  // "implication" or "equivalence"
  EnsembleConfig config;
  std::vector<SpaceReport> spaces;

  long total_violations() const;
  long pattern_mismatches() const;
  double max_borderline_rate() const;
};

SurveyReport run_implication_survey(const EnsembleConfig& config);
SurveyReport run_equivalence_survey(const EnsembleConfig& config);

json report_to_json(const SurveyReport& report);
/// One row per space.
std::string report_to_csv(const SurveyReport& report);

/// The eight modules used throughout the acceptance checks:
/// C, C^2, C^3, M2, M3, C+M2, M2+M2, M3x2 over M2.
std::vector<ModuleSpace> default_family();

}  // namespace bjo
