// acceptance.hpp
// The full property suite behind `bjo verify-paper`: ten numbered criteria,
// each reduced to a pass/fail line plus the numbers behind it.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bjo/survey.hpp"

namespace bjo {

struct CriterionResult {
  int id = 0;
  std::string key;    // short key, e.g. "chain", "prime"
  std::string title;
  bool pass = false;
  std::string detail;
  json data;
};

struct AcceptanceOptions {
  std::uint64_t seed = 42;
  int threads = 0;
  /// Multiplies every sample count (1 = the documented sizes).
  double sample_scale = 1.0;
  /// Run the suite a second time and compare the serialized reports.
  bool check_determinism = true;
  std::function<void(const CriterionResult&)> on_result;
};

struct AcceptanceReport {
  std::uint64_t seed = 0;
  std::vector<CriterionResult> criteria;
  bool all_pass() const;
};

AcceptanceReport run_acceptance(const AcceptanceOptions& options);

json acceptance_to_json(const AcceptanceReport& report);
std::string format_line(const CriterionResult& result);

// Individual oracles, exposed for the unit tests.

/// True when 0 lies strictly inside the convex hull of the points (largest
/// angular gap below pi).
bool hull_contains_origin(std::vector<Complex> points);

/// <C v, v> for `count` uniformly random unit vectors.
std::vector<Complex> sample_numerical_range(const Matrix& c, int count, Rng& rng);

}  // namespace bjo
