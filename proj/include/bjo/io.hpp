// io.hpp
// JSON interchange. Complex numbers are [re, im] pairs, matrices are arrays
// of rows.

#pragma once

#include <string>

#include <json.hpp>

#include "bjo/constructions.hpp"
#include "bjo/orthogonality.hpp"

namespace bjo {

using json = nlohmann::json;

struct ProblemFile {
  ModuleSpace space;
  ModuleElement x;
  ModuleElement y;
};

/// Throws Parse (malformed JSON, ragged arrays, bad entries; the message
/// carries the position or JSON path) or DimensionMismatch (shapes disagree
/// with the algebra and module).
ProblemFile parse_problem(const std::string& text);
ProblemFile problem_from_json(const json& doc);
json problem_to_json(const ProblemFile& problem);

/// "2,1,1" -> M2 + C + C. Throws Parse.
BlockAlgebra parse_algebra_spec(const std::string& text);
std::vector<int> parse_dims(const std::string& text);

json complex_to_json(Complex z);
json matrix_to_json(const Matrix& m);
json vector_to_json(const Vector& v);
json blocks_to_json(const std::vector<Matrix>& blocks);
json space_to_json(const ModuleSpace& space);
json state_to_json(const State& state);
json tolerances_to_json(const Tolerances& tol);
/// Fields absent from `doc` keep their value from `base`. Throws Parse.
Tolerances tolerances_from_json(const json& doc, Tolerances base = {});
json certificate_to_json(const FailureCertificate& cert);
json verdict_to_json(const Verdict& verdict);
json sqc_to_json(const SqcCounterexample& c);
json prime_to_json(const PrimeCounterexample& c);

/// RFC 4180 field: quoted when it contains a comma, quote or line break.
std::string csv_field(const std::string& text);

}  // namespace bjo
