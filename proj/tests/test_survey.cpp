#include <doctest.h>

#include <Eigen/Dense>

#include "bjo/acceptance.hpp"
#include "bjo/survey.hpp"
#include "helpers.hpp"

using namespace bjo;

namespace {

EnsembleConfig small(std::vector<ModuleSpace> spaces, int samples) {
  EnsembleConfig c;
  c.spaces = std::move(spaces);
  c.samples_per_space = samples;
  c.quasi_samples_per_space = samples / 10;
  c.threads = 2;
  return c;
}

}  // namespace

TEST_CASE("sampling is deterministic per stream") {
  const ModuleSpace s(BlockAlgebra({1, 2}), {2, 3});
  for (ElementKind kind : {ElementKind::Ginibre, ElementKind::Positive, ElementKind::UnitaryColumn}) {
    Rng a = make_stream(42, 3, 5), b = make_stream(42, 3, 5);
    const ModuleElement x = sample_element(a, s, kind), y = sample_element(b, s, kind);
    for (int k = 0; k < 2; ++k) CHECK(x.block(k) == y.block(k));
  }
  Rng c = make_stream(42, 3, 5), d = make_stream(42, 3, 6);
  CHECK(sample_element(c, s, ElementKind::Ginibre).block(1) != sample_element(d, s, ElementKind::Ginibre).block(1));
}

TEST_CASE("element kinds") {
  Rng rng = make_stream(40, 0);
  const ModuleSpace square(BlockAlgebra({3}));
  for (int t = 0; t < 10; ++t) {
    const ModuleElement p = sample_element(rng, square, ElementKind::Positive);
    CHECK(AlgebraElement(square.algebra(), {p.block(0)}).is_positive());
    CHECK(p.block(0).isApprox(p.block(0).adjoint()));

    const ModuleElement u = sample_element(rng, square, ElementKind::UnitaryColumn);
    CHECK((u.block(0).adjoint() * u.block(0) - Matrix::Identity(3, 3)).norm() < 1e-12);
  }
  Rng r2 = make_stream(41, 0);
  CHECK_THROWS_AS(sample_element(r2, square, ElementKind::QuasiEnriched), Error);
}

TEST_CASE("config validation and round trip") {
  EnsembleConfig c = small(default_family(), 10);
  c.element_kinds.clear();
  CHECK_THROWS_AS(validate(c), Error);
  EnsembleConfig d = small({}, 10);
  CHECK_THROWS_AS(validate(d), Error);
  EnsembleConfig e = small(default_family(), 0);
  CHECK_THROWS_AS(validate(e), Error);

  EnsembleConfig f = small({ModuleSpace(BlockAlgebra({2}), {3})}, 17);
  f.seed = 9;
  f.element_kinds = {ElementKind::Positive};
  const EnsembleConfig g = config_from_json(config_to_json(f));
  CHECK(g.spaces == f.spaces);
  CHECK(g.samples_per_space == 17);
  CHECK(g.seed == 9);
  CHECK(g.element_kinds == f.element_kinds);
  CHECK_THROWS_AS(config_from_json(json{{"element_kinds", {"nope"}}}), Error);
}

TEST_CASE("truth index packing") {
  CHECK(truth_index(false, false, false) == 0);
  CHECK(truth_index(false, false, true) == 1);
  CHECK(truth_index(true, true, true) == 7);
}

TEST_CASE("predicted equivalence pattern") {
  CHECK(predicted_flags(ModuleSpace(BlockAlgebra({1}))) == EquivalenceFlags{true, true, true});
  CHECK(predicted_flags(test::c2()) == EquivalenceFlags{true, false, false});
  CHECK(predicted_flags(test::m2()) == EquivalenceFlags{false, true, false});
  CHECK(predicted_flags(ModuleSpace(BlockAlgebra({1, 2}))) == EquivalenceFlags{false, false, false});
}

TEST_CASE("implication survey: no chain violations, enriched cells populated") {
  EnsembleConfig c = small({test::c2(), test::m2()}, 300);
  c.minimization_check = true;
  const SurveyReport r = run_implication_survey(c);
  REQUIRE(r.spaces.size() == 2);
  CHECK(r.total_violations() == 0);
  for (const auto& s : r.spaces) {
    CAPTURE(s.label);
    CHECK(s.errors == 0);
    CHECK(s.method_disagree == 0);
    CHECK(s.borderline_rate() < 0.01);
    long total = 0;
    for (long n : s.truth_counts) total += n;
    CHECK(total == s.certified);
  }
  // Quasi and BJ both hold on enriched M2 pairs.
  const auto& m2 = r.spaces[1];
  CHECK(m2.truth_counts[static_cast<std::size_t>(truth_index(false, true, true))] +
            m2.truth_counts[static_cast<std::size_t>(truth_index(true, true, true))] >
        0);
}

TEST_CASE("equivalence survey matches the predicted pattern on the default family") {
  const SurveyReport r = run_equivalence_survey(small(default_family(), 150));
  REQUIRE(r.spaces.size() == 8);
  CHECK(r.pattern_mismatches() == 0);
  for (const auto& s : r.spaces) {
    CAPTURE(s.label);
    CHECK(s.flags == predicted_flags(s.space));
    CHECK(s.chain_violations == 0);
  }
  const auto& c2 = r.spaces[1];
  CHECK(c2.label == "C+C");
  CHECK_FALSE(c2.flags.quasi_bj);
  CHECK(c2.prime_outcome == "ok");
}

TEST_CASE("survey reports are reproducible") {
  const EnsembleConfig c = small({ModuleSpace(BlockAlgebra({1, 2}))}, 100);
  EnsembleConfig c1 = c;
  c1.threads = 1;
  CHECK(report_to_json(run_implication_survey(c)).dump() == report_to_json(run_implication_survey(c1)).dump());
  CHECK(report_to_csv(run_equivalence_survey(c)) == report_to_csv(run_equivalence_survey(c1)));
}

TEST_CASE("hull oracle used by the acceptance checks") {
  CHECK(hull_contains_origin({Complex(1, 0), Complex(-1, 0.1), Complex(-1, -0.1)}));
  CHECK_FALSE(hull_contains_origin({Complex(1, 0), Complex(0, 1)}));
  CHECK_FALSE(hull_contains_origin({}));
}
