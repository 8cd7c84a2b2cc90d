#include <doctest.h>

#include <cmath>

#include "bjo/constructions.hpp"
#include "bjo/random.hpp"
#include "helpers.hpp"

using namespace bjo;
using test::mat;

namespace {

void check_sqc(const SqcCounterexample& c) {
  CHECK(module_norm(c.x_prime) == doctest::Approx(1.0));
  CHECK(is_quasi_strong(c.x_prime, c.y_prime).answer == Answer::Holds);
  CHECK(is_strong(c.x_prime, c.y_prime).answer == Answer::Fails);
  // Witness: attains the norm and annihilates <x', y'>.
  CHECK(std::abs(state_evaluate(c.witness, inner_product(c.x_prime, c.x_prime)) - 1.0) < 1e-9);
  CHECK(std::abs(state_evaluate(c.witness, inner_product(c.x_prime, c.y_prime))) < 1e-9);
  // Failure certificate, evaluated directly.
  const double achieved = module_norm(c.x_prime + c.failure.lambda * (c.y_prime * *c.failure.b));
  CHECK(achieved == doctest::Approx(c.failure.achieved_norm).epsilon(1e-9));
  CHECK(achieved < module_norm(c.x_prime) - 1e-6);
}

}  // namespace

TEST_CASE("sqc: diagonal example on M2") {
  const ModuleElement x(test::m2(), {mat({{1, 0}, {0, 0.5}})});
  const SqcCounterexample c = make_sqc_pair_from(x, AProfile::Projection);
  CHECK(c.x_prime.block(0).isApprox(x.block(0)));
  CHECK(c.y_prime.block(0).isApprox(mat({{0, 1}, {0.5, 0}})));
  CHECK(c.case_label == SqcCase::III);
  CHECK(c.witness.block == 0);
  CHECK(std::abs(std::abs(c.witness.vector(0)) - 1.0) < 1e-12);
  CHECK(c.failure.lambda == Complex(-1, 0));
  CHECK(c.failure.b->block(0).isApprox(mat({{0, 1}, {1, 0}})));
  CHECK(c.failure.achieved_norm < 1e-12);
  check_sqc(c);
}

TEST_CASE("sqc: rank-one case") {
  const ModuleElement x(test::m2(), {mat({{1, 0}, {0, 0}})});
  const SqcCounterexample c = make_sqc_pair_from(x, AProfile::Projection);
  CHECK(c.case_label == SqcCase::I);
  CHECK(c.failure.achieved_norm < 1e-12);
  CHECK(is_quasi_strong(c.x_prime, c.y_prime).answer == Answer::Holds);
}

TEST_CASE("sqc: case labels") {
  CHECK(classify_sqc_case(mat({{1, 0}, {0, 0}})) == SqcCase::I);
  CHECK(classify_sqc_case(mat({{1, 0, 0}, {0, 1, 0}, {0, 0, 0}})) == SqcCase::II);
  CHECK(classify_sqc_case(mat({{1, 0}, {0, 0.3}})) == SqcCase::III);
}

TEST_CASE("sqc over every noncommutative algebra in a family, both profiles") {
  Rng rng = make_stream(30, 0);
  const std::vector<ModuleSpace> spaces{ModuleSpace(BlockAlgebra({2})), ModuleSpace(BlockAlgebra({3})),
                                        ModuleSpace(BlockAlgebra({1, 2})), ModuleSpace(BlockAlgebra({2, 2})),
                                        ModuleSpace(BlockAlgebra({2}), {3}), ModuleSpace(BlockAlgebra({3}), {1})};
  for (const auto& s : spaces) {
    for (AProfile profile : {AProfile::Projection, AProfile::PaperQuartic}) {
      CAPTURE(s.to_string());
      SqcOptions opts;
      opts.profile = profile;
      const SqcCounterexample c = make_sqc_pair(s, rng, opts);
      check_sqc(c);
      if (profile == AProfile::PaperQuartic) {
        const AlgebraElement a = c.a;
        CHECK((a - a * a).operator_norm() <= 0.25 + 1e-9);
        CHECK(c.failure.achieved_norm <= 0.25 + 1e-9);
      } else {
        CHECK(c.failure.achieved_norm < 1e-9);
      }
    }
  }
}

TEST_CASE("sqc from generic x under the quartic profile stays below 1/4") {
  Rng rng = make_stream(31, 0);
  const ModuleSpace s(BlockAlgebra({3}));
  for (int t = 0; t < 20; ++t) {
    const ModuleElement x(s, {ginibre(rng, 3, 3)});
    const SqcCounterexample c = make_sqc_pair_from(x, AProfile::PaperQuartic);
    check_sqc(c);
    CHECK(c.failure.achieved_norm <= 0.25 + 1e-9);
  }
}

TEST_CASE("sqc preconditions") {
  Rng rng = make_stream(32, 0);
  CHECK_THROWS_AS(make_sqc_pair(test::c2(), rng), Error);
  try {
    make_sqc_pair(ModuleSpace(BlockAlgebra({1, 1, 1})), rng);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CommutativeAlgebra);
  }
  SqcOptions opts;
  opts.block = 0;
  CHECK_THROWS_AS(make_sqc_pair(ModuleSpace(BlockAlgebra({1, 2})), rng, opts), Error);
  CHECK(parse_profile("paper_quartic") == AProfile::PaperQuartic);
  CHECK_THROWS_AS(parse_profile("cubic"), Error);
}

TEST_CASE("prime pair on C^2") {
  const PrimeCounterexample p = make_prime_pair_from(test::coords({1, 0}), test::coords({0, 1}));
  CHECK(p.u_plus.block(0)(0, 0) == Complex(1, 0));
  CHECK(p.u_plus.block(1)(0, 0) == Complex(1, 0));
  CHECK(p.u_minus.block(0)(0, 0) == Complex(1, 0));
  CHECK(p.u_minus.block(1)(0, 0) == Complex(-1, 0));
  CHECK(is_bj(p.u_plus, p.u_minus).answer == Answer::Holds);
  CHECK(is_quasi_strong(p.u_plus, p.u_minus).answer == Answer::Fails);
  REQUIRE(p.quasi_obstruction.size() == 2);
  CHECK(std::abs(p.quasi_obstruction[0] - 1.0) < 1e-12);
  CHECK(std::abs(p.quasi_obstruction[1] + 1.0) < 1e-12);
  CHECK(std::abs(state_evaluate(p.bj_witness, inner_product(p.u_plus, p.u_minus))) < 1e-12);
}

TEST_CASE("prime pairs on multi-block spaces") {
  Rng rng = make_stream(33, 0);
  for (const auto& s : {ModuleSpace(BlockAlgebra({1, 2})), ModuleSpace(BlockAlgebra({2, 2})),
                        ModuleSpace(BlockAlgebra({1, 1, 3}), {2, 1, 1})}) {
    CAPTURE(s.to_string());
    const PrimeCounterexample p = make_prime_pair(s, rng);
    CHECK(module_norm(p.u) == doctest::Approx(1.0));
    CHECK(module_norm(p.v) == doctest::Approx(1.0));
    CHECK(is_bj(p.u_plus, p.u_minus).answer == Answer::Holds);
    CHECK(is_quasi_strong(p.u_plus, p.u_minus).answer == Answer::Fails);
    CHECK(verify_max_norm_formula(p.u, p.v, max_norm_grid()).ok);
  }
  CHECK_THROWS_AS(make_prime_pair(test::m2(), rng), Error);
  CHECK_THROWS_AS(make_prime_pair(test::c2(), rng, 0, 0), Error);
}

TEST_CASE("max norm formula") {
  const ModuleElement u = test::coords({1, 0});
  const ModuleElement v = test::coords({0, 1});
  CHECK(module_norm(u + v) == doctest::Approx(1.0));
  CHECK(module_norm(2.0 * u) == doctest::Approx(2.0));
  CHECK(module_norm(Complex(1, 1) * u + Complex(1, -1) * v) == doctest::Approx(std::sqrt(2.0)));
  const auto grid = max_norm_grid(100);
  CHECK(grid.size() == 100);
  const MaxNormCheck r = verify_max_norm_formula(u, v, grid);
  CHECK(r.ok);
  CHECK(r.max_deviation < 1e-12);
  CHECK_THROWS_AS(verify_max_norm_formula(u, test::coords({1, 1}), grid), Error);
}

TEST_CASE("quasi pairs") {
  const ModuleElement x(test::m2(), {mat({{1, 0}, {0, 0.5}})});
  const ModuleElement y0(test::m2(), {Matrix::Identity(2, 2)});
  const QuasiPair q = make_quasi_pair_from(x, y0);
  CHECK(std::abs(q.mu - 1.0) < 1e-12);
  CHECK(q.y.block(0).isApprox(mat({{0, 0}, {0, 0.5}})));
  CHECK(is_quasi_strong(q.x, q.y).answer == Answer::Holds);
  CHECK_THROWS_AS(make_quasi_pair_from(ModuleElement::zero(test::m2()), y0), Error);

  Rng rng = make_stream(34, 0);
  for (int t = 0; t < 20; ++t) {
    const ModuleSpace s = t % 2 ? ModuleSpace(BlockAlgebra({1, 2})) : ModuleSpace(BlockAlgebra({3}), {2});
    const QuasiPair r = make_quasi_pair(s, rng);
    const AlgebraElement c = inner_product(r.x, r.y);
    CHECK(std::abs(state_evaluate(r.witness, c)) < 1e-9 * module_norm(r.x) * module_norm(r.y));
    CHECK(std::abs(state_evaluate(r.witness, inner_product(r.x, r.x)) - std::pow(module_norm(r.x), 2)) <
          1e-9 * std::pow(module_norm(r.x), 2));
  }
}
