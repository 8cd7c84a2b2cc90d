#include <doctest.h>

#include <cmath>

#include "bjo/orthogonality.hpp"
#include "bjo/random.hpp"
#include "helpers.hpp"

using namespace bjo;
using test::mat;

namespace {

ModuleElement random_element(const ModuleSpace& s, Rng& rng) {
  std::vector<Matrix> b;
  for (int k = 0; k < s.num_blocks(); ++k) b.push_back(ginibre(rng, s.rows(k), s.algebra().dim(k)));
  return ModuleElement(s, b);
}

// Oracle for C^2 with x = (1,0): ||x + l y|| = max(|1 + l y1|, |l y2|), minimized on a fine grid.
double grid_min_c2(Complex y1, Complex y2) {
  double best = 1e300;
  for (int i = -400; i <= 400; ++i) {
    for (int j = -400; j <= 400; ++j) {
      const Complex l(i / 200.0, j / 200.0);
      best = std::min(best, std::max(std::abs(1.0 + l * y1), std::abs(l * y2)));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("bj examples") {
  const ModuleElement x = test::coords({1, 0});
  const ModuleElement y = test::coords({1, 1});
  const Verdict v = is_bj(x, y);
  CHECK(v.answer == Answer::Fails);
  REQUIRE(v.certificate);
  CHECK(v.certificate->achieved_norm == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::abs(v.certificate->lambda - Complex(-0.5, 0)) < 1e-6);
  CHECK(replay_certificate(*v.certificate, x, y) == doctest::Approx(v.certificate->achieved_norm));
  CHECK(grid_min_c2(1, 1) == doctest::Approx(0.5).epsilon(1e-9));

  const Minimum m = minimize_norm(x, y);
  CHECK(m.value == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(std::abs(m.lambda - Complex(-0.5, 0)) < 1e-6);
  CHECK(is_bj_minimization(x, y).answer == Answer::Fails);

  CHECK(is_bj(test::coords({1, 1}), test::coords({1, -1})).answer == Answer::Holds);
  CHECK(is_bj(ModuleElement::zero(test::c2()), test::coords({1, 1})).answer == Answer::Holds);
  CHECK(is_bj(test::coords({1, 1}), ModuleElement::zero(test::c2())).answer == Answer::Holds);
}

TEST_CASE("minimization matches a grid oracle on C^2") {
  Rng rng = make_stream(20, 0);
  std::normal_distribution<double> g;
  for (int t = 0; t < 4; ++t) {
    const Complex y1(g(rng), g(rng)), y2(g(rng), g(rng));
    const ModuleElement x = test::coords({1, 0});
    const ModuleElement y = test::coords({y1, y2});
    const double oracle = grid_min_c2(y1, y2);
    const Minimum m = minimize_norm(x, y);
    CHECK(m.value <= oracle + 1e-12);
    CHECK(m.value >= oracle - 0.02);
  }
}

TEST_CASE("quasi-strong examples") {
  const ModuleSpace s = test::m2();
  const ModuleElement x(s, {mat({{1, 0}, {0, 0.5}})});
  const ModuleElement y(s, {mat({{0, 1}, {0, 0}})});
  const Verdict v = is_quasi_strong(x, y);
  CHECK(v.answer == Answer::Holds);
  REQUIRE(v.witness);
  const auto& w = std::get<PureState>(*v.witness);
  CHECK(w.block == 0);
  CHECK(std::abs(std::abs(w.vector(0)) - 1.0) < 1e-12);
  CHECK(replay_witness(v, x, y).ok);

  const Verdict f = is_quasi_strong(test::coords({1, 1}), test::coords({1, -1}));
  CHECK(f.answer == Answer::Fails);
  // Both coordinate states attain the norm; their values on <x,y> are +1 and -1.
  const AlgebraElement c = inner_product(test::coords({1, 1}), test::coords({1, -1}));
  CHECK(c.block(0)(0, 0) == Complex(1, 0));
  CHECK(c.block(1)(0, 0) == Complex(-1, 0));
}

TEST_CASE("strong examples") {
  const ModuleSpace s = test::m2();
  const ModuleElement x(s, {mat({{1, 0}, {0, 0.5}})});
  const ModuleElement y(s, {mat({{0, 1}, {0, 0}})});
  const Verdict v = is_strong(x, y);
  CHECK(v.answer == Answer::Fails);
  REQUIRE(v.certificate);
  REQUIRE(v.certificate->b);
  CHECK(v.certificate->achieved_norm < 1.0 - 1e-3);
  CHECK(replay_certificate(*v.certificate, x, y) == doctest::Approx(v.certificate->achieved_norm));

  // Definitional check: b = e21, lambda = -1/2 gives y b = e11 and norm 1/2.
  const FailureCertificate by_hand{Complex(-0.5, 0), AlgebraElement(s.algebra(), {mat({{0, 0}, {1, 0}})}), 0.0, 1.0};
  CHECK(replay_certificate(by_hand, x, y) == doctest::Approx(0.5));

  const Verdict h = is_strong(test::coords({1, 0.5}), test::coords({0, 1}));
  CHECK(h.answer == Answer::Holds);
  CHECK(replay_witness(h, test::coords({1, 0.5}), test::coords({0, 1})).ok);
}

TEST_CASE("definitional probe") {
  const ModuleSpace s = test::m2();
  const ModuleElement x(s, {mat({{1, 0}, {0, 0.5}})});
  const ModuleElement y(s, {mat({{0, 1}, {0, 0}})});
  Rng rng = make_stream(21, 0);
  const ProbeResult hit = strong_definitional_probe(x, y, 50, rng);
  CHECK(hit.status == ProbeStatus::CounterexampleFound);
  REQUIRE(hit.certificate);
  CHECK(replay_certificate(*hit.certificate, x, y) < 1.0 - 1e-3);

  const ProbeResult miss = strong_definitional_probe(test::coords({1, 0.5}), test::coords({0, 1}), 1000, rng);
  CHECK(miss.status == ProbeStatus::NoCounterexampleFound);
  CHECK(miss.samples_tried == 1000);
}

TEST_CASE("module and algebra BJ agree") {
  const Consistency a = bj_module_algebra_consistency(test::coords({1, 1}), test::coords({1, -1}));
  CHECK(a.consistent);
  CHECK(a.module_side.answer == Answer::Holds);
  CHECK(a.algebra_side.answer == Answer::Holds);
  const Consistency b = bj_module_algebra_consistency(test::coords({1, 0}), test::coords({1, 1}));
  CHECK(b.consistent);
  CHECK(b.module_side.answer == Answer::Fails);
  CHECK(b.algebra_side.answer == Answer::Fails);
}

TEST_CASE("properties on random pairs") {
  Rng rng = make_stream(22, 0);
  const std::vector<ModuleSpace> spaces{ModuleSpace(BlockAlgebra({1, 1})), ModuleSpace(BlockAlgebra({2})),
                                        ModuleSpace(BlockAlgebra({1, 2})), ModuleSpace(BlockAlgebra({2}), {3})};
  int bj_holds = 0;
  for (int t = 0; t < 160; ++t) {
    const ModuleSpace& s = spaces[static_cast<std::size_t>(t % 4)];
    const ModuleElement x = random_element(s, rng);
    ModuleElement y = random_element(s, rng);
    // Push half the pairs toward orthogonality so both answers occur.
    if (t % 2) {
      const AlgebraElement c = inner_product(x, y);
      const double scale = std::pow(module_norm(x), 2);
      y -= x * (c * (1.0 / scale));
    }
    const Verdict st = is_strong(x, y), q = is_quasi_strong(x, y), bj = is_bj(x, y);

    // Implication chain.
    if (st.answer == Answer::Holds) CHECK(q.answer != Answer::Fails);
    if (q.answer == Answer::Holds) CHECK(bj.answer != Answer::Fails);

    // Witnesses replay and certificates beat ||x||.
    for (const Verdict* v : {&st, &q, &bj}) {
      if (v->answer == Answer::Holds) CHECK(replay_witness(*v, x, y).ok);
      // Quasi-strong orthogonality has no norm inequality to exhibit.
      if (v->answer == Answer::Fails && v->relation != Relation::QuasiStrong) {
        REQUIRE(v->certificate);
        CHECK(replay_certificate(*v->certificate, x, y) < module_norm(x));
      }
    }

    // Definitional route agrees whenever both are certified.
    const Verdict m = is_bj_minimization(x, y);
    if (m.answer != Answer::Borderline && bj.answer != Answer::Borderline) CHECK(m.answer == bj.answer);
    if (bj.answer == Answer::Holds) ++bj_holds;

    // Homogeneity: x _|_ y iff (r x) _|_ (z y) for r > 0, z != 0.
    const Verdict scaled = is_bj(x * Complex(3.5, 0), y * Complex(-0.2, 0.7));
    if (bj.answer != Answer::Borderline && scaled.answer != Answer::Borderline) CHECK(scaled.answer == bj.answer);
  }
  CHECK(bj_holds > 10);
}
