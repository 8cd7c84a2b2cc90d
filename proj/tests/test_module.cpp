#include <doctest.h>

#include <Eigen/Dense>

#include "bjo/random.hpp"
#include "helpers.hpp"

using namespace bjo;
using test::mat;

TEST_CASE("inner product examples") {
  const ModuleSpace s = test::m2();
  const ModuleElement id = ModuleElement::from_algebra(AlgebraElement::unit(s.algebra()));
  CHECK(inner_product(id, id).block(0).isApprox(Matrix::Identity(2, 2)));

  const ModuleElement x(s, {mat({{1, 0}, {0, 0.5}})});
  const ModuleElement y(s, {mat({{0, 1}, {0, 0}})});
  CHECK(inner_product(x, y).block(0).isApprox(mat({{0, 1}, {0, 0}})));

  const ModuleSpace cm({1, 2});
  const ModuleElement u = ModuleElement::in_block(cm, 0, mat({{1}}));
  const ModuleElement v = ModuleElement::in_block(cm, 1, mat({{1, 0}, {0, 1}}));
  CHECK(inner_product(u, v).operator_norm() == 0.0);

  CHECK_THROWS_AS(inner_product(x, u), Error);
}

TEST_CASE("right action examples") {
  const ModuleSpace s = test::m2();
  const ModuleElement x(s, {mat({{1, 0}, {0, 0.5}})});
  CHECK((x * AlgebraElement::unit(s.algebra())).block(0).isApprox(x.block(0)));
  CHECK((x * AlgebraElement::zero(s.algebra())).is_zero());
  const AlgebraElement swap(s.algebra(), {mat({{0, 1}, {1, 0}})});
  CHECK((x * swap).block(0).isApprox(mat({{0, 1}, {0.5, 0}})));
  CHECK_THROWS_AS(x * AlgebraElement::unit(BlockAlgebra({1, 1})), Error);
}

TEST_CASE("module norm examples") {
  CHECK(module_norm(ModuleElement::zero(test::m2())) == 0.0);
  CHECK(module_norm(ModuleElement(test::m2(), {mat({{1, 0}, {0, 0.5}})})) == doctest::Approx(1.0));
  CHECK(module_norm(test::coords({1, 1})) == doctest::Approx(1.0));
}

TEST_CASE("fullness: matrix units arise as inner products of rank-one elements") {
  const ModuleSpace s(BlockAlgebra({2, 3}), {1, 2});
  int count = 0;
  for (int k = 0; k < 2; ++k) {
    const int n = s.algebra().dim(k);
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) {
        const AlgebraElement e = inner_product(ModuleElement::basis(s, k, 0, p), ModuleElement::basis(s, k, 0, q));
        const AlgebraElement unit = AlgebraElement::matrix_unit(s.algebra(), k, p, q);
        CHECK((e - unit).operator_norm() < 1e-15);
        ++count;
      }
    }
  }
  CHECK(count == 2 * 2 + 3 * 3);
}

TEST_CASE("module axioms on random triples") {
  Rng rng = make_stream(11, 0);
  const ModuleSpace s(BlockAlgebra({1, 2, 3}), {2, 1, 4});
  auto element = [&] {
    std::vector<Matrix> b;
    for (int k = 0; k < s.num_blocks(); ++k) b.push_back(ginibre(rng, s.rows(k), s.algebra().dim(k)));
    return ModuleElement(s, b);
  };
  for (int t = 0; t < 30; ++t) {
    const ModuleElement x = element(), y = element();
    std::vector<Matrix> ab;
    for (int n : s.algebra().dims()) ab.push_back(ginibre(rng, n, n));
    const AlgebraElement a(s.algebra(), ab);

    CHECK((inner_product(x, y * a) - inner_product(x, y) * a).operator_norm() < 1e-10);
    CHECK((inner_product(x, y).adjoint() - inner_product(y, x)).operator_norm() < 1e-12);
    CHECK(inner_product(x, x).is_positive());
    CHECK(module_norm(x * a) <= module_norm(x) * a.operator_norm() * (1 + 1e-12));

    const Complex z(0.3, -1.2);
    CHECK((inner_product(z * x, y) - std::conj(z) * inner_product(x, y)).operator_norm() < 1e-10);
    CHECK((inner_product(x, z * y) - z * inner_product(x, y)).operator_norm() < 1e-10);

    double top = 0.0;
    for (int k = 0; k < s.num_blocks(); ++k) {
      top = std::max(top, Eigen::JacobiSVD<Matrix>(x.block(k)).singularValues()(0));
    }
    CHECK(module_norm(x) == doctest::Approx(top).epsilon(1e-12));
  }
}
