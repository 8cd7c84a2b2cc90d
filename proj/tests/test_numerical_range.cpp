#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "bjo/numerical_range.hpp"
#include "bjo/random.hpp"
#include "helpers.hpp"

using namespace bjo;
using test::mat;
using test::vec;

namespace {

// Brute-force support value: max over random unit vectors of Re(e^{-i theta} <C xi, xi>).
double sampled_support(const Matrix& c, double theta, Rng& rng, int draws) {
  double best = -1e300;
  const Complex rot = std::polar(1.0, -theta);
  for (int i = 0; i < draws; ++i) {
    const Vector xi = random_unit_vector(rng, static_cast<int>(c.rows()));
    best = std::max(best, (rot * xi.dot(c * xi)).real());
  }
  return best;
}

AlgebraElement in_m2(const Matrix& m) { return AlgebraElement(BlockAlgebra({2}), {m}); }

}  // namespace

TEST_CASE("eigenframes") {
  const EigenFrame f = top_eigenframe(AlgebraElement(BlockAlgebra({3}), {mat({{1, 0, 0}, {0, 1, 0}, {0, 0, 0.25}})}), 1e-9);
  REQUIRE(f.blocks.size() == 1);
  CHECK(f.blocks[0].attained);
  CHECK(f.blocks[0].basis.cols() == 2);
  CHECK(f.norm == doctest::Approx(1.0));

  const EigenFrame g = top_eigenframe(AlgebraElement(BlockAlgebra({1, 1}), {mat({{1}}), mat({{0.5}})}), 1e-9);
  CHECK(g.blocks[0].attained);
  CHECK_FALSE(g.blocks[1].attained);
  CHECK(g.attained_blocks() == std::vector<int>{0});

  const EigenFrame h = top_eigenframe(in_m2(mat({{1, 0}, {0, 1 - 1e-12}})), 1e-9);
  CHECK(h.blocks[0].basis.cols() == 2);

  // 1 - 1e-7 falls in the gray band (1e-9, 1e-6].
  const EigenFrame gray = top_eigenframe(in_m2(mat({{1, 0}, {0, 1 - 1e-7}})), 1e-9, 1e-6);
  CHECK(gray.blocks[0].basis.cols() == 1);
  CHECK(gray.ambiguous);

  CHECK_THROWS_AS(top_eigenframe(in_m2(mat({{1, 0}, {0, -0.5}})), 1e-9), Error);
}

TEST_CASE("compressions") {
  const EigenFrame f = top_eigenframe(in_m2(mat({{1, 0}, {0, 0.5}})), 1e-9);
  const auto c12 = compress(in_m2(mat({{0, 1}, {0, 0}})), f);
  REQUIRE(c12.size() == 1);
  CHECK(c12[0].matrix.rows() == 1);
  CHECK(std::abs(c12[0].matrix(0, 0)) < 1e-15);
  const auto c21 = compress(in_m2(mat({{0, 0}, {1, 0}})), f);
  CHECK(std::abs(c21[0].matrix(0, 0)) < 1e-15);

  // Full frame: compression is unitarily similar to c, so the spectrum is kept.
  Rng rng = make_stream(7, 0);
  const Matrix c = ginibre(rng, 3, 3);
  const EigenFrame full = top_eigenframe(AlgebraElement::unit(BlockAlgebra({3})), 1e-9);
  const Matrix cc = compress(AlgebraElement(BlockAlgebra({3}), {c}), full)[0].matrix;
  CHECK(cc.norm() == doctest::Approx(c.norm()).epsilon(1e-12));
  CHECK(std::abs(cc.trace() - c.trace()) < 1e-12);
}

TEST_CASE("support function") {
  for (double t : {0.0, 0.7, 2.0, 4.5}) {
    CHECK(support_function(Matrix::Identity(2, 2), t) == doctest::Approx(std::cos(t)));
    CHECK(support_function(mat({{0, 1}, {0, 0}}), t) == doctest::Approx(0.5));
    CHECK(support_function(Matrix::Zero(1, 1), t) == doctest::Approx(0.0));
  }
}

TEST_CASE("support function matches brute-force sampling") {
  Rng rng = make_stream(8, 0);
  Rng draws = make_stream(8, 1);
  for (int t = 0; t < 10; ++t) {
    const Matrix c = ginibre(rng, 2, 2);
    const double theta = 0.6 * t;
    const double h = support_function(c, theta);
    const double sampled = sampled_support(c, theta, draws, 4000);
    CHECK(sampled <= h + 1e-12);
    CHECK(sampled >= h - 0.05 * c.norm());
  }
}

TEST_CASE("contains_zero examples") {
  const Matrix nil = mat({{0, 1}, {0, 0}});
  const ZeroMembership a = contains_zero(std::vector<Matrix>{nil}, RangeMode::Single, 1e-9);
  CHECK(a.certificate.answer == Answer::Holds);
  REQUIRE(a.witness);
  CHECK(std::abs(a.witness->value) <= 1e-9);
  const Vector& w = a.witness->terms[0].vector;
  CHECK(std::abs(rayleigh_value(nil, w)) <= 1e-9);

  const ZeroMembership b = contains_zero(std::vector<Matrix>{Matrix::Identity(2, 2)}, RangeMode::Single, 1e-9);
  CHECK(b.certificate.answer == Answer::Fails);
  CHECK(b.certificate.margin == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_FALSE(b.witness);

  const ZeroMembership c = contains_zero(std::vector<Matrix>{mat({{1}}), mat({{-1}})}, RangeMode::Hull, 1e-9);
  CHECK(c.certificate.answer == Answer::Holds);
  REQUIRE(c.witness);
  REQUIRE(c.witness->terms.size() == 2);
  CHECK(c.witness->terms[0].weight == doctest::Approx(0.5));
  CHECK(c.witness->terms[1].weight == doctest::Approx(0.5));

  // Same pair in single mode: neither range contains 0.
  CHECK(contains_zero(std::vector<Matrix>{mat({{1}}), mat({{-1}})}, RangeMode::Single, 1e-9).certificate.answer ==
        Answer::Fails);
  CHECK_THROWS_AS(contains_zero(std::vector<Matrix>{}, RangeMode::Hull, 1e-9), Error);
}

TEST_CASE("normal matrices: 0 in W iff 0 in the hull of the spectrum") {
  Rng rng = make_stream(9, 0);
  for (int t = 0; t < 40; ++t) {
    const int n = 2 + t % 3;
    const Matrix u = haar_unitary(rng, n);
    Vector eig(n);
    for (int i = 0; i < n; ++i) {
      eig(i) = std::polar(1.0, 2 * std::numbers::pi * std::uniform_real_distribution<double>(0, 1)(rng));
      eig(i) += Complex(t % 2 ? 0.6 : -0.2, 0.1);
    }
    const Matrix c = u * eig.asDiagonal() * u.adjoint();

    // Oracle: 0 is in the polygon iff every angular gap between eigenvalues is below pi.
    std::vector<double> angles;
    for (int i = 0; i < n; ++i) angles.push_back(std::arg(eig(i)));
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + 2 * std::numbers::pi - angles.back();
    for (int i = 1; i < n; ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
    if (std::abs(gap - std::numbers::pi) < 1e-3) continue;
    const Answer expected = gap < std::numbers::pi ? Answer::Holds : Answer::Fails;

    const ZeroMembership z = contains_zero(std::vector<Matrix>{c}, RangeMode::Single, 1e-9);
    CHECK(z.certificate.answer == expected);
    if (z.witness) {
      for (const auto& term : z.witness->terms) CHECK(term.vector.norm() == doctest::Approx(1.0));
      CHECK(std::abs(z.witness->value) <= 1e-9);
    }
  }
}

TEST_CASE("hull witnesses replay on random compressions") {
  Rng rng = make_stream(10, 0);
  int holds = 0;
  for (int t = 0; t < 60; ++t) {
    std::vector<Matrix> cs;
    for (int k = 0; k < 1 + t % 3; ++k) cs.push_back(ginibre(rng, 1 + (t + k) % 3, 1 + (t + k) % 3) + Matrix::Identity(1 + (t + k) % 3, 1 + (t + k) % 3) * Complex(0.8, 0));
    const ZeroMembership z = contains_zero(cs, RangeMode::Hull, 1e-9);
    CHECK(z.certificate.answer != Answer::Borderline);
    if (z.certificate.answer != Answer::Holds) continue;
    ++holds;
    REQUIRE(z.witness);
    double total = 0.0;
    Complex value = 0.0;
    for (const auto& term : z.witness->terms) {
      total += term.weight;
      value += term.weight * rayleigh_value(cs[static_cast<std::size_t>(term.source)], term.vector);
    }
    CHECK(total == doctest::Approx(1.0));
    CHECK(std::abs(value) <= 1e-9);
  }
  CHECK(holds > 5);
}

TEST_CASE("reduce_on_segment hits the interpolated value") {
  Rng rng = make_stream(12, 0);
  for (int t = 0; t < 30; ++t) {
    const Matrix c = ginibre(rng, 3, 3);
    const Vector u1 = random_unit_vector(rng, 3);
    const Vector u2 = random_unit_vector(rng, 3);
    const double s = 0.1 * (t % 11);
    const Vector xi = reduce_on_segment(c, u1, u2, s);
    const Complex target = (1 - s) * rayleigh_value(c, u1) + s * rayleigh_value(c, u2);
    CHECK(xi.norm() == doctest::Approx(1.0));
    CHECK(std::abs(rayleigh_value(c, xi) - target) < 1e-9 * std::max(1.0, c.norm()));
  }
}

TEST_CASE("kernel vectors in the frame") {
  const EigenFrame f = top_eigenframe(in_m2(mat({{1, 0}, {0, 0.5}})), 1e-9);
  const KernelSearch zero = kernel_vector_in_frame(AlgebraElement::zero(BlockAlgebra({2})), f, 1e-9);
  CHECK(zero.witness);

  const KernelSearch e12 = kernel_vector_in_frame(in_m2(mat({{0, 1}, {0, 0}})), f, 1e-9);
  CHECK_FALSE(e12.witness);
  CHECK(e12.sigma_min == doctest::Approx(1.0));

  const KernelSearch e21 = kernel_vector_in_frame(in_m2(mat({{0, 0}, {1, 0}})), f, 1e-9);
  REQUIRE(e21.witness);
  CHECK(std::abs(std::abs(e21.witness->vector(0)) - 1.0) < 1e-12);
}
