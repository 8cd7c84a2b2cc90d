#include "bjo/random.hpp"

#include <cmath>

namespace bjo {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t s = splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
  return Rng(seq);
}

Matrix ginibre(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix m(rows, cols);
  // Fill column-major explicitly so the draw order is part of the contract.
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

Matrix haar_unitary(Rng& rng, int n) {
  const Matrix g = ginibre(rng, n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

Matrix random_isometry(Rng& rng, int rows, int cols) {
  if (rows >= cols) return haar_unitary(rng, rows).leftCols(cols);
  return haar_unitary(rng, cols).topRows(rows);
}

Vector random_unit_vector(Rng& rng, int n) {
  Vector v = ginibre(rng, n, 1).col(0);
  return v / v.norm();
}

}  // namespace bjo
