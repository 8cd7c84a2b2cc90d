#pragma once

#include <initializer_list>

#include "bjo/algebra.hpp"
#include "bjo/module.hpp"

namespace bjo::test {

inline Matrix mat(std::initializer_list<std::initializer_list<Complex>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (Complex z : row) m(r, c++) = z;
    ++r;
  }
  return m;
}

inline Vector vec(std::initializer_list<Complex> entries) {
  Vector v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (Complex z : entries) v(i++) = z;
  return v;
}

inline ModuleSpace m2() { return ModuleSpace(BlockAlgebra({2})); }
inline ModuleSpace c2() { return ModuleSpace(BlockAlgebra({1, 1})); }

/// An element of C^n (all blocks 1x1) from its coordinates.
inline ModuleElement coords(std::initializer_list<Complex> values) {
  std::vector<int> ones(values.size(), 1);
  std::vector<Matrix> blocks;
  for (Complex z : values) blocks.push_back(Matrix::Constant(1, 1, z));
  return ModuleElement(ModuleSpace(BlockAlgebra(ones)), std::move(blocks));
}

inline ModuleElement single(const Matrix& m) {
  return ModuleElement(ModuleSpace(BlockAlgebra({static_cast<int>(m.cols())}), {static_cast<int>(m.rows())}),
                       {m});
}

}  // namespace bjo::test
