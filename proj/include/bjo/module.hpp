// module.hpp
// Canonical full Hilbert modules M_{m_1 x n_1} + ... + M_{m_K x n_K} over a
// BlockAlgebra, with <x, y> = x* y blockwise.

#pragma once

#include <vector>

#include "bjo/algebra.hpp"

namespace bjo {

class ModuleSpace {
 public:
  ModuleSpace(BlockAlgebra algebra, std::vector<int> row_dims);
  /// The algebra as a module over itself (rows = block dims).
  explicit ModuleSpace(BlockAlgebra algebra);

  const BlockAlgebra& algebra() const { return algebra_; }
  const std::vector<int>& rows() const { return rows_; }
  int rows(int k) const { return rows_.at(static_cast<std::size_t>(k)); }
  int num_blocks() const { return algebra_.num_blocks(); }
  bool is_algebra_module() const { return rows_ == algebra_.dims(); }

  /// Short label such as "M2", "C+M2" or "M3x2/M2".
  std::string to_string() const;

  friend bool operator==(const ModuleSpace&, const ModuleSpace&) = default;

 private:
  BlockAlgebra algebra_;
  std::vector<int> rows_;
};

class ModuleElement {
 public:
  ModuleElement(ModuleSpace space, std::vector<Matrix> blocks);

  static ModuleElement zero(const ModuleSpace& space);
  static ModuleElement in_block(const ModuleSpace& space, int k, Matrix block);
  /// Rank-one element with a single 1 at (row, col) of block k.
  static ModuleElement basis(const ModuleSpace& space, int k, int row, int col);
  /// View an algebra element as an element of the algebra-as-module.
  static ModuleElement from_algebra(const AlgebraElement& a);

  const ModuleSpace& space() const { return space_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(int k) const { return blocks_.at(static_cast<std::size_t>(k)); }

  /// True when every block vanishes exactly.
  bool is_zero() const;
  /// Indices of blocks that are not identically zero.
  std::vector<int> support() const;

  ModuleElement& operator+=(const ModuleElement& other);
  ModuleElement& operator-=(const ModuleElement& other);
  ModuleElement& operator*=(Complex s);

  friend ModuleElement operator+(ModuleElement a, const ModuleElement& b) { return a += b; }
  friend ModuleElement operator-(ModuleElement a, const ModuleElement& b) { return a -= b; }
  friend ModuleElement operator*(ModuleElement a, Complex s) { return a *= s; }
  friend ModuleElement operator*(Complex s, ModuleElement a) { return a *= s; }

 private:
  ModuleSpace space_;
  std::vector<Matrix> blocks_;
};

/// <x, y> = x* y blockwise; conjugate-linear in x.
AlgebraElement inner_product(const ModuleElement& x, const ModuleElement& y);

/// x a blockwise.
ModuleElement right_action(const ModuleElement& x, const AlgebraElement& a);
inline ModuleElement operator*(const ModuleElement& x, const AlgebraElement& a) {
  return right_action(x, a);
}

/// ||<x, x>||^{1/2}, the largest singular value over blocks.
double module_norm(const ModuleElement& x);

}  // namespace bjo
