// algebra.hpp
// Finite-dimensional C*-algebras as direct sums of full matrix blocks,
// their elements, and (pure / mixed) states.

#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace bjo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class ErrorCode {
  AlgebraMismatch,
  SpaceMismatch,
  NotSelfAdjoint,
  NotPositive,
  EmptyInput,
  InvalidArgument,
  CommutativeAlgebra,
  NotEnoughBlocks,
  NotDisjoint,
  DegenerateSample,
  Config,
  Parse,
  DimensionMismatch,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Numerical tolerances. Every verdict carries a copy of the record it was
/// computed with.
struct Tolerances {
  double zero = 1e-9;           // absolute, on unit-scale quantities
  double eig = 1e-9;            // relative, eigenvalue clustering
  double self_adjoint = 1e-8;   // relative, ||a - a*|| / ||a||
  double eig_gray = 1e-6;       // relative; eigenvalues in (eig, eig_gray] make a frame ambiguous
  double minimization = 1e-10;  // relative decrease that certifies a BJ failure by minimization
};

/// The algebra M_{n_1}(C) + ... + M_{n_K}(C).
class BlockAlgebra {
 public:
  explicit BlockAlgebra(std::vector<int> block_dims);
  BlockAlgebra(std::initializer_list<int> block_dims)
      : BlockAlgebra(std::vector<int>(block_dims)) {}

  int num_blocks() const { return static_cast<int>(dims_.size()); }
  int dim(int k) const { return dims_.at(static_cast<std::size_t>(k)); }
  const std::vector<int>& dims() const { return dims_; }
  /// Sum of n_k^2.
  int linear_dim() const;

  bool is_commutative() const;
  bool is_prime() const { return dims_.size() == 1; }

  std::string to_string() const;

  friend bool operator==(const BlockAlgebra&, const BlockAlgebra&) = default;

 private:
  std::vector<int> dims_;
};

inline bool is_commutative(const BlockAlgebra& algebra) {
  return algebra.is_commutative();
}

struct Spectrum {
  /// Per block, eigenvalues in descending order.
  std::vector<Eigen::VectorXd> values;
  /// Per block, orthonormal eigenvectors as columns (matching `values`).
  std::vector<Matrix> vectors;
};

class AlgebraElement {
 public:
  AlgebraElement(BlockAlgebra algebra, std::vector<Matrix> blocks);

  static AlgebraElement zero(const BlockAlgebra& algebra);
  static AlgebraElement unit(const BlockAlgebra& algebra);
  /// Element whose only nonzero block is `k`.
  static AlgebraElement in_block(const BlockAlgebra& algebra, int k, Matrix block);
  /// Matrix unit e_k(p, q).
  static AlgebraElement matrix_unit(const BlockAlgebra& algebra, int k, int p, int q);

  const BlockAlgebra& algebra() const { return algebra_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(int k) const { return blocks_.at(static_cast<std::size_t>(k)); }

  AlgebraElement adjoint() const;
  double operator_norm() const;
  /// ||a - a*||.
  double self_adjoint_defect() const;
  bool is_self_adjoint(double rel_tol = 1e-8) const;
  bool is_positive(double eig_tol = 1e-9) const;

  /// Eigen-decomposition of (a + a*)/2 per block; throws NotSelfAdjoint when
  /// ||a - a*|| > rel_tol * ||a||.
  Spectrum spectral_decomposition(double rel_tol = 1e-8) const;

  AlgebraElement& operator+=(const AlgebraElement& other);
  AlgebraElement& operator-=(const AlgebraElement& other);
  AlgebraElement& operator*=(Complex s);

  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(AlgebraElement a, Complex s) { return a *= s; }
  friend AlgebraElement operator*(Complex s, AlgebraElement a) { return a *= s; }
  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);

 private:
  BlockAlgebra algebra_;
  std::vector<Matrix> blocks_;
};

inline double operator_norm(const AlgebraElement& a) { return a.operator_norm(); }
inline Spectrum spectral_decomposition(const AlgebraElement& a, double rel_tol = 1e-8) {
  return a.spectral_decomposition(rel_tol);
}

/// Vector state a -> <a_k xi, xi> on a single block. These are all the pure
/// states of a direct sum of matrix algebras.
struct PureState {
  int block = 0;
  Vector vector;

  PureState() = default;
  PureState(int block_index, Vector unit_vector);
};

/// Finite convex combination of pure states.
struct StateMixture {
  std::vector<std::pair<double, PureState>> terms;

  StateMixture() = default;
  explicit StateMixture(std::vector<std::pair<double, PureState>> weighted_terms);
};

using State = std::variant<PureState, StateMixture>;

/// Throws AlgebraMismatch unless the state lives on `algebra`.
void check_state(const PureState& state, const BlockAlgebra& algebra, double tol = 1e-9);
void check_state(const StateMixture& state, const BlockAlgebra& algebra, double tol = 1e-9);

Complex state_evaluate(const PureState& state, const AlgebraElement& a);
Complex state_evaluate(const StateMixture& state, const AlgebraElement& a);
Complex state_evaluate(const State& state, const AlgebraElement& a);

/// Largest eigenvalue of a small Hermitian matrix (only the Hermitian part
/// of `h` is read). Closed form for n <= 2.
double hermitian_top_eigenvalue(const Matrix& h);

/// Largest singular value of a (possibly rectangular) block.
double spectral_norm(const Matrix& m);

}  // namespace bjo
