#include "bjo/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bjo {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CommutativeAlgebra: return "CommutativeAlgebra";
    case ErrorCode::NotEnoughBlocks: return "NotEnoughBlocks";
    case ErrorCode::NotDisjoint: return "NotDisjoint";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// small dense helpers

double hermitian_top_eigenvalue(const Matrix& h) {
  const auto n = h.rows();
  if (n == 1) return h(0, 0).real();
  if (n == 2) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const Complex b = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
    const double half_diff = 0.5 * (a - d);
    return 0.5 * (a + d) + std::sqrt(half_diff * half_diff + std::norm(b));
  }
  const Matrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(n - 1);
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix gram = m.rows() < m.cols() ? Matrix(m * m.adjoint()) : Matrix(m.adjoint() * m);
  return std::sqrt(std::max(0.0, hermitian_top_eigenvalue(gram)));
}

// ---------------------------------------------------------------------------
// BlockAlgebra

BlockAlgebra::BlockAlgebra(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
  if (dims_.empty()) throw Error(ErrorCode::InvalidArgument, "algebra needs at least one block");
  for (int n : dims_) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "block dimensions must be positive");
  }
}

int BlockAlgebra::linear_dim() const {
  int total = 0;
  for (int n : dims_) total += n * n;
  return total;
}

bool BlockAlgebra::is_commutative() const {
  return std::all_of(dims_.begin(), dims_.end(), [](int n) { return n == 1; });
}

std::string BlockAlgebra::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (k) os << "+";
    if (dims_[k] == 1) {
      os << "C";
    } else {
      os << "M" << dims_[k];
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// AlgebraElement

AlgebraElement::AlgebraElement(BlockAlgebra algebra, std::vector<Matrix> blocks)
    : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != algebra_.num_blocks()) {
    throw Error(ErrorCode::AlgebraMismatch, "block count does not match the algebra");
  }
  for (int k = 0; k < algebra_.num_blocks(); ++k) {
    const auto& b = blocks_[static_cast<std::size_t>(k)];
    if (b.rows() != algebra_.dim(k) || b.cols() != algebra_.dim(k)) {
      throw Error(ErrorCode::AlgebraMismatch,
                  "block " + std::to_string(k) + " has the wrong shape");
    }
  }
}

AlgebraElement AlgebraElement::zero(const BlockAlgebra& algebra) {
  std::vector<Matrix> blocks;
  for (int n : algebra.dims()) blocks.push_back(Matrix::Zero(n, n));
  return AlgebraElement(algebra, std::move(blocks));
}

AlgebraElement AlgebraElement::unit(const BlockAlgebra& algebra) {
  std::vector<Matrix> blocks;
  for (int n : algebra.dims()) blocks.push_back(Matrix::Identity(n, n));
  return AlgebraElement(algebra, std::move(blocks));
}

AlgebraElement AlgebraElement::in_block(const BlockAlgebra& algebra, int k, Matrix block) {
  if (k < 0 || k >= algebra.num_blocks()) {
    throw Error(ErrorCode::InvalidArgument, "block index out of range");
  }
  auto a = zero(algebra);
  a.blocks_[static_cast<std::size_t>(k)] = std::move(block);
  return AlgebraElement(a.algebra_, std::move(a.blocks_));
}

AlgebraElement AlgebraElement::matrix_unit(const BlockAlgebra& algebra, int k, int p, int q) {
  if (k < 0 || k >= algebra.num_blocks() || p < 0 || q < 0 || p >= algebra.dim(k) ||
      q >= algebra.dim(k)) {
    throw Error(ErrorCode::InvalidArgument, "matrix unit index out of range");
  }
  Matrix m = Matrix::Zero(algebra.dim(k), algebra.dim(k));
  m(p, q) = 1.0;
  return in_block(algebra, k, std::move(m));
}

AlgebraElement AlgebraElement::adjoint() const {
  std::vector<Matrix> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(b.adjoint());
  return AlgebraElement(algebra_, std::move(out));
}

double AlgebraElement::operator_norm() const {
  double best = 0.0;
  for (const auto& b : blocks_) best = std::max(best, spectral_norm(b));
  return best;
}

double AlgebraElement::self_adjoint_defect() const {
  double best = 0.0;
  for (const auto& b : blocks_) best = std::max(best, spectral_norm(b - b.adjoint()));
  return best;
}

bool AlgebraElement::is_self_adjoint(double rel_tol) const {
  return self_adjoint_defect() <= rel_tol * std::max(operator_norm(), 1e-300);
}

bool AlgebraElement::is_positive(double eig_tol) const {
  const double norm = operator_norm();
  if (norm == 0.0) return true;
  if (!is_self_adjoint(1e-8)) return false;
  for (const auto& b : blocks_) {
    const Matrix sym = 0.5 * (b + b.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues()(0) < -eig_tol * norm) return false;
  }
  return true;
}

Spectrum AlgebraElement::spectral_decomposition(double rel_tol) const {
  const double norm = operator_norm();
  if (self_adjoint_defect() > rel_tol * norm) {
    throw Error(ErrorCode::NotSelfAdjoint, "spectral decomposition needs a self-adjoint element");
  }
  Spectrum out;
  for (const auto& b : blocks_) {
    const Matrix sym = 0.5 * (b + b.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    // Eigen returns ascending order.
    out.values.push_back(solver.eigenvalues().reverse());
    out.vectors.push_back(solver.eigenvectors().rowwise().reverse());
  }
  return out;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& other) {
  if (!(algebra_ == other.algebra_)) throw Error(ErrorCode::AlgebraMismatch, "sum across algebras");
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += other.blocks_[k];
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& other) {
  if (!(algebra_ == other.algebra_)) throw Error(ErrorCode::AlgebraMismatch, "difference across algebras");
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= other.blocks_[k];
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(Complex s) {
  for (auto& b : blocks_) b *= s;
  return *this;
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  if (!(a.algebra() == b.algebra())) throw Error(ErrorCode::AlgebraMismatch, "product across algebras");
  std::vector<Matrix> out;
  out.reserve(a.blocks().size());
  for (std::size_t k = 0; k < a.blocks().size(); ++k) out.push_back(a.blocks()[k] * b.blocks()[k]);
  return AlgebraElement(a.algebra(), std::move(out));
}

// ---------------------------------------------------------------------------
// states

PureState::PureState(int block_index, Vector unit_vector)
    : block(block_index), vector(std::move(unit_vector)) {
  if (block < 0) throw Error(ErrorCode::InvalidArgument, "negative block index");
  if (std::abs(vector.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "pure state vector must have unit norm");
  }
}

StateMixture::StateMixture(std::vector<std::pair<double, PureState>> weighted_terms)
    : terms(std::move(weighted_terms)) {
  if (terms.empty()) throw Error(ErrorCode::EmptyInput, "state mixture needs at least one term");
  double total = 0.0;
  for (const auto& [w, s] : terms) {
    if (!(w > 0.0) || w > 1.0 + 1e-12) {
      throw Error(ErrorCode::InvalidArgument, "mixture weights must lie in (0, 1]");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "mixture weights must sum to 1");
  }
}

void check_state(const PureState& state, const BlockAlgebra& algebra, double tol) {
  if (state.block < 0 || state.block >= algebra.num_blocks() ||
      state.vector.size() != algebra.dim(state.block)) {
    throw Error(ErrorCode::AlgebraMismatch, "state does not live on this algebra");
  }
  if (std::abs(state.vector.norm() - 1.0) > tol) {
    throw Error(ErrorCode::InvalidArgument, "pure state vector must have unit norm");
  }
}

void check_state(const StateMixture& state, const BlockAlgebra& algebra, double tol) {
  for (const auto& term : state.terms) check_state(term.second, algebra, tol);
}

Complex state_evaluate(const PureState& state, const AlgebraElement& a) {
  check_state(state, a.algebra());
  const Vector& xi = state.vector;
  return xi.dot(a.block(state.block) * xi);  // dot conjugates the left argument
}

Complex state_evaluate(const StateMixture& state, const AlgebraElement& a) {
  Complex total = 0.0;
  for (const auto& [w, s] : state.terms) total += w * state_evaluate(s, a);
  return total;
}

Complex state_evaluate(const State& state, const AlgebraElement& a) {
  return std::visit([&](const auto& s) { return state_evaluate(s, a); }, state);
}

}  // namespace bjo
