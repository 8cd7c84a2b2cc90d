#include "bjo/module.hpp"

#include <algorithm>
#include <sstream>

namespace bjo {

ModuleSpace::ModuleSpace(BlockAlgebra algebra, std::vector<int> row_dims)
    : algebra_(std::move(algebra)), rows_(std::move(row_dims)) {
  if (static_cast<int>(rows_.size()) != algebra_.num_blocks()) {
    throw Error(ErrorCode::SpaceMismatch, "row dims must list one entry per algebra block");
  }
  for (int m : rows_) {
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "module row dims must be positive");
  }
}

ModuleSpace::ModuleSpace(BlockAlgebra algebra)
    : ModuleSpace(algebra, algebra.dims()) {}

std::string ModuleSpace::to_string() const {
  if (is_algebra_module()) return algebra_.to_string();
  std::ostringstream os;
  for (int k = 0; k < num_blocks(); ++k) {
    if (k) os << "+";
    os << "M" << rows(k) << "x" << algebra_.dim(k);
  }
  os << "/" << algebra_.to_string();
  return os.str();
}

ModuleElement::ModuleElement(ModuleSpace space, std::vector<Matrix> blocks)
    : space_(std::move(space)), blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != space_.num_blocks()) {
    throw Error(ErrorCode::SpaceMismatch, "block count does not match the module");
  }
  for (int k = 0; k < space_.num_blocks(); ++k) {
    const auto& b = blocks_[static_cast<std::size_t>(k)];
    if (b.rows() != space_.rows(k) || b.cols() != space_.algebra().dim(k)) {
      throw Error(ErrorCode::SpaceMismatch,
                  "module block " + std::to_string(k) + " has the wrong shape");
    }
  }
}

ModuleElement ModuleElement::zero(const ModuleSpace& space) {
  std::vector<Matrix> blocks;
  for (int k = 0; k < space.num_blocks(); ++k) {
    blocks.push_back(Matrix::Zero(space.rows(k), space.algebra().dim(k)));
  }
  return ModuleElement(space, std::move(blocks));
}

ModuleElement ModuleElement::in_block(const ModuleSpace& space, int k, Matrix block) {
  if (k < 0 || k >= space.num_blocks()) {
    throw Error(ErrorCode::InvalidArgument, "block index out of range");
  }
  auto blocks = zero(space).blocks_;
  blocks[static_cast<std::size_t>(k)] = std::move(block);
  return ModuleElement(space, std::move(blocks));
}

ModuleElement ModuleElement::basis(const ModuleSpace& space, int k, int row, int col) {
  if (k < 0 || k >= space.num_blocks() || row < 0 || row >= space.rows(k) || col < 0 ||
      col >= space.algebra().dim(k)) {
    throw Error(ErrorCode::InvalidArgument, "basis index out of range");
  }
  Matrix m = Matrix::Zero(space.rows(k), space.algebra().dim(k));
  m(row, col) = 1.0;
  return in_block(space, k, std::move(m));
}

ModuleElement ModuleElement::from_algebra(const AlgebraElement& a) {
  return ModuleElement(ModuleSpace(a.algebra()), a.blocks());
}

bool ModuleElement::is_zero() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const Matrix& b) { return b.isZero(0.0); });
}

std::vector<int> ModuleElement::support() const {
  std::vector<int> out;
  for (int k = 0; k < space_.num_blocks(); ++k) {
    if (!blocks_[static_cast<std::size_t>(k)].isZero(0.0)) out.push_back(k);
  }
  return out;
}

ModuleElement& ModuleElement::operator+=(const ModuleElement& other) {
  if (!(space_ == other.space_)) throw Error(ErrorCode::SpaceMismatch, "sum across modules");
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += other.blocks_[k];
  return *this;
}

ModuleElement& ModuleElement::operator-=(const ModuleElement& other) {
  if (!(space_ == other.space_)) throw Error(ErrorCode::SpaceMismatch, "difference across modules");
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= other.blocks_[k];
  return *this;
}

ModuleElement& ModuleElement::operator*=(Complex s) {
  for (auto& b : blocks_) b *= s;
  return *this;
}

AlgebraElement inner_product(const ModuleElement& x, const ModuleElement& y) {
  if (!(x.space() == y.space())) {
    throw Error(ErrorCode::SpaceMismatch, "inner product of elements from different modules");
  }
  std::vector<Matrix> out;
  out.reserve(x.blocks().size());
  for (std::size_t k = 0; k < x.blocks().size(); ++k) {
    out.push_back(x.blocks()[k].adjoint() * y.blocks()[k]);
  }
  return AlgebraElement(x.space().algebra(), std::move(out));
}

ModuleElement right_action(const ModuleElement& x, const AlgebraElement& a) {
  if (!(x.space().algebra() == a.algebra())) {
    throw Error(ErrorCode::AlgebraMismatch, "right action by an element of another algebra");
  }
  std::vector<Matrix> out;
  out.reserve(x.blocks().size());
  for (std::size_t k = 0; k < x.blocks().size(); ++k) out.push_back(x.blocks()[k] * a.blocks()[k]);
  return ModuleElement(x.space(), std::move(out));
}

double module_norm(const ModuleElement& x) {
  double best = 0.0;
  for (const auto& b : x.blocks()) best = std::max(best, spectral_norm(b));
  return best;
}

}  // namespace bjo
