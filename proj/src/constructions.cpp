#include "bjo/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bjo {

const char* to_string(AProfile profile) {
  return profile == AProfile::Projection ? "projection" : "paper_quartic";
}

AProfile parse_profile(const std::string& text) {
  if (text == "projection") return AProfile::Projection;
  if (text == "paper_quartic" || text == "quartic") return AProfile::PaperQuartic;
  throw Error(ErrorCode::InvalidArgument, "unknown a-profile '" + text + "'");
}

const char* to_string(SqcCase c) {
  switch (c) {
    case SqcCase::I: return "I";
    case SqcCase::II: return "II";
    case SqcCase::III: return "III";
  }
  return "?";
}

namespace {

/// Index of the second eigenvector, and the case it realizes. Eigenvalues
/// are in descending order.
std::pair<int, SqcCase> pick_partner(const Eigen::VectorXd& values, double rel_tol) {
  const double top = values(0);
  if (values(1) >= (1.0 - rel_tol) * top) return {1, SqcCase::II};
  for (int j = 1; j < values.size(); ++j) {
    if (values(j) > rel_tol * top) return {j, SqcCase::III};
  }
  return {1, SqcCase::I};
}

Eigen::VectorXd descending_eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix((h + h.adjoint()) / 2.0), Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

int single_support(const ModuleElement& e, const char* name) {
  const auto s = e.support();
  if (s.size() != 1) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be supported in exactly one block");
  }
  return s.front();
}

}  // namespace

SqcCase classify_sqc_case(const Matrix& gram_block, double rel_tol) {
  const Eigen::VectorXd values = descending_eigenvalues(gram_block);
  if (values.size() < 2) throw Error(ErrorCode::InvalidArgument, "block must have dimension >= 2");
  return pick_partner(values, rel_tol).second;
}

SqcCounterexample make_sqc_pair_from(const ModuleElement& x0, AProfile profile) {
  const double nx = module_norm(x0);
  if (nx == 0.0) throw Error(ErrorCode::DegenerateSample, "x must be nonzero");
  const ModuleElement x = x0 * Complex(1.0 / nx);
  const BlockAlgebra& algebra = x.space().algebra();
  const AlgebraElement p = inner_product(x, x);
  const EigenFrame frame = top_eigenframe(p, 1e-9);

  int k = -1;
  for (int b : frame.attained_blocks()) {
    if (algebra.dim(b) >= 2) {
      k = b;
      break;
    }
  }
  if (k < 0) {
    if (algebra.is_commutative()) {
      throw Error(ErrorCode::CommutativeAlgebra,
                  "commutative algebra: strong and quasi-strong orthogonality coincide");
    }
    throw Error(ErrorCode::InvalidArgument, "the norm of <x,x> is not attained on a block of size >= 2");
  }

  const Spectrum spec = p.spectral_decomposition();
  const auto sk = static_cast<std::size_t>(k);
  const auto [partner, shape] = pick_partner(spec.values[sk], 1e-9);
  const Vector xi = spec.vectors[sk].col(0);
  const Vector xi2 = spec.vectors[sk].col(partner);
  const int n = algebra.dim(k);

  const Matrix proj = xi * xi.adjoint() + xi2 * xi2.adjoint();
  const Matrix id = Matrix::Identity(n, n);
  std::vector<Matrix> a_blocks, u_blocks;
  for (int b = 0; b < algebra.num_blocks(); ++b) {
    const int nb = algebra.dim(b);
    const double off = profile == AProfile::Projection ? 0.0 : 0.5;
    if (b == k) {
      a_blocks.push_back(proj + off * (id - proj));
      u_blocks.push_back(id - proj + xi2 * xi.adjoint() + xi * xi2.adjoint());
    } else {
      a_blocks.push_back(off * Matrix::Identity(nb, nb));
      u_blocks.push_back(Matrix::Identity(nb, nb));
    }
  }
  AlgebraElement a(algebra, std::move(a_blocks));
  AlgebraElement u(algebra, std::move(u_blocks));

  ModuleElement x_prime = right_action(x, a);
  ModuleElement y_prime = right_action(x_prime, u);
  const AlgebraElement b = u.adjoint() * a;
  const Complex lambda = -1.0;
  FailureCertificate failure{lambda, b, module_norm(x_prime + lambda * right_action(y_prime, b)),
                             module_norm(x_prime)};
  return SqcCounterexample{std::move(x_prime), std::move(y_prime), PureState(k, xi), std::move(failure),
                           shape, k, std::move(a), std::move(u)};
}

SqcCounterexample make_sqc_pair(const ModuleSpace& space, Rng& rng, const SqcOptions& options) {
  const BlockAlgebra& algebra = space.algebra();
  if (algebra.is_commutative()) {
    throw Error(ErrorCode::CommutativeAlgebra,
                "commutative algebra: strong and quasi-strong orthogonality coincide");
  }
  int k = -1;
  if (options.block) {
    k = *options.block;
    if (k < 0 || k >= algebra.num_blocks() || algebra.dim(k) < 2) {
      throw Error(ErrorCode::InvalidArgument, "requested block must exist and have n_k >= 2");
    }
  } else {
    for (int b = 0; b < algebra.num_blocks() && k < 0; ++b) {
      if (algebra.dim(b) >= 2) k = b;
    }
  }
  const int m = space.rows(k);
  const int n = algebra.dim(k);
  const SqcCase shape = options.shape.value_or(m >= 2 ? SqcCase::III : SqcCase::I);
  if (shape != SqcCase::I && m < 2) {
    throw Error(ErrorCode::InvalidArgument, "cases II and III need at least two module rows");
  }

  std::vector<double> s{1.0};
  if (shape == SqcCase::II) s.push_back(1.0);
  if (shape == SqcCase::III) s.push_back(std::uniform_real_distribution<double>(0.25, 0.75)(rng));
  const Matrix v = haar_unitary(rng, m);
  const Matrix w = haar_unitary(rng, n);
  Matrix block = Matrix::Zero(m, n);
  for (std::size_t j = 0; j < s.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    block += s[j] * v.col(c) * w.col(c).adjoint();
  }
  return make_sqc_pair_from(ModuleElement::in_block(space, k, std::move(block)), options.profile);
}

PrimeCounterexample make_prime_pair_from(const ModuleElement& u, const ModuleElement& v) {
  if (!(u.space() == v.space())) throw Error(ErrorCode::SpaceMismatch, "u and v in different modules");
  if (u.space().num_blocks() < 2) {
    throw Error(ErrorCode::NotEnoughBlocks, "prime algebra: a single block admits no disjoint pair");
  }
  const int i = single_support(u, "u");
  const int j = single_support(v, "v");
  if (i == j) throw Error(ErrorCode::NotDisjoint, "u and v share a block");
  if (std::abs(module_norm(u) - 1.0) > 1e-9 || std::abs(module_norm(v) - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "u and v must have norm 1");
  }

  const EigenFrame fu = top_eigenframe(inner_product(u, u), 1e-9);
  const EigenFrame fv = top_eigenframe(inner_product(v, v), 1e-9);
  const PureState si(i, fu.blocks[static_cast<std::size_t>(i)].basis.col(0));
  const PureState sj(j, fv.blocks[static_cast<std::size_t>(j)].basis.col(0));

  ModuleElement plus = u + v;
  ModuleElement minus = u - v;
  const AlgebraElement c = inner_product(plus, minus);
  std::vector<Complex> obstruction{state_evaluate(si, c), state_evaluate(sj, c)};
  StateMixture witness({{0.5, si}, {0.5, sj}});
  return PrimeCounterexample{u, v, std::move(plus), std::move(minus), std::move(witness),
                             std::move(obstruction), i, j};
}

PrimeCounterexample make_prime_pair(const ModuleSpace& space, Rng& rng, int block_i, int block_j) {
  const BlockAlgebra& algebra = space.algebra();
  if (algebra.num_blocks() < 2) {
    throw Error(ErrorCode::NotEnoughBlocks, "prime algebra: a single block admits no disjoint pair");
  }
  const int K = algebra.num_blocks();
  if (block_i == block_j || block_i < 0 || block_j < 0 || block_i >= K || block_j >= K) {
    throw Error(ErrorCode::InvalidArgument, "need two distinct existing blocks");
  }
  auto draw = [&](int k) {
    Matrix g = ginibre(rng, space.rows(k), algebra.dim(k));
    g /= spectral_norm(g);
    return ModuleElement::in_block(space, k, std::move(g));
  };
  const ModuleElement u = draw(block_i);
  const ModuleElement v = draw(block_j);
  return make_prime_pair_from(u, v);
}

MaxNormCheck verify_max_norm_formula(const ModuleElement& u, const ModuleElement& v,
                                     const std::vector<std::pair<Complex, Complex>>& grid, double tol) {
  if (inner_product(u, v).operator_norm() > tol ||
      (inner_product(u, u) * inner_product(v, v)).operator_norm() > tol) {
    throw Error(ErrorCode::NotDisjoint, "u and v are not disjointly supported");
  }
  MaxNormCheck out;
  for (const auto& [alpha, beta] : grid) {
    const double norm = module_norm(alpha * u + beta * v);
    out.max_deviation = std::max(out.max_deviation, std::abs(norm - std::max(std::abs(alpha), std::abs(beta))));
  }
  out.ok = out.max_deviation <= tol;
  return out;
}

std::vector<std::pair<Complex, Complex>> max_norm_grid(int n) {
  using namespace std::complex_literals;
  std::vector<std::pair<Complex, Complex>> grid{{1.0, 1.0}, {2.0, 0.0}, {1.0 + 1i, 1.0 - 1i}};
  auto frac = [](double t) { return t - std::floor(t); };
  for (int t = 1; static_cast<int>(grid.size()) < n; ++t) {
    const double r1 = 0.1 + 2.9 * frac(t * 0.6180339887);
    const double r2 = 0.1 + 2.9 * frac(t * 0.4142135624);
    const double p1 = 2.0 * std::numbers::pi * frac(t * 0.7548776662);
    const double p2 = 2.0 * std::numbers::pi * frac(t * 0.5698402910);
    switch (t % 3) {
      case 0: grid.emplace_back(r1 * (t % 2 ? -1.0 : 1.0), -r2); break;
      case 1: grid.emplace_back(Complex(0.0, r1), std::polar(r2, p2)); break;
      default: grid.emplace_back(std::polar(r1, p1), std::polar(r2, p2)); break;
    }
  }
  return grid;
}

QuasiPair make_quasi_pair_from(const ModuleElement& x, const ModuleElement& y0) {
  if (!(x.space() == y0.space())) throw Error(ErrorCode::SpaceMismatch, "x and y0 in different modules");
  const double nx = module_norm(x);
  if (nx < 1e-12) throw Error(ErrorCode::DegenerateSample, "x is numerically zero");
  const EigenFrame frame = top_eigenframe(inner_product(x, x), 1e-9);
  const int k = frame.attained_blocks().front();
  PureState xi(k, frame.blocks[static_cast<std::size_t>(k)].basis.col(0));
  const Complex mu = state_evaluate(xi, inner_product(x, y0)) / (nx * nx);
  ModuleElement y = y0 - mu * x;
  return QuasiPair{x, std::move(y), std::move(xi), mu};
}

QuasiPair make_quasi_pair(const ModuleSpace& space, Rng& rng) {
  auto draw = [&] {
    std::vector<Matrix> blocks;
    for (int k = 0; k < space.num_blocks(); ++k) blocks.push_back(ginibre(rng, space.rows(k), space.algebra().dim(k)));
    return ModuleElement(space, std::move(blocks));
  };
  const ModuleElement x = draw();
  const ModuleElement y0 = draw();
  return make_quasi_pair_from(x, y0);
}

}  // namespace bjo
