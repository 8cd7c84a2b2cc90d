// constructions.hpp
// Generators for pairs that separate the three relations, plus the
// quasi-enriched sampler used by the surveys.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bjo/orthogonality.hpp"

namespace bjo {

enum class AProfile { Projection, PaperQuartic };
const char* to_string(AProfile profile);
AProfile parse_profile(const std::string& text);

/// Spectral shape of <x,x> on the chosen block:
///   I   rank-one projection,
///   II  projection of rank >= 2,
///   III some eigenvalue strictly between 0 and the norm.
enum class SqcCase { I, II, III };
const char* to_string(SqcCase c);

/// Quasi-strong but not strong: x_prime _|_q y_prime through `witness`, while
/// ||x_prime + lambda y_prime b|| = failure.achieved_norm < ||x_prime||.
struct SqcCounterexample {
  ModuleElement x_prime;
  ModuleElement y_prime;
  PureState witness;
  FailureCertificate failure;
  SqcCase case_label = SqcCase::I;
  int block = 0;
  AlgebraElement a;
  AlgebraElement u;
};

struct SqcOptions {
  std::optional<int> block;         // default: first block with n_k >= 2
  AProfile profile = AProfile::Projection;
  std::optional<SqcCase> shape;     // default: III when the block has room, else I
};

/// Throws CommutativeAlgebra when every block is 1x1, InvalidArgument when the
/// requested block or shape does not fit.
SqcCounterexample make_sqc_pair(const ModuleSpace& space, Rng& rng, const SqcOptions& options = {});

/// Same construction starting from a given nonzero x (rescaled to norm 1).
/// The norm of <x,x> must be attained on a block with n_k >= 2.
SqcCounterexample make_sqc_pair_from(const ModuleElement& x, AProfile profile = AProfile::Projection);

SqcCase classify_sqc_case(const Matrix& gram_block, double rel_tol = 1e-9);

/// BJ-orthogonal but not quasi-strongly orthogonal.
struct PrimeCounterexample {
  ModuleElement u;
  ModuleElement v;
  ModuleElement u_plus;   // u + v
  ModuleElement u_minus;  // u - v
  StateMixture bj_witness;
  /// rho(<u+v, u-v>) for the norming pure state of block i, then of block j.
  std::vector<Complex> quasi_obstruction;
  int block_i = 0;
  int block_j = 1;
};

/// Throws NotEnoughBlocks when K = 1, InvalidArgument for bad indices.
PrimeCounterexample make_prime_pair(const ModuleSpace& space, Rng& rng, int block_i = 0, int block_j = 1);

/// u supported in one block, v in another, both of norm 1.
PrimeCounterexample make_prime_pair_from(const ModuleElement& u, const ModuleElement& v);

struct MaxNormCheck {
  bool ok = false;
  double max_deviation = 0.0;
};

/// | ||alpha u + beta v|| - max(|alpha|, |beta|) | over the grid. Throws
/// NotDisjoint unless <u,v> = 0 and <u,u><v,v> = 0.
MaxNormCheck verify_max_norm_formula(const ModuleElement& u, const ModuleElement& v,
                                     const std::vector<std::pair<Complex, Complex>>& grid,
                                     double tol = 1e-9);

/// n points (alpha, beta): real, purely imaginary and generic complex mixed.
std::vector<std::pair<Complex, Complex>> max_norm_grid(int n = 100);

struct QuasiPair {
  ModuleElement x;
  ModuleElement y;
  PureState witness;
  Complex mu;
};

/// y = y0 - mu x with mu = <<x,y0> xi, xi> / ||x||^2 for a top eigenvector xi.
/// Throws DegenerateSample when x is (numerically) zero.
QuasiPair make_quasi_pair_from(const ModuleElement& x, const ModuleElement& y0);
QuasiPair make_quasi_pair(const ModuleSpace& space, Rng& rng);

}  // namespace bjo
