// numerical_range.hpp
// Norm-attaining eigenframes and certified membership of 0 in numerical
// ranges (fields of values) of finite-rank compressions.
//
// A "Fails" answer is certified by a supporting half-plane: some angle theta
// with h(theta) < -tol, where h is the support function of the range. A
// "Holds" answer is certified constructively: points <C xi, xi> that lie in
// the range are collected, and a witness vector (or convex combination of
// vectors) whose value is within tol of 0 is built from them by 2-dimensional
// (elliptical range) reductions.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bjo/algebra.hpp"

namespace bjo {

enum class Answer { Holds, Fails, Borderline };
const char* to_string(Answer answer);

/// Orthonormal bases of the top eigenspaces of a positive element.
struct EigenFrame {
  struct Block {
    bool attained = false;  // block maximum equals the global maximum within tolerance
    Matrix basis;           // n_k x d_k, orthonormal columns
    double top_value = 0.0;
  };

  BlockAlgebra algebra;
  std::vector<Block> blocks;
  double norm = 0.0;     // ||p||
  double eig_tol = 0.0;  // relative tolerance used
  /// Some eigenvalue sits within (eig_tol, gray_tol] * ||p|| of the global
  /// maximum, so a looser tolerance would give a different frame.
  bool ambiguous = false;

  std::vector<int> attained_blocks() const;
};

/// Throws NotPositive when p has an eigenvalue below -eig_tol * ||p||.
EigenFrame top_eigenframe(const AlgebraElement& p, double eig_tol, double gray_tol = 0.0);

struct Compression {
  int block = 0;
  Matrix matrix;  // B_k* c_k B_k
};

/// Compressions of c to the attained blocks of the frame.
std::vector<Compression> compress(const AlgebraElement& c, const EigenFrame& frame);

/// Largest eigenvalue of Re(e^{-i theta} C).
double support_function(const Matrix& c, double theta);

/// <C xi, xi> for a (not necessarily normalized) vector, divided by ||xi||^2.
Complex rayleigh_value(const Matrix& c, const Vector& xi);

struct CertifiedBool {
  Answer answer = Answer::Borderline;
  /// Fails: certified distance from 0 to the range (> tol).
  /// Holds: certified slack of min h above -tol.
  double margin = 0.0;
  double min_upper = 0.0;   // smallest evaluated support value
  double min_lower = 0.0;   // certified lower bound on min over theta of h
  double lipschitz_slack = 0.0;
  double argmin_theta = 0.0;
  int evaluations = 0;
};

enum class RangeMode { Single, Hull };

/// One term of a witness: weight * omega_{vector} on compression `source`.
struct RangeTerm {
  int source = 0;
  double weight = 1.0;
  Vector vector;  // unit vector in the compressed space
};

struct RangeWitness {
  std::vector<RangeTerm> terms;
  Complex value;  // sum of weight * <C xi, xi>
};

struct ZeroMembership {
  CertifiedBool certificate;
  std::optional<RangeWitness> witness;
  /// Single mode: per-matrix results, in input order.
  std::vector<CertifiedBool> per_matrix;
};

struct RangeOptions {
  int grid_points = 180;
  int max_depth = 20;
};

/// Single: Holds iff 0 lies in W(C) for some C in the list.
/// Hull: Holds iff 0 lies in the convex hull of the union of the W(C).
/// Throws EmptyInput on an empty list.
ZeroMembership contains_zero(std::span<const Matrix> compressions, RangeMode mode, double tol,
                             const RangeOptions& options = {});

/// Finds a unit xi in span{u1, u2} with <C xi, xi> = (1-s) <C u1,u1> + s <C u2,u2>.
Vector reduce_on_segment(const Matrix& c, const Vector& u1, const Vector& u2, double s);

struct KernelSearch {
  std::optional<PureState> witness;  // xi in the frame with ||c_k* xi|| <= tol
  double sigma_min = 0.0;            // smallest sigma over attained blocks
  std::vector<double> per_block;     // sigma_min of c_k* B_k, attained blocks in order
};

KernelSearch kernel_vector_in_frame(const AlgebraElement& c, const EigenFrame& frame, double tol);

}  // namespace bjo
