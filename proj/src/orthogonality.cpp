#include "bjo/orthogonality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bjo {

const char* to_string(Relation relation) {
  switch (relation) {
    case Relation::BJ: return "bj";
    case Relation::QuasiStrong: return "quasi";
    case Relation::Strong: return "strong";
  }
  return "unknown";
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;

void require_same_space(const ModuleElement& x, const ModuleElement& y) {
  if (!(x.space() == y.space())) {
    throw Error(ErrorCode::SpaceMismatch, "x and y belong to different modules");
  }
}

/// Golden-section search for the minimum of a convex function on [lo, hi].
template <typename F>
std::pair<double, double> golden_min(F&& f, double lo, double hi, double accuracy) {
  double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > accuracy) {
    if (f1 <= f2) {
      hi = x2, x2 = x1, f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1, x1 = x2, f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

/// lambda -> ||x + lambda y||^2 through the blockwise Gram expansion.
class NormSquared {
 public:
  NormSquared(const ModuleElement& x, const ModuleElement& y, double x_scale, double y_scale) {
    for (std::size_t k = 0; k < x.blocks().size(); ++k) {
      const Matrix xs = x.blocks()[k] / x_scale;
      const Matrix ys = y.blocks()[k] / y_scale;
      p_.push_back(xs.adjoint() * xs);
      c_.push_back(xs.adjoint() * ys);
      q_.push_back(ys.adjoint() * ys);
    }
    work_.resize(p_.size());
  }

  double operator()(Complex lambda) const {
    double best = 0.0;
    const double l2 = std::norm(lambda);
    for (std::size_t k = 0; k < p_.size(); ++k) {
      Matrix& w = work_[k];
      w = p_[k] + lambda * c_[k] + std::conj(lambda) * c_[k].adjoint() + l2 * q_[k];
      best = std::max(best, hermitian_top_eigenvalue(w));
    }
    return best;
  }

 private:
  std::vector<Matrix> p_, c_, q_;
  mutable std::vector<Matrix> work_;
};

/// Minimizes ||x + t * direction * y|| over t in [0, t_max].
FailureCertificate ray_certificate(const ModuleElement& x, const ModuleElement& y, Complex direction,
                                   std::optional<AlgebraElement> b) {
  const double nx = module_norm(x);
  const double ny = module_norm(y);
  FailureCertificate cert;
  cert.x_norm = nx;
  cert.b = std::move(b);
  cert.lambda = 0.0;
  cert.achieved_norm = nx;
  if (ny == 0.0 || nx == 0.0) return cert;
  const NormSquared f(x, y, nx, ny);
  const auto [t, value] =
      golden_min([&](double s) { return f(s * direction); }, 0.0, 2.0, 1e-12);
  const double achieved = std::sqrt(std::max(0.0, value)) * nx;
  if (achieved < nx) {
    cert.lambda = t * direction * (nx / ny);
    cert.achieved_norm = achieved;
  }
  return cert;
}

struct Prepared {
  double nx = 0.0;
  double ny = 0.0;
  double scale = 0.0;
  double abs_tol = 0.0;
};

Verdict base_verdict(Relation relation, const Tolerances& tol, const Prepared& prep,
                     const char* method) {
  Verdict v;
  v.relation = relation;
  v.tolerances = tol;
  v.scale = prep.scale;
  v.abs_tol = prep.abs_tol;
  v.method = method;
  return v;
}

Prepared prepare(const ModuleElement& x, const ModuleElement& y, const Tolerances& tol) {
  require_same_space(x, y);
  Prepared prep;
  prep.nx = module_norm(x);
  prep.ny = module_norm(y);
  prep.scale = prep.nx * prep.ny;
  prep.abs_tol = tol.zero * prep.scale;
  return prep;
}

/// Holds verdict for the degenerate cases x = 0 or y = 0.
std::optional<Verdict> trivial_case(Relation relation, const ModuleElement& x,
                                    const Tolerances& tol, const Prepared& prep) {
  if (prep.nx != 0.0 && prep.ny != 0.0) return std::nullopt;
  Verdict v = base_verdict(relation, tol, prep, "state-criterion");
  v.answer = Answer::Holds;
  v.margin = std::numeric_limits<double>::infinity();
  if (prep.nx == 0.0) {
    const auto& algebra = x.space().algebra();
    v.witness = PureState(0, Vector::Unit(algebra.dim(0), 0));
  } else {
    const EigenFrame frame = top_eigenframe(inner_product(x, x), tol.eig);
    const int k = frame.attained_blocks().front();
    v.witness = PureState(k, frame.blocks[static_cast<std::size_t>(k)].basis.col(0));
  }
  return v;
}

State to_state(const RangeWitness& w, const std::vector<Compression>& comps, const EigenFrame& frame) {
  std::vector<std::pair<double, PureState>> terms;
  for (const auto& term : w.terms) {
    const int k = comps[static_cast<std::size_t>(term.source)].block;
    const Matrix& basis = frame.blocks[static_cast<std::size_t>(k)].basis;
    terms.emplace_back(term.weight, PureState(k, (basis * term.vector).normalized()));
  }
  if (terms.size() == 1) return terms.front().second;
  return StateMixture(std::move(terms));
}

std::vector<Matrix> matrices(const std::vector<Compression>& comps) {
  std::vector<Matrix> out;
  out.reserve(comps.size());
  for (const auto& c : comps) out.push_back(c.matrix);
  return out;
}

Verdict decide_bj(const ModuleElement& x, const ModuleElement& y, const AlgebraElement& c,
                  const EigenFrame& frame, const Tolerances& tol, const Prepared& prep) {
  Verdict v = base_verdict(Relation::BJ, tol, prep, "state-criterion");
  const auto comps = compress(c, frame);
  const auto mats = matrices(comps);
  const ZeroMembership zm = contains_zero(mats, RangeMode::Hull, prep.abs_tol);
  v.answer = zm.certificate.answer;
  v.margin = zm.certificate.margin;
  if (v.answer == Answer::Holds) {
    v.witness = to_state(*zm.witness, comps, frame);
  } else if (v.answer == Answer::Fails) {
    const Complex direction = std::polar(1.0, -zm.certificate.argmin_theta);
    v.certificate = ray_certificate(x, y, direction, std::nullopt);
  }
  return v;
}

Verdict decide_quasi(const AlgebraElement& c, const EigenFrame& frame, const Tolerances& tol,
                     const Prepared& prep) {
  Verdict v = base_verdict(Relation::QuasiStrong, tol, prep, "state-criterion");
  const auto comps = compress(c, frame);
  const auto mats = matrices(comps);
  const ZeroMembership zm = contains_zero(mats, RangeMode::Single, prep.abs_tol);
  v.answer = zm.certificate.answer;
  v.margin = zm.certificate.margin;
  for (const auto& m : zm.per_matrix) {
    v.block_margins.push_back(m.answer == Answer::Fails ? m.margin : -m.margin);
  }
  if (v.answer == Answer::Holds) v.witness = to_state(*zm.witness, comps, frame);
  return v;
}

Verdict decide_strong(const ModuleElement& x, const ModuleElement& y, const AlgebraElement& c,
                      const EigenFrame& frame, const Tolerances& tol, const Prepared& prep) {
  Verdict v = base_verdict(Relation::Strong, tol, prep, "state-criterion");
  const KernelSearch ks = kernel_vector_in_frame(c, frame, prep.abs_tol);
  v.block_margins = ks.per_block;
  if (ks.witness) {
    v.answer = Answer::Holds;
    v.margin = prep.abs_tol - ks.sigma_min;
    v.witness = *ks.witness;
    return v;
  }
  v.answer = Answer::Fails;
  v.margin = ks.sigma_min - prep.abs_tol;

  // Definitional counterexample: with b = c* P (P the frame projection) every
  // norming state sees <x, y b> = c c* P as strictly positive.
  std::vector<Matrix> proj;
  for (std::size_t k = 0; k < frame.blocks.size(); ++k) {
    const auto& blk = frame.blocks[k];
    const auto n = c.block(static_cast<int>(k)).rows();
    proj.push_back(blk.attained ? Matrix(blk.basis * blk.basis.adjoint()) : Matrix::Zero(n, n));
  }
  AlgebraElement b = c.adjoint() * AlgebraElement(c.algebra(), std::move(proj));
  const double bn = b.operator_norm();
  if (bn > 0.0) {
    b *= 1.0 / bn;
    const ModuleElement yb = right_action(y, b);
    v.certificate = ray_certificate(x, yb, -1.0, b);
  }
  return v;
}

template <typename Decide>
Verdict with_frame_check(const AlgebraElement& p, const Tolerances& tol, Decide&& decide) {
  const EigenFrame frame = top_eigenframe(p, tol.eig, tol.eig_gray);
  Verdict v = decide(frame);
  if (frame.ambiguous) {
    v.frame_ambiguous = true;
    const EigenFrame wide = top_eigenframe(p, tol.eig_gray);
    const Verdict alt = decide(wide);
    if (alt.answer != v.answer) {
      v.answer = Answer::Borderline;
      v.margin = 0.0;
      v.witness.reset();
      v.certificate.reset();
    }
  }
  return v;
}

}  // namespace

Verdict is_bj(const ModuleElement& x, const ModuleElement& y, const Tolerances& tol) {
  const Prepared prep = prepare(x, y, tol);
  if (auto v = trivial_case(Relation::BJ, x, tol, prep)) return *v;
  const AlgebraElement p = inner_product(x, x);
  const AlgebraElement c = inner_product(x, y);
  return with_frame_check(p, tol, [&](const EigenFrame& f) { return decide_bj(x, y, c, f, tol, prep); });
}

Verdict is_quasi_strong(const ModuleElement& x, const ModuleElement& y, const Tolerances& tol) {
  const Prepared prep = prepare(x, y, tol);
  if (auto v = trivial_case(Relation::QuasiStrong, x, tol, prep)) return *v;
  const AlgebraElement p = inner_product(x, x);
  const AlgebraElement c = inner_product(x, y);
  return with_frame_check(p, tol, [&](const EigenFrame& f) { return decide_quasi(c, f, tol, prep); });
}

Verdict is_strong(const ModuleElement& x, const ModuleElement& y, const Tolerances& tol) {
  const Prepared prep = prepare(x, y, tol);
  if (auto v = trivial_case(Relation::Strong, x, tol, prep)) return *v;
  const AlgebraElement p = inner_product(x, x);
  const AlgebraElement c = inner_product(x, y);
  return with_frame_check(p, tol,
                          [&](const EigenFrame& f) { return decide_strong(x, y, c, f, tol, prep); });
}

Verdict check_relation(Relation relation, const ModuleElement& x, const ModuleElement& y,
                       const Tolerances& tol) {
  switch (relation) {
    case Relation::BJ: return is_bj(x, y, tol);
    case Relation::QuasiStrong: return is_quasi_strong(x, y, tol);
    case Relation::Strong: return is_strong(x, y, tol);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown relation");
}

Minimum minimize_norm(const ModuleElement& x, const ModuleElement& y, double accuracy) {
  require_same_space(x, y);
  const double nx = module_norm(x);
  const double ny = module_norm(y);
  if (nx == 0.0 || ny == 0.0) return {0.0, nx};

  // In units of x/||x|| and y/||y|| the minimizer lies in |lambda| <= 2.
  const NormSquared f(x, y, nx, ny);
  auto inner = [&](double re) {
    return golden_min([&](double im) { return f(Complex(re, im)); }, -2.0, 2.0, accuracy);
  };
  const auto [re, value] = golden_min([&](double r) { return inner(r).second; }, -2.0, 2.0, accuracy);
  const double im = inner(re).first;

  Minimum best{Complex(re, im) * (nx / ny), std::sqrt(std::max(0.0, value)) * nx};
  const double at_zero = std::sqrt(std::max(0.0, f(0.0))) * nx;
  if (at_zero <= best.value) best = {0.0, at_zero};
  return best;
}

Verdict is_bj_minimization(const ModuleElement& x, const ModuleElement& y, const Tolerances& tol) {
  const Prepared prep = prepare(x, y, tol);
  Verdict v = base_verdict(Relation::BJ, tol, prep, "minimization");
  const Minimum m = minimize_norm(x, y, 1e-10);
  v.certificate = FailureCertificate{m.lambda, std::nullopt, m.value, prep.nx};
  if (prep.nx == 0.0 || prep.ny == 0.0) {
    v.answer = Answer::Holds;
    v.margin = std::numeric_limits<double>::infinity();
    return v;
  }
  const double decrease = (prep.nx - m.value) / prep.nx;
  if (decrease > tol.minimization) {
    v.answer = Answer::Fails;
    v.margin = prep.nx - m.value;
  } else if (decrease <= tol.minimization / 100.0) {
    v.answer = Answer::Holds;
    v.margin = (tol.minimization - decrease) * prep.nx;
  } else {
    v.answer = Answer::Borderline;
  }
  return v;
}

ProbeResult strong_definitional_probe(const ModuleElement& x, const ModuleElement& y,
                                      int sample_count, Rng& rng, const Tolerances& tol) {
  require_same_space(x, y);
  const BlockAlgebra& algebra = x.space().algebra();
  ProbeResult out;

  auto attempt = [&](const AlgebraElement& a) {
    ++out.samples_tried;
    const ModuleElement ya = right_action(y, a);
    const Verdict v = is_bj_minimization(x, ya, tol);
    if (v.answer != Answer::Fails) return false;
    out.status = ProbeStatus::CounterexampleFound;
    out.certificate = FailureCertificate{v.certificate->lambda, a, v.certificate->achieved_norm,
                                         v.certificate->x_norm};
    return true;
  };

  std::vector<AlgebraElement> structured;
  structured.push_back(inner_product(y, x));
  for (int k = 0; k < algebra.num_blocks(); ++k) {
    for (int p = 0; p < algebra.dim(k); ++p) {
      for (int q = 0; q < algebra.dim(k); ++q) {
        structured.push_back(AlgebraElement::matrix_unit(algebra, k, p, q));
      }
    }
  }
  for (const auto& a : structured) {
    if (out.samples_tried >= sample_count) return out;
    if (attempt(a)) return out;
  }
  while (out.samples_tried < sample_count) {
    std::vector<Matrix> blocks;
    const bool unitary = out.samples_tried % 2 == 0;
    for (int n : algebra.dims()) blocks.push_back(unitary ? haar_unitary(rng, n) : ginibre(rng, n, n));
    if (attempt(AlgebraElement(algebra, std::move(blocks)))) return out;
  }
  return out;
}

Consistency bj_module_algebra_consistency(const ModuleElement& x, const ModuleElement& y,
                                          const Tolerances& tol) {
  require_same_space(x, y);
  Consistency out;
  out.module_side = is_bj(x, y, tol);
  out.algebra_side = is_bj(ModuleElement::from_algebra(inner_product(x, x)),
                           ModuleElement::from_algebra(inner_product(x, y)), tol);
  out.certified = out.module_side.answer != Answer::Borderline &&
                  out.algebra_side.answer != Answer::Borderline;
  out.consistent = !out.certified || out.module_side.answer == out.algebra_side.answer;
  return out;
}

Replay replay_witness(const Verdict& verdict, const ModuleElement& x, const ModuleElement& y) {
  Replay out;
  if (!verdict.witness) return out;
  const AlgebraElement p = inner_product(x, x);
  const AlgebraElement c = inner_product(x, y);
  const double nx = module_norm(x);
  const double nx2 = nx * nx;
  const double scale = nx * module_norm(y);
  const State& rho = *verdict.witness;

  const Complex norming = state_evaluate(rho, p);
  out.norm_residual = nx2 > 0.0 ? std::abs(norming - nx2) / nx2 : std::abs(norming);
  double zero = 0.0;
  if (verdict.relation == Relation::Strong) {
    zero = std::sqrt(std::max(0.0, state_evaluate(rho, c * c.adjoint()).real()));
  } else {
    zero = std::abs(state_evaluate(rho, c));
  }
  out.zero_residual = scale > 0.0 ? zero / scale : zero;
  const double bound = 10.0 * verdict.tolerances.zero;
  out.ok = out.norm_residual <= bound && out.zero_residual <= bound;
  if (verdict.relation == Relation::QuasiStrong || verdict.relation == Relation::Strong) {
    out.ok = out.ok && std::holds_alternative<PureState>(rho);
  }
  return out;
}

double replay_certificate(const FailureCertificate& certificate, const ModuleElement& x,
                          const ModuleElement& y) {
  const ModuleElement direction = certificate.b ? right_action(y, *certificate.b) : y;
  return module_norm(x + certificate.lambda * direction);
}

}  // namespace bjo
