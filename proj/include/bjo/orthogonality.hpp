// orthogonality.hpp
// Certified Birkhoff-James, quasi-strong and strong orthogonality on Hilbert
// modules over finite-dimensional C*-algebras.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bjo/module.hpp"
#include "bjo/numerical_range.hpp"
#include "bjo/random.hpp"

namespace bjo {

enum class Relation { BJ, QuasiStrong, Strong };
const char* to_string(Relation relation);

/// ||x + lambda * (y b)|| = achieved_norm < ||x||, where b is the unit when
/// absent.
struct FailureCertificate {
  Complex lambda;
  std::optional<AlgebraElement> b;
  double achieved_norm = 0.0;
  double x_norm = 0.0;
};

struct Verdict {
  Relation relation = Relation::BJ;
  Answer answer = Answer::Borderline;
  double margin = 0.0;
  std::optional<State> witness;
  std::optional<FailureCertificate> certificate;
  /// Quasi: support margin per attained block. Strong: sigma_min per attained block.
  std::vector<double> block_margins;
  Tolerances tolerances;
  double scale = 0.0;    // ||x|| * ||y||
  double abs_tol = 0.0;  // tolerances.zero * scale
  bool frame_ambiguous = false;
  std::string method;    // "state-criterion" or "minimization"
};

Verdict is_bj(const ModuleElement& x, const ModuleElement& y, const Tolerances& tol = {});
Verdict is_quasi_strong(const ModuleElement& x, const ModuleElement& y, const Tolerances& tol = {});
Verdict is_strong(const ModuleElement& x, const ModuleElement& y, const Tolerances& tol = {});
Verdict check_relation(Relation relation, const ModuleElement& x, const ModuleElement& y,
                       const Tolerances& tol = {});

struct Minimum {
  Complex lambda;
  double value = 0.0;  // ||x + lambda y||
};

/// Minimizes lambda -> ||x + lambda y|| over |lambda| <= 2||x||/||y||.
Minimum minimize_norm(const ModuleElement& x, const ModuleElement& y, double accuracy = 1e-10);

/// Definitional route: Holds iff the minimum is at least ||x||. The relative
/// decrease must exceed tol.minimization to certify Fails and stay below
/// tol.minimization / 100 to certify Holds. The certificate always records
/// the minimizer found, whatever the answer.
Verdict is_bj_minimization(const ModuleElement& x, const ModuleElement& y, const Tolerances& tol = {});

enum class ProbeStatus { CounterexampleFound, NoCounterexampleFound };

struct ProbeResult {
  ProbeStatus status = ProbeStatus::NoCounterexampleFound;
  std::optional<FailureCertificate> certificate;  // b is the sampled algebra element
  int samples_tried = 0;
};

/// Samples algebra elements a (matrix units, <y,x>, Ginibre, Haar unitaries)
/// and looks for x not BJ-orthogonal to y a. One-sided: a hit refutes strong
/// orthogonality, exhausting the samples proves nothing.
ProbeResult strong_definitional_probe(const ModuleElement& x, const ModuleElement& y,
                                      int sample_count, Rng& rng, const Tolerances& tol = {});

struct Consistency {
  bool consistent = true;  // false only on a certified disagreement
  bool certified = true;   // both verdicts certified
  Verdict module_side;
  Verdict algebra_side;
};

/// Compares x _|_BJ y with <x,x> _|_BJ <x,y> in the algebra as a module over itself.
Consistency bj_module_algebra_consistency(const ModuleElement& x, const ModuleElement& y,
                                          const Tolerances& tol = {});

struct Replay {
  double norm_residual = 0.0;  // |rho(<x,x>) - ||x||^2|| / ||x||^2
  double zero_residual = 0.0;  // |rho(<x,y>)| (BJ, quasi) or rho(<x,y><x,y>*)^{1/2} (strong), / scale
  bool ok = false;             // both within 10 * tol.zero
};

/// Re-evaluates a Holds witness against its defining equalities.
Replay replay_witness(const Verdict& verdict, const ModuleElement& x, const ModuleElement& y);

/// ||x + lambda y b||, the value a failure certificate claims.
double replay_certificate(const FailureCertificate& certificate, const ModuleElement& x,
                          const ModuleElement& y);

}  // namespace bjo
