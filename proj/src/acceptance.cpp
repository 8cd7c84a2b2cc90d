#include "bjo/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bjo {

bool AcceptanceReport::all_pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.pass; });
}

bool hull_contains_origin(std::vector<Complex> points) {
  if (points.empty()) return false;
  std::vector<double> angles;
  angles.reserve(points.size());
  for (Complex z : points) {
    if (z == Complex(0.0, 0.0)) return true;
    angles.push_back(std::arg(z));
  }
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  return gap < std::numbers::pi;
}

std::vector<Complex> sample_numerical_range(const Matrix& c, int count, Rng& rng) {
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(count));
  constexpr int kBatch = 4096;
  for (int done = 0; done < count; done += kBatch) {
    const int b = std::min(kBatch, count - done);
    Matrix v = ginibre(rng, static_cast<int>(c.rows()), b);
    v.colwise().normalize();
    const Matrix cv = c * v;
    for (int j = 0; j < b; ++j) out.push_back(v.col(j).dot(cv.col(j)));
  }
  return out;
}

json acceptance_to_json(const AcceptanceReport& report) {
  json criteria = json::array();
  for (const auto& c : report.criteria) {
    criteria.push_back(json{{"id", c.id}, {"key", c.key}, {"title", c.title}, {"pass", c.pass},
                            {"detail", c.detail}, {"data", c.data}});
  }
  return json{{"seed", report.seed}, {"all_pass", report.all_pass()}, {"criteria", std::move(criteria)}};
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream out;
  out << (r.pass ? "PASS" : "FAIL") << "  " << r.id << " [" << r.key << "] " << r.title << ": " << r.detail;
  return out.str();
}

namespace {

int scaled(int n, double scale) { return std::max(1, static_cast<int>(std::lround(n * scale))); }

ModuleSpace square(std::vector<int> dims) { return ModuleSpace(BlockAlgebra(std::move(dims))); }

ModuleSpace rect_m3x2() { return ModuleSpace(BlockAlgebra{2}, std::vector<int>{3}); }

/// Index of a space in a list by label.
const SpaceReport& find_space(const SurveyReport& r, const std::string& label) {
  for (const auto& s : r.spaces) {
    if (s.label == label) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "space " + label + " missing from survey");
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(3);
  out << v;
  return out.str();
}

EnsembleConfig base_config(const AcceptanceOptions& o, std::vector<ModuleSpace> spaces, int samples, int enriched) {
  EnsembleConfig c;
  c.spaces = std::move(spaces);
  c.samples_per_space = scaled(samples, o.sample_scale);
  c.quasi_samples_per_space = scaled(enriched, o.sample_scale);
  c.seed = o.seed;
  c.threads = o.threads;
  return c;
}

// -- shared survey for criteria 1, 2 and 5 ---------------------------------

SurveyReport big_survey(const AcceptanceOptions& o) {
  std::vector<ModuleSpace> spaces{square({1, 1}), square({1, 1, 1}), square({1, 1, 1, 1}), square({1, 1, 1, 1, 1}),
                                  square({2}),    square({3}),       square({4}),          square({1, 2}),
                                  square({2, 2}), rect_m3x2()};
  return run_implication_survey(base_config(o, std::move(spaces), 10000, 1000));
}

CriterionResult criterion_chain(const SurveyReport& s) {
  CriterionResult r{1, "chain", "strong => quasi => bj on random and enriched pairs", false, "", json::object()};
  long violations = 0, errors = 0, pairs = 0;
  double worst = 0.0;
  for (const char* label : {"C+C", "C+C+C", "M2", "M3", "C+M2", "M2+M2", "M3x2/M2"}) {
    const SpaceReport& sp = find_space(s, label);
    violations += sp.chain_violations;
    errors += sp.errors;
    pairs += sp.random_pairs + sp.enriched_pairs;
    worst = std::max(worst, sp.borderline_rate());
    r.data[label] = {{"pairs", sp.random_pairs + sp.enriched_pairs},
                     {"violations", sp.chain_violations},
                     {"borderline", sp.borderline},
                     {"holds_quasi_bj", sp.truth_counts[3] + sp.truth_counts[7]}};
  }
  r.pass = violations == 0 && errors == 0 && worst < 0.01;
  r.detail = std::to_string(pairs) + " pairs, " + std::to_string(violations) + " violations, " +
             std::to_string(errors) + " errors, max borderline rate " + fmt(worst);
  return r;
}

CriterionResult criterion_commutative_forward(const SurveyReport& s) {
  CriterionResult r{2, "commutative-forward", "strong <=> quasi on C^K, K = 2..5", false, "", json::object()};
  long disagree = 0, certified = 0, both_hold = 0, errors = 0;
  for (const char* label : {"C+C", "C+C+C", "C+C+C+C", "C+C+C+C+C"}) {
    const SpaceReport& sp = find_space(s, label);
    disagree += sp.strong_quasi_disagree;
    certified += sp.certified;
    errors += sp.errors;
    both_hold += sp.truth_counts[6] + sp.truth_counts[7];
    r.data[label] = {{"certified", sp.certified}, {"disagree", sp.strong_quasi_disagree},
                     {"strong_and_quasi", sp.truth_counts[6] + sp.truth_counts[7]}};
  }
  r.pass = disagree == 0 && errors == 0 && both_hold > 0;
  r.detail = std::to_string(certified) + " certified, " + std::to_string(disagree) + " disagreements, " +
             std::to_string(both_hold) + " with both holding";
  return r;
}

CriterionResult criterion_single_block(const SurveyReport& s) {
  CriterionResult r{5, "single-block", "bj <=> quasi on M2, M3, M4, M3x2 over M2", false, "", json::object()};
  long disagree = 0, certified = 0, holds = 0, errors = 0;
  for (const char* label : {"M2", "M3", "M4", "M3x2/M2"}) {
    const SpaceReport& sp = find_space(s, label);
    disagree += sp.quasi_bj_disagree;
    certified += sp.certified;
    errors += sp.errors;
    holds += sp.truth_counts[3] + sp.truth_counts[7];
    r.data[label] = {{"certified", sp.certified}, {"disagree", sp.quasi_bj_disagree},
                     {"borderline", sp.borderline}};
  }
  r.pass = disagree == 0 && errors == 0 && holds > 0;
  r.detail = std::to_string(certified) + " certified, " + std::to_string(disagree) + " disagreements, " +
             std::to_string(holds) + " with both holding";
  return r;
}

// -- criterion 3 -----------------------------------------------------------

CriterionResult criterion_commutative_converse(const AcceptanceOptions& o) {
  CriterionResult r{3, "commutative-converse", "quasi-but-not-strong pairs in every noncommutative space",
                    false, "", json::array()};
  int built = 0, failed = 0;
  double worst_quartic = 0.0;
  std::vector<std::string> problems;

  auto check = [&](const SqcCounterexample& c, AProfile profile, const std::string& tag) {
    const Tolerances tol;
    const double nx = module_norm(c.x_prime);
    const AlgebraElement p = inner_product(c.x_prime, c.x_prime);
    const AlgebraElement q = inner_product(c.x_prime, c.y_prime);
    const bool witness_ok = std::abs(state_evaluate(c.witness, p) - nx * nx) <= 1e-9 &&
                            std::abs(state_evaluate(c.witness, q)) <= 1e-9;
    const bool quasi = is_quasi_strong(c.x_prime, c.y_prime, tol).answer == Answer::Holds;
    const bool strong_fails = is_strong(c.x_prime, c.y_prime, tol).answer == Answer::Fails;
    const double replay = replay_certificate(c.failure, c.x_prime, c.y_prime);
    bool ok = witness_ok && quasi && strong_fails && std::abs(nx - 1.0) <= 1e-9 &&
              std::abs(replay - c.failure.achieved_norm) <= 1e-12 && replay < nx - 1e-9;
    if (profile == AProfile::PaperQuartic) {
      ok = ok && replay <= 0.25 + 1e-9;
      worst_quartic = std::max(worst_quartic, replay);
    } else {
      ok = ok && replay <= 1e-9;
    }
    ++built;
    if (!ok) {
      ++failed;
      problems.push_back(tag);
    }
    r.data.push_back({{"pair", tag}, {"case", to_string(c.case_label)}, {"failure_norm", replay}, {"ok", ok}});
  };

  std::vector<ModuleSpace> family = default_family();
  int commutative_rejected = 0, commutative = 0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const ModuleSpace& space = family[i];
    if (space.algebra().is_commutative()) {
      ++commutative;
      Rng rng = make_stream(o.seed, 3000 + i);
      try {
        make_sqc_pair(space, rng);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::CommutativeAlgebra) ++commutative_rejected;
      }
      continue;
    }
    int k = 0;
    while (space.algebra().dim(k) < 2) ++k;
    for (AProfile profile : {AProfile::Projection, AProfile::PaperQuartic}) {
      for (SqcCase shape : {SqcCase::I, SqcCase::II, SqcCase::III}) {
        if (shape != SqcCase::I && space.rows(k) < 2) continue;
        Rng rng = make_stream(o.seed, 3000 + i, static_cast<std::uint64_t>(shape) * 2 + (profile == AProfile::Projection ? 0 : 1));
        const SqcCounterexample c = make_sqc_pair(space, rng, SqcOptions{k, profile, shape});
        const std::string tag = space.to_string() + "/" + to_string(profile) + "/" + to_string(shape);
        check(c, profile, tag);
        if (c.case_label != shape) {
          ++failed;
          problems.push_back(tag + " case label");
        }
      }
      // A generic x supported on the block: the a-profile acts on a nontrivial complement.
      Rng rng = make_stream(o.seed, 3500 + i, profile == AProfile::Projection ? 0 : 1);
      const ModuleElement x =
          ModuleElement::in_block(space, k, ginibre(rng, space.rows(k), space.algebra().dim(k)));
      check(make_sqc_pair_from(x, profile), profile, space.to_string() + "/" + to_string(profile) + "/generic");
    }
  }
  const bool rejected_all = commutative_rejected == commutative;
  r.pass = failed == 0 && built > 0 && rejected_all;
  r.detail = std::to_string(built) + " pairs built, " + std::to_string(failed) + " failed checks, max failure norm (quartic) " +
             fmt(worst_quartic) + ", commutative rejected " + std::to_string(commutative_rejected) + "/" +
             std::to_string(commutative);
  if (!problems.empty()) r.detail += ", first problem " + problems.front();
  return r;
}

// -- criterion 4 -----------------------------------------------------------

CriterionResult criterion_prime(const AcceptanceOptions& o) {
  CriterionResult r{4, "prime", "bj-but-not-quasi pairs from disjoint blocks", false, "", json::array()};
  const auto grid = max_norm_grid(100);
  int built = 0, failed = 0;
  double worst_dev = 0.0;
  std::vector<ModuleSpace> family = default_family();
  bool single_rejected = true;
  for (std::size_t s = 0; s < family.size(); ++s) {
    const ModuleSpace& space = family[s];
    const int K = space.num_blocks();
    if (K < 2) {
      Rng rng = make_stream(o.seed, 4000 + s);
      try {
        make_prime_pair(space, rng);
        single_rejected = false;
      } catch (const Error& e) {
        single_rejected = single_rejected && e.code() == ErrorCode::NotEnoughBlocks;
      }
      continue;
    }
    for (int i = 0; i < K; ++i) {
      for (int j = i + 1; j < K; ++j) {
        Rng rng = make_stream(o.seed, 4000 + s, static_cast<std::uint64_t>(i * K + j));
        const PrimeCounterexample c = make_prime_pair(space, rng, i, j);
        const bool bj = is_bj(c.u_plus, c.u_minus).answer == Answer::Holds;
        const bool bj_min = is_bj_minimization(c.u_plus, c.u_minus).answer == Answer::Holds;
        const bool quasi_fails = is_quasi_strong(c.u_plus, c.u_minus).answer == Answer::Fails;
        const AlgebraElement pp = inner_product(c.u_plus, c.u_plus);
        const AlgebraElement pm = inner_product(c.u_plus, c.u_minus);
        const bool witness_ok = std::abs(state_evaluate(c.bj_witness, pp) - 1.0) <= 1e-9 &&
                                std::abs(state_evaluate(c.bj_witness, pm)) <= 1e-9;
        const bool obstruction_ok = std::abs(c.quasi_obstruction[0] - 1.0) <= 1e-9 &&
                                    std::abs(c.quasi_obstruction[1] + 1.0) <= 1e-9;
        const MaxNormCheck m = verify_max_norm_formula(c.u, c.v, grid);
        worst_dev = std::max(worst_dev, m.max_deviation);
        const bool ok = bj && bj_min && quasi_fails && witness_ok && obstruction_ok && m.ok;
        ++built;
        if (!ok) ++failed;
        r.data.push_back({{"space", space.to_string()}, {"blocks", {i, j}}, {"max_norm_deviation", m.max_deviation},
                          {"ok", ok}});
      }
    }
  }
  r.pass = failed == 0 && built > 0 && single_rejected && worst_dev <= 1e-9;
  r.detail = std::to_string(built) + " pairs, " + std::to_string(failed) + " failed checks, max-norm deviation " +
             fmt(worst_dev) + " over " + std::to_string(grid.size()) + " (alpha, beta)" +
             (single_rejected ? ", single blocks rejected" : ", single block NOT rejected");
  return r;
}

// -- criterion 6 -----------------------------------------------------------

CriterionResult criterion_only_c(const AcceptanceOptions& o) {
  CriterionResult r{6, "only-C", "strong <=> bj flagged for C alone", false, "", json::object()};
  std::vector<ModuleSpace> spaces{square({1}), square({1, 1}), square({2}), square({1, 2}), square({3})};
  const SurveyReport s = run_equivalence_survey(base_config(o, std::move(spaces), 1000, 100));
  bool ok = true;
  std::vector<std::string> flagged;
  for (const auto& sp : s.spaces) {
    const bool expected = sp.label == "C";
    if (sp.flags.strong_bj) flagged.push_back(sp.label);
    ok = ok && sp.flags.strong_bj == expected && sp.errors == 0;
    r.data[sp.label] = {{"strong_quasi", sp.flags.strong_quasi},
                        {"quasi_bj", sp.flags.quasi_bj},
                        {"strong_bj", sp.flags.strong_bj},
                        {"pattern_matches", sp.pattern_matches}};
  }
  r.pass = ok;
  std::string list;
  for (const auto& f : flagged) list += (list.empty() ? "" : ",") + f;
  r.detail = "strong ~ bj flagged for {" + list + "}";
  return r;
}

// -- criterion 7 -----------------------------------------------------------

CriterionResult criterion_module_algebra(const AcceptanceOptions& o) {
  CriterionResult r{7, "module-algebra", "x _|_ y iff <x,x> _|_ <x,y>", false, "", json::object()};
  const std::vector<ElementKind> kinds{ElementKind::Ginibre, ElementKind::Positive, ElementKind::UnitaryColumn};
  const int n = scaled(2000, o.sample_scale);
  const int enriched = scaled(200, o.sample_scale);
  long total = 0, certified = 0, inconsistent = 0, holds = 0;
  const auto family = default_family();
  for (std::size_t i = 0; i < family.size(); ++i) {
    const ModuleSpace& space = family[i];
    long sc = 0, si = 0;
    for (int s = 0; s < n + enriched; ++s) {
      Rng rng = make_stream(o.seed ^ 0x7007, i, static_cast<std::uint64_t>(s));
      ModuleElement x = sample_element(rng, space, kinds[static_cast<std::size_t>(s) % kinds.size()]);
      ModuleElement y = sample_element(rng, space, ElementKind::Ginibre);
      if (s >= n) y = make_quasi_pair_from(x, y).y;
      const Consistency c = bj_module_algebra_consistency(x, y);
      ++total;
      if (c.certified) {
        ++sc;
        if (c.module_side.answer == Answer::Holds) ++holds;
      }
      if (!c.consistent) ++si;
    }
    certified += sc;
    inconsistent += si;
    r.data[space.to_string()] = {{"pairs", n + enriched}, {"certified", sc}, {"inconsistent", si}};
  }
  r.pass = inconsistent == 0 && certified >= static_cast<long>(0.99 * static_cast<double>(total)) && holds > 0;
  r.detail = std::to_string(total) + " pairs, " + std::to_string(certified) + " certified, " +
             std::to_string(inconsistent) + " inconsistent, " + std::to_string(holds) + " holding";
  return r;
}

// -- criterion 8 -----------------------------------------------------------

CriterionResult criterion_numerical_range(const AcceptanceOptions& o) {
  CriterionResult r{8, "numerical-range", "certified membership of 0 against sampling and spectra", false, "",
                    json::object()};
  Rng rng = make_stream(o.seed, 8000);
  const int n_random = scaled(500, o.sample_scale);
  const int n_normal = scaled(100, o.sample_scale);
  const int probes = 100000;
  long holds = 0, fails = 0, borderline = 0, contradicted = 0;
  for (int t = 0; t < n_random; ++t) {
    const int n = 2 + t % 5;
    Matrix c = ginibre(rng, n, n);
    c /= spectral_norm(c);
    const double shift = std::uniform_real_distribution<double>(0.0, 1.2)(rng);
    const double phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
    c += std::polar(shift, phase) * Matrix::Identity(n, n);
    const double tol = 1e-9 * spectral_norm(c);
    const Matrix mats[] = {c};
    const ZeroMembership zm = contains_zero(mats, RangeMode::Single, tol);
    const std::vector<Complex> points = sample_numerical_range(c, probes, rng);
    if (zm.certificate.answer == Answer::Holds) {
      ++holds;
      const RangeTerm& term = zm.witness->terms.front();
      const bool ok = std::abs(term.vector.norm() - 1.0) <= 1e-9 && std::abs(rayleigh_value(c, term.vector)) <= 10 * tol;
      if (!ok) ++contradicted;
    } else if (zm.certificate.answer == Answer::Fails) {
      ++fails;
      const Complex rot = std::polar(1.0, -zm.certificate.argmin_theta);
      double reach = -1e300;
      for (Complex z : points) reach = std::max(reach, (rot * z).real());
      const bool ok = !hull_contains_origin(points) && reach <= zm.certificate.min_upper + 1e-9;
      if (!ok) ++contradicted;
    } else {
      ++borderline;
    }
  }
  long normal_match = 0, normal_total = 0;
  for (int t = 0; t < n_normal; ++t) {
    const int n = 2 + t % 5;
    const Matrix u = haar_unitary(rng, n);
    Vector spectrum = ginibre(rng, n, 1).col(0);
    const double shift = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    const double phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
    spectrum.array() += std::polar(shift, phase);
    const Matrix c = u * spectrum.asDiagonal() * u.adjoint();
    const Matrix mats[] = {c};
    const Answer a = contains_zero(mats, RangeMode::Single, 1e-9 * spectral_norm(c)).certificate.answer;
    const bool exact = hull_contains_origin(std::vector<Complex>(spectrum.data(), spectrum.data() + n));
    ++normal_total;
    if (a != Answer::Borderline && (a == Answer::Holds) == exact) ++normal_match;
  }
  r.data = {{"random", {{"holds", holds}, {"fails", fails}, {"borderline", borderline}, {"contradicted", contradicted}}},
            {"normal", {{"total", normal_total}, {"matched", normal_match}}},
            {"probes_per_matrix", probes}};
  r.pass = contradicted == 0 && borderline * 100 < n_random && normal_match == normal_total && holds > 0 && fails > 0;
  r.detail = std::to_string(n_random) + " random (" + std::to_string(holds) + " holds, " + std::to_string(fails) +
             " fails, " + std::to_string(borderline) + " borderline, " + std::to_string(contradicted) +
             " contradicted), normal " + std::to_string(normal_match) + "/" + std::to_string(normal_total);
  return r;
}

// -- criterion 9 -----------------------------------------------------------

CriterionResult criterion_methods(const AcceptanceOptions& o) {
  CriterionResult r{9, "methods", "state criterion vs norm minimization", false, "", json::object()};
  EnsembleConfig c = base_config(o, default_family(), 2000, 200);
  c.seed = o.seed ^ 0x9009;
  c.minimization_check = true;
  const SurveyReport s = run_implication_survey(c);
  long compared = 0, disagree = 0, total = 0, errors = 0;
  double gap = 0.0;
  for (const auto& sp : s.spaces) {
    compared += sp.method_compared;
    disagree += sp.method_disagree;
    total += sp.random_pairs + sp.enriched_pairs;
    errors += sp.errors;
    gap = std::max(gap, sp.max_holds_gap);
    r.data[sp.label] = {{"compared", sp.method_compared}, {"disagree", sp.method_disagree},
                        {"max_holds_gap", sp.max_holds_gap}};
  }
  r.pass = disagree == 0 && errors == 0 && gap <= 1e-7 && compared >= static_cast<long>(0.99 * static_cast<double>(total));
  r.detail = std::to_string(compared) + "/" + std::to_string(total) + " compared, " + std::to_string(disagree) +
             " disagreements, max gap when both hold " + fmt(gap);
  return r;
}

std::vector<CriterionResult> run_criteria(const AcceptanceOptions& o) {
  std::vector<CriterionResult> out;
  auto emit = [&](CriterionResult r) {
    if (o.on_result) o.on_result(r);
    out.push_back(std::move(r));
  };
  const SurveyReport big = big_survey(o);
  emit(criterion_chain(big));
  emit(criterion_commutative_forward(big));
  emit(criterion_commutative_converse(o));
  emit(criterion_prime(o));
  emit(criterion_single_block(big));
  emit(criterion_only_c(o));
  emit(criterion_module_algebra(o));
  emit(criterion_numerical_range(o));
  emit(criterion_methods(o));
  return out;
}

}  // namespace

AcceptanceReport run_acceptance(const AcceptanceOptions& options) {
  AcceptanceReport report;
  report.seed = options.seed;
  report.criteria = run_criteria(options);
  if (options.check_determinism) {
    AcceptanceOptions again = options;
    again.on_result = nullptr;
    again.check_determinism = false;
    AcceptanceReport second;
    second.seed = options.seed;
    second.criteria = run_criteria(again);
    const std::string a = acceptance_to_json(report).dump();
    const std::string b = acceptance_to_json(second).dump();
    CriterionResult r{10, "determinism", "two runs with one seed give identical reports", a == b, "",
                      json{{"bytes", a.size()}}};
    r.detail = std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "DIFFERENT");
    if (options.on_result) options.on_result(r);
    report.criteria.push_back(std::move(r));
  }
  return report;
}

}  // namespace bjo
