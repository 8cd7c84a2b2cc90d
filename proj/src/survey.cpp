#include "bjo/survey.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

namespace bjo {

const char* to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::Ginibre: return "ginibre";
    case ElementKind::Positive: return "positive";
    case ElementKind::UnitaryColumn: return "unitary-column";
    case ElementKind::QuasiEnriched: return "quasi-enriched";
  }
  return "?";
}

ElementKind parse_element_kind(const std::string& text) {
  for (auto k : {ElementKind::Ginibre, ElementKind::Positive, ElementKind::UnitaryColumn,
                 ElementKind::QuasiEnriched}) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorCode::Config, "unknown element kind '" + text + "'");
}

void validate(const EnsembleConfig& config) {
  if (config.spaces.empty()) throw Error(ErrorCode::Config, "no spaces configured");
  if (config.element_kinds.empty()) throw Error(ErrorCode::Config, "element_kinds is empty");
  if (config.samples_per_space < 1) throw Error(ErrorCode::Config, "samples_per_space must be >= 1");
  if (config.quasi_samples_per_space < 0) {
    throw Error(ErrorCode::Config, "quasi_samples_per_space must be >= 0");
  }
  if (config.threads < 0) throw Error(ErrorCode::Config, "threads must be >= 0");
}

json config_to_json(const EnsembleConfig& config) {
  json spaces = json::array();
  for (const auto& s : config.spaces) {
    spaces.push_back(json{{"blocks", s.algebra().dims()}, {"rows", s.rows()}});
  }
  json kinds = json::array();
  for (auto k : config.element_kinds) kinds.push_back(to_string(k));
  return json{{"spaces", std::move(spaces)},
              {"samples_per_space", config.samples_per_space},
              {"quasi_samples_per_space", config.quasi_samples_per_space},
              {"seed", config.seed},
              {"element_kinds", std::move(kinds)},
              {"tolerances", tolerances_to_json(config.tolerances)},
              {"minimization_check", config.minimization_check}};
}

EnsembleConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::Parse, "config: expected an object");
  EnsembleConfig config;
  try {
    if (doc.contains("spaces")) {
      config.spaces.clear();
      for (const auto& s : doc.at("spaces")) {
        BlockAlgebra algebra(s.at("blocks").get<std::vector<int>>());
        std::vector<int> rows = s.contains("rows") ? s.at("rows").get<std::vector<int>>() : algebra.dims();
        config.spaces.emplace_back(std::move(algebra), std::move(rows));
      }
    } else {
      config.spaces = default_family();
    }
    if (doc.contains("samples_per_space")) config.samples_per_space = doc.at("samples_per_space").get<int>();
    if (doc.contains("quasi_samples_per_space")) {
      config.quasi_samples_per_space = doc.at("quasi_samples_per_space").get<int>();
    }
    if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("element_kinds")) {
      config.element_kinds.clear();
      for (const auto& k : doc.at("element_kinds")) config.element_kinds.push_back(parse_element_kind(k.get<std::string>()));
    }
    if (doc.contains("tolerances")) config.tolerances = tolerances_from_json(doc.at("tolerances"));
    if (doc.contains("minimization_check")) config.minimization_check = doc.at("minimization_check").get<bool>();
    if (doc.contains("threads")) config.threads = doc.at("threads").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("config: ") + e.what());
  }
  validate(config);
  return config;
}

ModuleElement sample_element(Rng& rng, const ModuleSpace& space, ElementKind kind) {
  std::vector<Matrix> blocks;
  for (int k = 0; k < space.num_blocks(); ++k) {
    const int m = space.rows(k);
    const int n = space.algebra().dim(k);
    switch (kind) {
      case ElementKind::Ginibre:
        blocks.push_back(ginibre(rng, m, n));
        break;
      case ElementKind::Positive: {
        const Matrix g = ginibre(rng, n, n);
        Matrix h = g.adjoint() * g;
        h /= spectral_norm(h);
        // Rectangular blocks: a positive n x n factor behind an isometry.
        blocks.push_back(m == n ? h : Matrix(random_isometry(rng, m, n) * h));
        break;
      }
      case ElementKind::UnitaryColumn:
        blocks.push_back(random_isometry(rng, m, n));
        break;
      case ElementKind::QuasiEnriched:
        throw Error(ErrorCode::InvalidArgument, "quasi-enriched is a pair kind, not an element kind");
    }
  }
  return ModuleElement(space, std::move(blocks));
}

int truth_index(bool strong, bool quasi, bool bj) { return (strong ? 4 : 0) + (quasi ? 2 : 0) + (bj ? 1 : 0); }

EquivalenceFlags predicted_flags(const ModuleSpace& space) {
  const BlockAlgebra& a = space.algebra();
  const bool is_c = a.num_blocks() == 1 && a.dim(0) == 1;
  return {a.is_commutative(), a.num_blocks() == 1, is_c};
}

double SpaceReport::borderline_rate() const {
  const long total = random_pairs + enriched_pairs;
  return total == 0 ? 0.0 : static_cast<double>(borderline) / static_cast<double>(total);
}

long SurveyReport::total_violations() const {
  long n = 0;
  for (const auto& s : spaces) n += s.chain_violations;
  return n;
}

long SurveyReport::pattern_mismatches() const {
  long n = 0;
  for (const auto& s : spaces) n += (s.equivalence && !s.pattern_matches) ? 1 : 0;
  return n;
}

double SurveyReport::max_borderline_rate() const {
  double r = 0.0;
  for (const auto& s : spaces) r = std::max(r, s.borderline_rate());
  return r;
}

std::vector<ModuleSpace> default_family() {
  std::vector<ModuleSpace> out;
  for (std::vector<int> dims : {std::vector<int>{1}, {1, 1}, {1, 1, 1}, {2}, {3}, {1, 2}, {2, 2}}) {
    out.emplace_back(BlockAlgebra(dims));
  }
  out.emplace_back(BlockAlgebra{2}, std::vector<int>{3});
  return out;
}

namespace {

constexpr std::uint64_t kEnrichedOffset = std::uint64_t{1} << 40;
constexpr std::uint64_t kGeneratorStream = std::uint64_t{2} << 40;
constexpr std::size_t kMaxViolationExhibits = 5;

struct Pair {
  ModuleElement x;
  ModuleElement y;
};

std::vector<ElementKind> x_kinds(const EnsembleConfig& config) {
  std::vector<ElementKind> out;
  for (auto k : config.element_kinds) {
    if (k != ElementKind::QuasiEnriched) out.push_back(k);
  }
  if (out.empty()) out.push_back(ElementKind::Ginibre);
  return out;
}

/// Sample `index` of space `i`; indices >= kEnrichedOffset are quasi-enriched.
Pair make_pair(const EnsembleConfig& config, const std::vector<ElementKind>& kinds, std::size_t i,
               std::uint64_t index) {
  const ModuleSpace& space = config.spaces[i];
  Rng rng = make_stream(config.seed, i, index);
  const bool enriched = index >= kEnrichedOffset;
  const std::uint64_t s = enriched ? index - kEnrichedOffset : index;
  ModuleElement x = sample_element(rng, space, kinds[s % kinds.size()]);
  ModuleElement y = sample_element(rng, space, ElementKind::Ginibre);
  if (!enriched) return {std::move(x), std::move(y)};
  QuasiPair q = make_quasi_pair_from(x, y);
  return {std::move(q.x), std::move(q.y)};
}

struct Outcome {
  Answer strong = Answer::Borderline;
  Answer quasi = Answer::Borderline;
  Answer bj = Answer::Borderline;
  std::optional<Answer> minimization;
  double holds_gap = 0.0;
  std::string error;
};

Outcome evaluate(const Pair& p, const EnsembleConfig& config) {
  Outcome o;
  try {
    o.bj = is_bj(p.x, p.y, config.tolerances).answer;
    o.quasi = is_quasi_strong(p.x, p.y, config.tolerances).answer;
    o.strong = is_strong(p.x, p.y, config.tolerances).answer;
    if (config.minimization_check) {
      const Verdict m = is_bj_minimization(p.x, p.y, config.tolerances);
      o.minimization = m.answer;
      if (m.answer == Answer::Holds && o.bj == Answer::Holds) {
        o.holds_gap = std::abs(m.certificate->achieved_norm - m.certificate->x_norm);
      }
    }
  } catch (const Error& e) {
    o.error = std::string(to_string(e.code())) + ": " + e.what();
  }
  return o;
}

template <typename F>
void parallel_for(std::size_t count, int threads, F&& body) {
  unsigned t = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  t = static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(count, 1)));
  if (t <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += t) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

bool certified(Answer a) { return a != Answer::Borderline; }

Exhibit sampled_exhibit(const EnsembleConfig& config, const std::vector<ElementKind>& kinds, std::size_t i,
                        std::uint64_t index, std::string note) {
  Pair p = make_pair(config, kinds, i, index);
  Exhibit e;
  e.source = "sampled";
  e.note = std::move(note);
  e.sample = static_cast<std::int64_t>(index);
  e.pair = problem_to_json(ProblemFile{config.spaces[i], std::move(p.x), std::move(p.y)});
  return e;
}

SpaceReport survey_space(const EnsembleConfig& config, std::size_t i, bool enrich) {
  const ModuleSpace& space = config.spaces[i];
  const auto kinds = x_kinds(config);
  SpaceReport r{.label = space.to_string(), .space = space};

  std::vector<std::uint64_t> indices;
  for (int s = 0; s < config.samples_per_space; ++s) indices.push_back(static_cast<std::uint64_t>(s));
  if (enrich) {
    for (int s = 0; s < config.quasi_samples_per_space; ++s) {
      indices.push_back(kEnrichedOffset + static_cast<std::uint64_t>(s));
    }
  }

  std::vector<Outcome> outcomes(indices.size());
  parallel_for(indices.size(), config.threads, [&](std::size_t n) {
    try {
      outcomes[n] = evaluate(make_pair(config, kinds, i, indices[n]), config);
    } catch (const Error& e) {
      outcomes[n].error = std::string(to_string(e.code())) + ": " + e.what();
    }
  });

  std::optional<std::uint64_t> first_sq, first_qb, first_sb;
  for (std::size_t n = 0; n < indices.size(); ++n) {
    const Outcome& o = outcomes[n];
    const std::uint64_t idx = indices[n];
    (idx >= kEnrichedOffset ? r.enriched_pairs : r.random_pairs) += 1;
    if (!o.error.empty()) {
      ++r.errors;
      if (r.first_error.empty()) r.first_error = o.error;
      continue;
    }
    const bool s = o.strong == Answer::Holds, q = o.quasi == Answer::Holds, b = o.bj == Answer::Holds;
    const bool cs = certified(o.strong), cq = certified(o.quasi), cb = certified(o.bj);
    if (cs && cq && cb) {
      ++r.certified;
      ++r.truth_counts[static_cast<std::size_t>(truth_index(s, q, b))];
    } else {
      ++r.borderline;
    }
    const bool violation = (cs && cq && s && !q) || (cq && cb && q && !b) || (cs && cb && s && !b);
    if (violation) {
      ++r.chain_violations;
      if (r.violation_exhibits.size() < kMaxViolationExhibits) {
        r.violation_exhibits.push_back(sampled_exhibit(config, kinds, i, idx, "chain violation"));
      }
    }
    if (cs && cq && s != q) {
      ++r.strong_quasi_disagree;
      if (!first_sq) first_sq = idx;
    }
    if (cq && cb && q != b) {
      ++r.quasi_bj_disagree;
      if (!first_qb) first_qb = idx;
    }
    if (cs && cb && s != b) {
      ++r.strong_bj_disagree;
      if (!first_sb) first_sb = idx;
    }
    if (o.minimization && cb && certified(*o.minimization)) {
      ++r.method_compared;
      if (*o.minimization != o.bj) ++r.method_disagree;
      r.max_holds_gap = std::max(r.max_holds_gap, o.holds_gap);
    }
  }
  if (first_sq) r.exhibits.push_back(sampled_exhibit(config, kinds, i, *first_sq, "strong vs quasi"));
  if (first_qb) r.exhibits.push_back(sampled_exhibit(config, kinds, i, *first_qb, "quasi vs bj"));
  if (first_sb) r.exhibits.push_back(sampled_exhibit(config, kinds, i, *first_sb, "strong vs bj"));
  return r;
}

void add_generator_exhibits(const EnsembleConfig& config, std::size_t i, SpaceReport& r) {
  const ModuleSpace& space = config.spaces[i];
  const Tolerances& tol = config.tolerances;

  Rng rng = make_stream(config.seed, i, kGeneratorStream);
  try {
    const SqcCounterexample c = make_sqc_pair(space, rng);
    const bool quasi = is_quasi_strong(c.x_prime, c.y_prime, tol).answer == Answer::Holds;
    const bool strong_fails = is_strong(c.x_prime, c.y_prime, tol).answer == Answer::Fails;
    const bool bj = is_bj(c.x_prime, c.y_prime, tol).answer == Answer::Holds;
    if (quasi && strong_fails && bj) {
      r.sqc_outcome = "ok";
      r.flags.strong_quasi = false;
      r.flags.strong_bj = false;
      r.exhibits.push_back(Exhibit{"sqc", "quasi holds, strong fails", -1, sqc_to_json(c)});
    } else {
      r.sqc_outcome = "uncertified";
    }
  } catch (const Error& e) {
    r.sqc_outcome = std::string("error: ") + to_string(e.code());
  }

  Rng rng2 = make_stream(config.seed, i, kGeneratorStream + 1);
  try {
    const PrimeCounterexample c = make_prime_pair(space, rng2);
    const bool bj = is_bj(c.u_plus, c.u_minus, tol).answer == Answer::Holds;
    const bool quasi_fails = is_quasi_strong(c.u_plus, c.u_minus, tol).answer == Answer::Fails;
    const bool strong_fails = is_strong(c.u_plus, c.u_minus, tol).answer == Answer::Fails;
    if (bj && quasi_fails && strong_fails) {
      r.prime_outcome = "ok";
      r.flags.quasi_bj = false;
      r.flags.strong_bj = false;
      r.exhibits.push_back(Exhibit{"prime", "bj holds, quasi fails", -1, prime_to_json(c)});
    } else {
      r.prime_outcome = "uncertified";
    }
  } catch (const Error& e) {
    r.prime_outcome = std::string("error: ") + to_string(e.code());
  }
}

json exhibit_to_json(const Exhibit& e) {
  return json{{"source", e.source}, {"note", e.note}, {"sample", e.sample}, {"pair", e.pair}};
}

json flags_to_json(const EquivalenceFlags& f) {
  return json{{"strong_quasi", f.strong_quasi}, {"quasi_bj", f.quasi_bj}, {"strong_bj", f.strong_bj}};
}

const char* kTruthLabels[8] = {"s0q0b0", "s0q0b1", "s0q1b0", "s0q1b1", "s1q0b0", "s1q0b1", "s1q1b0", "s1q1b1"};

}  // namespace

SurveyReport run_implication_survey(const EnsembleConfig& config) {
  validate(config);
  const bool enrich = std::find(config.element_kinds.begin(), config.element_kinds.end(),
                                ElementKind::QuasiEnriched) != config.element_kinds.end();
  SurveyReport report{"implication", config, {}};
  for (std::size_t i = 0; i < config.spaces.size(); ++i) report.spaces.push_back(survey_space(config, i, enrich));
  return report;
}

SurveyReport run_equivalence_survey(const EnsembleConfig& config) {
  validate(config);
  SurveyReport report{"equivalence", config, {}};
  for (std::size_t i = 0; i < config.spaces.size(); ++i) {
    SpaceReport r = survey_space(config, i, true);
    r.equivalence = true;
    r.flags.strong_quasi = r.strong_quasi_disagree == 0;
    r.flags.quasi_bj = r.quasi_bj_disagree == 0;
    r.flags.strong_bj = r.strong_bj_disagree == 0;
    add_generator_exhibits(config, i, r);
    r.predicted = predicted_flags(r.space);
    r.pattern_matches = r.flags == r.predicted;
    report.spaces.push_back(std::move(r));
  }
  return report;
}

json report_to_json(const SurveyReport& report) {
  json spaces = json::array();
  for (const auto& s : report.spaces) {
    json counts = json::object();
    for (std::size_t t = 0; t < 8; ++t) counts[kTruthLabels[t]] = s.truth_counts[t];
    json j{{"space", s.label},
           {"random_pairs", s.random_pairs},
           {"enriched_pairs", s.enriched_pairs},
           {"certified", s.certified},
           {"borderline", s.borderline},
           {"borderline_rate", s.borderline_rate()},
           {"errors", s.errors},
           {"first_error", s.first_error},
           {"truth_counts", std::move(counts)},
           {"chain_violations", s.chain_violations},
           {"disagreements",
            {{"strong_quasi", s.strong_quasi_disagree},
             {"quasi_bj", s.quasi_bj_disagree},
             {"strong_bj", s.strong_bj_disagree}}}};
    json vex = json::array();
    for (const auto& e : s.violation_exhibits) vex.push_back(exhibit_to_json(e));
    j["violation_exhibits"] = std::move(vex);
    if (report.config.minimization_check) {
      j["minimization"] = {{"compared", s.method_compared},
                           {"disagree", s.method_disagree},
                           {"max_holds_gap", s.max_holds_gap}};
    }
    if (s.equivalence) {
      j["flags"] = flags_to_json(s.flags);
      j["predicted"] = flags_to_json(s.predicted);
      j["pattern_matches"] = s.pattern_matches;
      j["generators"] = {{"sqc", s.sqc_outcome}, {"prime", s.prime_outcome}};
      json ex = json::array();
      for (const auto& e : s.exhibits) ex.push_back(exhibit_to_json(e));
      j["exhibits"] = std::move(ex);
    }
    spaces.push_back(std::move(j));
  }
  return json{{"kind", report.kind},
              {"config", config_to_json(report.config)},
              {"total_violations", report.total_violations()},
              {"pattern_mismatches", report.pattern_mismatches()},
              {"max_borderline_rate", report.max_borderline_rate()},
              {"spaces", std::move(spaces)}};
}

std::string report_to_csv(const SurveyReport& report) {
  std::ostringstream out;
  out << "kind,seed,space,random_pairs,enriched_pairs,certified,borderline,errors,chain_violations";
  for (const char* label : kTruthLabels) out << ',' << label;
  out << ",strong_quasi,quasi_bj,strong_bj,pattern_matches\r\n";
  for (const auto& s : report.spaces) {
    out << csv_field(report.kind) << ',' << report.config.seed << ',' << csv_field(s.label) << ','
        << s.random_pairs << ',' << s.enriched_pairs << ',' << s.certified << ',' << s.borderline << ','
        << s.errors << ',' << s.chain_violations;
    for (long c : s.truth_counts) out << ',' << c;
    if (s.equivalence) {
      out << ',' << s.flags.strong_quasi << ',' << s.flags.quasi_bj << ',' << s.flags.strong_bj << ','
          << s.pattern_matches;
    } else {
      out << ",,,,";
    }
    out << "\r\n";
  }
  return out.str();
}

}  // namespace bjo
