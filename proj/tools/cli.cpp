#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bjo/acceptance.hpp"
#include "bjo/io.hpp"
#include "bjo/survey.hpp"

namespace bjo::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BJO_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, std::string("BJO_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  return kDefaultSeed;
}

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Parse:
    case ErrorCode::Config:
    case ErrorCode::EmptyInput:
    case ErrorCode::InvalidArgument:
      return kParse;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::SpaceMismatch:
    case ErrorCode::AlgebraMismatch:
      return kDimension;
    case ErrorCode::NotSelfAdjoint:
    case ErrorCode::NotPositive:
      return kTolerance;
    case ErrorCode::CommutativeAlgebra:
    case ErrorCode::NotEnoughBlocks:
    case ErrorCode::NotDisjoint:
    case ErrorCode::DegenerateSample:
      return kPrecondition;
  }
  return kParse;
}

std::string read_input(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot read '" + path + "'");
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Parse, "cannot write '" + path + "'");
  out << text;
}

std::vector<int> parse_dims_allow_zero(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, "bad index list '" + text + "'");
    }
  }
  return out;
}

Relation parse_relation(const std::string& text) {
  if (text == "bj") return Relation::BJ;
  if (text == "quasi") return Relation::QuasiStrong;
  if (text == "strong") return Relation::Strong;
  throw Error(ErrorCode::Parse, "unknown relation '" + text + "'");
}

struct BadTolerance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check_tolerance(double value, const char* name) {
  if (!std::isfinite(value) || !(value > 0.0)) {
    std::ostringstream msg;
    msg << name << " must be a positive finite number, got " << value;
    throw BadTolerance(msg.str());
  }
}

std::string format_complex(Complex z) {
  std::ostringstream out;
  out << std::setprecision(12) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return out.str();
}

std::string format_vector(const Vector& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_complex(v(i));
  return s + "]";
}

void print_state(std::ostream& out, const State& state) {
  if (const auto* p = std::get_if<PureState>(&state)) {
    out << "witness: pure state, block " << p->block << ", vector " << format_vector(p->vector) << "\n";
    return;
  }
  out << "witness: mixture of pure states\n";
  for (const auto& [w, p] : std::get<StateMixture>(state).terms) {
    out << "  weight " << w << ", block " << p.block << ", vector " << format_vector(p.vector) << "\n";
  }
}

void print_verdict(std::ostream& out, const Verdict& v, const Replay& replay, bool show_witness) {
  const Tolerances& t = v.tolerances;
  out << "relation: " << to_string(v.relation) << "\n"
      << "answer: " << to_string(v.answer) << "\n"
      << "margin: " << v.margin << "\n"
      << "method: " << v.method << "\n"
      << "tolerances: zero=" << t.zero << " eig=" << t.eig << " self_adjoint=" << t.self_adjoint
      << " eig_gray=" << t.eig_gray << " minimization=" << t.minimization << " (abs_tol=" << v.abs_tol << ")\n";
  if (v.frame_ambiguous) out << "note: norm-attaining frame is ambiguous at eig_gray\n";
  if (!v.block_margins.empty()) {
    out << "block margins:";
    for (double m : v.block_margins) out << " " << m;
    out << "\n";
  }
  if (v.witness && show_witness) {
    print_state(out, *v.witness);
    out << "replay: norm residual " << replay.norm_residual << ", zero residual " << replay.zero_residual
        << (replay.ok ? " (ok)" : " (NOT ok)") << "\n";
  }
  if (v.certificate) {
    const FailureCertificate& c = *v.certificate;
    out << "certificate: ||x + lambda y" << (c.b ? " b" : "") << "|| = " << c.achieved_norm << " < ||x|| = " << c.x_norm
        << " at lambda = " << format_complex(c.lambda) << "\n";
    if (c.b) {
      for (int k = 0; k < c.b->algebra().num_blocks(); ++k) {
        out << "  b block " << k << ":\n";
        const Matrix& m = c.b->block(k);
        for (Eigen::Index r = 0; r < m.rows(); ++r) out << "    " << format_vector(m.row(r).transpose()) << "\n";
      }
    }
  }
}

int answer_exit(Answer a) {
  switch (a) {
    case Answer::Holds: return kHolds;
    case Answer::Fails: return kFails;
    case Answer::Borderline: return kBorderline;
  }
  return kBorderline;
}

struct CheckArgs {
  std::string relation;
  std::string file;
  double tol = Tolerances{}.zero;
  double eig_tol = Tolerances{}.eig;
  bool json = false;
  bool witness = false;
};

int cmd_check(const CheckArgs& a, bool force_witness, std::ostream& out) {
  check_tolerance(a.tol, "--tol");
  check_tolerance(a.eig_tol, "--eig-tol");
  const Relation relation = parse_relation(a.relation);
  const ProblemFile problem = parse_problem(read_input(a.file));
  Tolerances tol;
  tol.zero = a.tol;
  tol.eig = a.eig_tol;
  tol.eig_gray = std::max(tol.eig_gray, tol.eig);
  const Verdict v = check_relation(relation, problem.x, problem.y, tol);
  const Replay replay = replay_witness(v, problem.x, problem.y);
  if (a.json) {
    json doc = verdict_to_json(v);
    if (v.witness) doc["replay"] = {{"norm_residual", replay.norm_residual}, {"zero_residual", replay.zero_residual}, {"ok", replay.ok}};
    out << doc.dump(2) << "\n";
  } else {
    print_verdict(out, v, replay, force_witness || a.witness);
  }
  return answer_exit(v.answer);
}

struct CounterexampleArgs {
  std::string kind;
  std::string algebra;
  std::string rows;
  std::string profile = "projection";
  std::string shape;
  std::string blocks = "0,1";
  int block = -1;
  std::optional<std::uint64_t> seed;
  std::string out_path;
};

int cmd_counterexample(const CounterexampleArgs& a, std::ostream& out, std::ostream& err) {
  const BlockAlgebra algebra = parse_algebra_spec(a.algebra);
  std::vector<int> rows = a.rows.empty() ? algebra.dims() : parse_dims(a.rows);
  if (rows.size() != algebra.dims().size()) {
    throw Error(ErrorCode::DimensionMismatch, "--rows needs one entry per algebra block");
  }
  const ModuleSpace space(algebra, rows);
  const std::uint64_t seed = a.seed.value_or(default_seed());
  Rng rng = make_stream(seed, 0);
  if (a.kind != "sqc" && a.kind != "prime") throw Error(ErrorCode::Parse, "unknown counterexample kind '" + a.kind + "'");
  SqcOptions options;
  if (a.profile == "projection") options.profile = AProfile::Projection;
  else if (a.profile == "paper_quartic") options.profile = AProfile::PaperQuartic;
  else throw Error(ErrorCode::Parse, "--profile must be projection or paper_quartic");
  if (a.block >= 0) options.block = a.block;
  if (a.shape == "I") options.shape = SqcCase::I;
  else if (a.shape == "II") options.shape = SqcCase::II;
  else if (a.shape == "III") options.shape = SqcCase::III;
  else if (!a.shape.empty()) throw Error(ErrorCode::Parse, "--shape must be I, II or III");
  const std::vector<int> ij = parse_dims_allow_zero(a.blocks);
  if (ij.size() != 2) throw Error(ErrorCode::Parse, "--blocks needs two indices");

  json doc;
  try {
    if (a.kind == "sqc") {
      doc = sqc_to_json(make_sqc_pair(space, rng, options));
    } else {
      doc = prime_to_json(make_prime_pair(space, rng, ij[0], ij[1]));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CommutativeAlgebra) {
      err << "sqc: cannot build a quasi-strong but not strong pair over " << algebra.to_string()
          << ": strong and quasi-strong orthogonality coincide on commutative algebras\n";
      return kPrecondition;
    }
    if (e.code() == ErrorCode::NotEnoughBlocks) {
      err << "prime: cannot build a BJ but not quasi-strong pair over " << algebra.to_string()
          << ": the algebra is prime (one block), where quasi-strong and BJ orthogonality coincide\n";
      return kPrecondition;
    }
    err << a.kind << ": " << e.what() << "\n";
    return kPrecondition;
  }
  doc["seed"] = seed;
  const std::string text = doc.dump(2) + "\n";
  if (a.out_path.empty()) {
    out << text;
  } else {
    write_output(a.out_path, text);
    out << "wrote " << a.kind << " pair over " << space.to_string() << " to " << a.out_path << "\n";
  }
  return 0;
}

struct SurveyArgs {
  std::string config;
  std::vector<std::string> spaces;
  int samples = -1;
  int quasi_samples = -1;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> kinds;
  std::optional<double> tol;
  int threads = -1;
  bool minimization = false;
  std::string out_path;
  std::string csv_path;
};

ModuleSpace parse_space(const std::string& text) {
  const auto colon = text.find(':');
  const BlockAlgebra algebra = parse_algebra_spec(text.substr(0, colon));
  if (colon == std::string::npos) return ModuleSpace(algebra);
  std::vector<int> rows = parse_dims(text.substr(colon + 1));
  if (rows.size() != algebra.dims().size()) {
    throw Error(ErrorCode::DimensionMismatch, "space '" + text + "': one row count per block expected");
  }
  return ModuleSpace(algebra, std::move(rows));
}

void print_survey_table(std::ostream& out, const SurveyReport& r) {
  out << r.kind << " survey (seed " << r.config.seed << ")\n";
  for (const auto& s : r.spaces) {
    out << "  " << std::left << std::setw(10) << s.label << std::right << " pairs " << std::setw(6)
        << s.random_pairs + s.enriched_pairs << "  borderline " << std::setw(4) << s.borderline << "  violations "
        << s.chain_violations << "  errors " << s.errors;
    if (s.equivalence) {
      out << "  strong~quasi " << s.flags.strong_quasi << " quasi~bj " << s.flags.quasi_bj << " strong~bj "
          << s.flags.strong_bj << (s.pattern_matches ? "  (as predicted)" : "  (NOT as predicted)");
    }
    out << "\n";
  }
}

bool audit(const SurveyReport& r, std::ostream& err) {
  bool ok = true;
  for (const auto& s : r.spaces) {
    if (s.chain_violations > 0) {
      ok = false;
      err << r.kind << " survey: " << s.chain_violations << " chain violations on " << s.label << "\n";
      if (!s.violation_exhibits.empty()) {
        err << "  first offending pair (sample " << s.violation_exhibits.front().sample << "):\n"
            << s.violation_exhibits.front().pair.dump() << "\n";
      }
    }
    if (s.errors > 0) {
      ok = false;
      err << r.kind << " survey: " << s.errors << " sample errors on " << s.label << ", first: " << s.first_error << "\n";
    }
    if (s.borderline_rate() >= 0.01) {
      ok = false;
      err << r.kind << " survey: borderline rate " << s.borderline_rate() << " on " << s.label << " (limit 0.01)\n";
    }
    if (s.equivalence && !s.pattern_matches) {
      ok = false;
      err << r.kind << " survey: equivalence flags on " << s.label << " differ from the predicted pattern"
          << " (strong~quasi " << s.flags.strong_quasi << "/" << s.predicted.strong_quasi << ", quasi~bj "
          << s.flags.quasi_bj << "/" << s.predicted.quasi_bj << ", strong~bj " << s.flags.strong_bj << "/"
          << s.predicted.strong_bj << ")\n";
    }
  }
  if (!ok) err << "reproduce with --seed " << r.config.seed << "\n";
  return ok;
}

int cmd_survey(const SurveyArgs& a, std::ostream& out, std::ostream& err) {
  EnsembleConfig config;
  if (!a.config.empty()) {
    json doc;
    try {
      doc = json::parse(read_input(a.config));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::Parse, std::string("config: malformed JSON: ") + e.what());
    }
    config = config_from_json(doc);
  } else {
    config.spaces = default_family();
  }
  if (!a.spaces.empty()) {
    config.spaces.clear();
    for (const auto& s : a.spaces) config.spaces.push_back(parse_space(s));
  }
  if (a.samples >= 0) config.samples_per_space = a.samples;
  if (a.quasi_samples >= 0) config.quasi_samples_per_space = a.quasi_samples;
  if (a.seed) {
    config.seed = *a.seed;
  } else if (a.config.empty() || std::getenv("BJO_SEED")) {
    config.seed = default_seed();
  }
  if (a.kinds) {
    config.element_kinds.clear();
    std::stringstream ss(*a.kinds);
    std::string item;
    while (std::getline(ss, item, ',')) config.element_kinds.push_back(parse_element_kind(item));
  }
  if (a.tol) {
    check_tolerance(*a.tol, "--tol");
    config.tolerances.zero = *a.tol;
  }
  if (a.threads >= 0) config.threads = a.threads;
  config.minimization_check = config.minimization_check || a.minimization;
  validate(config);

  const SurveyReport implication = run_implication_survey(config);
  const SurveyReport equivalence = run_equivalence_survey(config);
  print_survey_table(out, implication);
  print_survey_table(out, equivalence);

  if (!a.out_path.empty()) {
    json doc{{"implication", report_to_json(implication)}, {"equivalence", report_to_json(equivalence)}};
    write_output(a.out_path, doc.dump(2) + "\n");
  }
  if (!a.csv_path.empty()) {
    std::string csv = report_to_csv(implication);
    const std::string second = report_to_csv(equivalence);
    csv += second.substr(second.find("\r\n") + 2);
    write_output(a.csv_path, csv);
  }
  const bool ok = audit(implication, err) & audit(equivalence, err);
  return ok ? 0 : kViolation;
}

struct VerifyArgs {
  std::optional<std::uint64_t> seed;
  std::string out_path;
  double scale = 1.0;
  bool skip_determinism = false;
  int threads = 0;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  AcceptanceOptions options;
  options.seed = a.seed.value_or(default_seed());
  options.sample_scale = a.scale;
  options.check_determinism = !a.skip_determinism;
  options.threads = a.threads;
  if (!(a.scale > 0.0)) throw Error(ErrorCode::Config, "--scale must be positive");
  out << "acceptance suite, seed " << options.seed << "\n" << std::flush;
  options.on_result = [&](const CriterionResult& r) { out << format_line(r) << "\n" << std::flush; };
  const AcceptanceReport report = run_acceptance(options);
  if (!a.out_path.empty()) write_output(a.out_path, acceptance_to_json(report).dump(2) + "\n");
  if (report.all_pass()) {
    out << "all " << report.criteria.size() << " criteria pass\n";
    return 0;
  }
  err << "acceptance failures; reproduce with --seed " << options.seed << "\n";
  return kViolation;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Birkhoff-James orthogonality on Hilbert modules over finite-dimensional C*-algebras", "bjo"};
  app.require_subcommand(1);

  CheckArgs check_args, witness_args;
  auto add_check = [](CLI::App* sub, CheckArgs& args) {
    sub->add_option("relation", args.relation, "bj, quasi or strong")->required();
    sub->add_option("file", args.file, "problem file (JSON), - for stdin")->required();
    sub->add_option("--tol", args.tol, "zero tolerance, relative to ||x|| ||y||");
    sub->add_option("--eig-tol", args.eig_tol, "relative eigenvalue clustering tolerance");
    sub->add_flag("--json", args.json, "print the verdict as JSON");
    sub->add_flag("--witness", args.witness, "print the witness state");
  };
  CLI::App* check = app.add_subcommand("check", "decide one relation for the pair in a problem file");
  add_check(check, check_args);
  CLI::App* witness = app.add_subcommand("witness", "check, always printing the witness");
  add_check(witness, witness_args);

  CounterexampleArgs cx;
  CLI::App* counter = app.add_subcommand("counterexample", "build a pair separating two relations");
  counter->add_option("kind", cx.kind, "sqc (quasi but not strong) or prime (bj but not quasi)")->required();
  counter->add_option("--algebra", cx.algebra, "block sizes, e.g. \"1,2\"")->required();
  counter->add_option("--rows", cx.rows, "module row counts per block (default: the algebra itself)");
  counter->add_option("--profile", cx.profile, "projection or paper_quartic (sqc)");
  counter->add_option("--shape", cx.shape, "I, II or III (sqc)");
  counter->add_option("--block", cx.block, "block to use (sqc)");
  counter->add_option("--blocks", cx.blocks, "two block indices \"i,j\" (prime)");
  counter->add_option("--seed", cx.seed, "random seed (default: BJO_SEED or 42)");
  counter->add_option("--out", cx.out_path, "output file (default: stdout)");

  SurveyArgs sv;
  CLI::App* survey = app.add_subcommand("survey", "implication and equivalence surveys");
  survey->add_option("--config", sv.config, "config file (JSON)");
  survey->add_option("--space", sv.spaces, "space \"blocks[:rows]\", e.g. \"2:3\"; repeatable");
  survey->add_option("--samples", sv.samples, "random pairs per space");
  survey->add_option("--quasi-samples", sv.quasi_samples, "quasi-enriched pairs per space");
  survey->add_option("--seed", sv.seed, "random seed (default: BJO_SEED or 42)");
  survey->add_option("--kinds", sv.kinds, "comma list of ginibre, positive, unitary-column, quasi-enriched");
  survey->add_option("--tol", sv.tol, "zero tolerance");
  survey->add_option("--threads", sv.threads, "worker threads (0 = all cores)");
  survey->add_flag("--minimization", sv.minimization, "cross-check bj with norm minimization");
  survey->add_option("--out", sv.out_path, "JSON report file");
  survey->add_option("--csv", sv.csv_path, "CSV summary file");

  VerifyArgs vf;
  CLI::App* verify = app.add_subcommand("verify-paper", "run the full acceptance suite");
  verify->add_option("--seed", vf.seed, "random seed (default: BJO_SEED or 42)");
  verify->add_option("--out", vf.out_path, "JSON report file");
  verify->add_option("--scale", vf.scale, "multiply every sample count");
  verify->add_flag("--skip-determinism", vf.skip_determinism, "do not rerun the suite for the determinism check");
  verify->add_option("--threads", vf.threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kParse;
  }

  try {
    if (*check) return cmd_check(check_args, false, out);
    if (*witness) return cmd_check(witness_args, true, out);
    if (*counter) return cmd_counterexample(cx, out, err);
    if (*survey) return cmd_survey(sv, out, err);
    if (*verify) return cmd_verify(vf, out, err);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code(e);
  } catch (const BadTolerance& e) {
    err << "error: " << e.what() << "\n";
    return kTolerance;
  }
  return kParse;
}

}  // namespace bjo::cli
