#include "bjo/io.hpp"

#include <cmath>
#include <sstream>

namespace bjo {

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::Parse, path + ": " + what);
}

Complex entry_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  parse_fail(path, "expected a number or an [re, im] pair");
}

Matrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) parse_fail(path, "expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) parse_fail(path + "[0]", "expected a nonempty row");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string rpath = path + "[" + std::to_string(r) + "]";
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array()) parse_fail(rpath, "expected a row array");
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      parse_fail(rpath, "ragged row with " + std::to_string(row.size()) + " entries, expected " +
                            std::to_string(cols));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = entry_from_json(row[static_cast<std::size_t>(c)], rpath + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

std::vector<int> dims_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) parse_fail(path, "expected a nonempty array of positive integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer() || j[i].get<long long>() < 1 || j[i].get<long long>() > 4096) {
      parse_fail(path + "[" + std::to_string(i) + "]", "expected a positive integer");
    }
    out.push_back(j[i].get<int>());
  }
  return out;
}

ModuleElement element_from_json(const json& j, const ModuleSpace& space, const std::string& name) {
  if (!j.is_array()) parse_fail(name, "expected an array of blocks");
  if (static_cast<int>(j.size()) != space.num_blocks()) {
    throw Error(ErrorCode::DimensionMismatch, name + ": " + std::to_string(j.size()) +
                                                  " blocks given, the algebra has " +
                                                  std::to_string(space.num_blocks()));
  }
  std::vector<Matrix> blocks;
  for (int k = 0; k < space.num_blocks(); ++k) {
    const std::string path = name + "[" + std::to_string(k) + "]";
    Matrix m = matrix_from_json(j[static_cast<std::size_t>(k)], path);
    if (m.rows() != space.rows(k) || m.cols() != space.algebra().dim(k)) {
      throw Error(ErrorCode::DimensionMismatch,
                  path + ": block is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      ", expected " + std::to_string(space.rows(k)) + "x" +
                      std::to_string(space.algebra().dim(k)));
    }
    blocks.push_back(std::move(m));
  }
  return ModuleElement(space, std::move(blocks));
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json pure_to_json(const PureState& s) {
  return json{{"block", s.block}, {"vector", vector_to_json(s.vector)}};
}

}  // namespace

ProblemFile problem_from_json(const json& doc) {
  if (!doc.is_object()) parse_fail("$", "expected an object");
  if (!doc.contains("algebra") || !doc["algebra"].is_object() || !doc["algebra"].contains("blocks")) {
    parse_fail("algebra", "missing {\"blocks\": [...]}");
  }
  const std::vector<int> dims = dims_from_json(doc["algebra"]["blocks"], "algebra.blocks");
  std::vector<int> rows = dims;
  if (doc.contains("module") && !doc["module"].is_null()) {
    if (!doc["module"].is_object() || !doc["module"].contains("rows")) {
      parse_fail("module", "expected {\"rows\": [...]}");
    }
    rows = dims_from_json(doc["module"]["rows"], "module.rows");
    if (rows.size() != dims.size()) {
      throw Error(ErrorCode::DimensionMismatch, "module.rows: " + std::to_string(rows.size()) +
                                                    " entries, the algebra has " +
                                                    std::to_string(dims.size()) + " blocks");
    }
  }
  ModuleSpace space(BlockAlgebra(dims), rows);
  for (const char* name : {"x", "y"}) {
    if (!doc.contains(name)) parse_fail(name, "missing");
  }
  ModuleElement x = element_from_json(doc["x"], space, "x");
  ModuleElement y = element_from_json(doc["y"], space, "y");
  return ProblemFile{std::move(space), std::move(x), std::move(y)};
}

ProblemFile parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("malformed JSON: ") + e.what());
  }
  return problem_from_json(doc);
}

json problem_to_json(const ProblemFile& problem) {
  json doc = space_to_json(problem.space);
  doc["x"] = blocks_to_json(problem.x.blocks());
  doc["y"] = blocks_to_json(problem.y.blocks());
  return doc;
}

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && item[used] == ' ') ++used;
    if (used != item.size() || n < 1) {
      throw Error(ErrorCode::Parse, "dimension list '" + text + "': bad entry '" + item + "'");
    }
    out.push_back(n);
  }
  if (out.empty()) throw Error(ErrorCode::Parse, "empty dimension list");
  return out;
}

BlockAlgebra parse_algebra_spec(const std::string& text) { return BlockAlgebra(parse_dims(text)); }

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

json blocks_to_json(const std::vector<Matrix>& blocks) {
  json out = json::array();
  for (const auto& b : blocks) out.push_back(matrix_to_json(b));
  return out;
}

json space_to_json(const ModuleSpace& space) {
  json doc;
  doc["algebra"] = {{"blocks", space.algebra().dims()}};
  if (!space.is_algebra_module()) doc["module"] = {{"rows", space.rows()}};
  return doc;
}

json state_to_json(const State& state) {
  if (const auto* p = std::get_if<PureState>(&state)) {
    json j = pure_to_json(*p);
    j["type"] = "pure";
    return j;
  }
  const auto& mix = std::get<StateMixture>(state);
  json terms = json::array();
  for (const auto& [w, s] : mix.terms) {
    json t = pure_to_json(s);
    t["weight"] = w;
    terms.push_back(std::move(t));
  }
  return json{{"type", "mixture"}, {"terms", std::move(terms)}};
}

json tolerances_to_json(const Tolerances& tol) {
  return json{{"zero", tol.zero},
              {"eig", tol.eig},
              {"self_adjoint", tol.self_adjoint},
              {"eig_gray", tol.eig_gray},
              {"minimization", tol.minimization}};
}

Tolerances tolerances_from_json(const json& doc, Tolerances base) {
  if (!doc.is_object()) parse_fail("tolerances", "expected an object");
  auto read = [&](const char* key, double& field) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number() || !(doc[key].get<double>() > 0.0)) {
      parse_fail(std::string("tolerances.") + key, "expected a positive number");
    }
    field = doc[key].get<double>();
  };
  read("zero", base.zero);
  read("eig", base.eig);
  read("self_adjoint", base.self_adjoint);
  read("eig_gray", base.eig_gray);
  read("minimization", base.minimization);
  return base;
}

json certificate_to_json(const FailureCertificate& cert) {
  json j{{"lambda", complex_to_json(cert.lambda)},
         {"achieved_norm", cert.achieved_norm},
         {"x_norm", cert.x_norm}};
  j["b"] = cert.b ? blocks_to_json(cert.b->blocks()) : json(nullptr);
  return j;
}

json verdict_to_json(const Verdict& v) {
  json j{{"relation", to_string(v.relation)},
         {"answer", to_string(v.answer)},
         {"margin", finite_or_null(v.margin)},
         {"method", v.method},
         {"tolerances", tolerances_to_json(v.tolerances)},
         {"scale", v.scale},
         {"abs_tol", v.abs_tol},
         {"frame_ambiguous", v.frame_ambiguous},
         {"block_margins", v.block_margins}};
  j["witness"] = v.witness ? state_to_json(*v.witness) : json(nullptr);
  j["certificate"] = v.certificate ? certificate_to_json(*v.certificate) : json(nullptr);
  return j;
}

json sqc_to_json(const SqcCounterexample& c) {
  json doc = space_to_json(c.x_prime.space());
  doc["x"] = blocks_to_json(c.x_prime.blocks());
  doc["y"] = blocks_to_json(c.y_prime.blocks());
  doc["kind"] = "sqc";
  doc["case"] = to_string(c.case_label);
  doc["block"] = c.block;
  doc["witness"] = state_to_json(c.witness);
  doc["failure"] = certificate_to_json(c.failure);
  doc["a"] = blocks_to_json(c.a.blocks());
  doc["u"] = blocks_to_json(c.u.blocks());
  doc["expected"] = {{"quasi", "Holds"}, {"strong", "Fails"}};
  return doc;
}

json prime_to_json(const PrimeCounterexample& c) {
  json doc = space_to_json(c.u_plus.space());
  doc["x"] = blocks_to_json(c.u_plus.blocks());
  doc["y"] = blocks_to_json(c.u_minus.blocks());
  doc["kind"] = "prime";
  doc["blocks"] = {c.block_i, c.block_j};
  doc["bj_witness"] = state_to_json(c.bj_witness);
  json obstruction = json::array();
  for (Complex z : c.quasi_obstruction) obstruction.push_back(complex_to_json(z));
  doc["quasi_obstruction"] = std::move(obstruction);
  doc["expected"] = {{"bj", "Holds"}, {"quasi", "Fails"}};
  return doc;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace bjo
