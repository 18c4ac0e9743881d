#include "margcert/json_io.hpp"

#include <cmath>

namespace margcert::json_io {

namespace {

void require_schema(const Json& j, const char* schema) {
  if (!j.is_object() || !j.contains("format") || j.at("format") != schema)
    throw SchemaError(std::string("expected format ") + schema);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw SchemaError(std::string(what) + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(std::string(what) + ": non-finite value");
  return v;
}

const Json& array_of(const Json& j, std::size_t size, const char* what) {
  if (!j.is_array() || j.size() != size)
    throw SchemaError(std::string(what) + ": expected an array of length " + std::to_string(size));
  return j;
}

const char* pair_key(int p) { return p == 0 ? "AB" : p == 1 ? "AC" : "BC"; }

entcert::Verdict verdict_from(const std::string& s) {
  for (auto v : {entcert::Verdict::CertifiedEntangled, entcert::Verdict::NotCertified,
                 entcert::Verdict::InfeasibleMarginals})
    if (entcert::to_string(v) == s) return v;
  throw SchemaError("unknown verdict " + s);
}

}  // namespace

Json to_json(const TripartiteBox& b) {
  return Json{{"format", "box.v1"},
              {"parties", 3},
              {"layout", "probabilities[8*(4x+2y+z) + (4a+2b+c)], outcome -1 -> 0, +1 -> 1"},
              {"probabilities", b.data()}};
}

TripartiteBox box_from_json(const Json& j) {
  require_schema(j, "box.v1");
  if (!j.contains("probabilities")) throw SchemaError("box.v1: missing probabilities");
  if (j.contains("parties") && j.at("parties") != 3) throw SchemaError("box.v1: only 3 parties supported");
  const Json& p = array_of(j.at("probabilities"), 64, "box.v1 probabilities");
  TripartiteBox b;
  for (std::size_t i = 0; i < 64; ++i) b.data()[i] = number(p[i], "box.v1 probabilities");
  return b;
}

Json to_json(const CorrelatorTable& t) {
  Json j{{"format", "correlators.v1"}};
  j["singles"] = {{"A", t.singles[0]}, {"B", t.singles[1]}, {"C", t.singles[2]}};
  for (int p = 0; p < 3; ++p) j["doubles"][pair_key(p)] = t.doubles[static_cast<std::size_t>(p)];
  if (t.has_triples) j["triples"] = t.triples;
  return j;
}

CorrelatorTable correlators_from_json(const Json& j) {
  require_schema(j, "correlators.v1");
  CorrelatorTable t;
  static const char* parties[3] = {"A", "B", "C"};
  try {
    for (int a = 0; a < 3; ++a) {
      const Json& s = array_of(j.at("singles").at(parties[a]), 2, "singles");
      for (int u = 0; u < 2; ++u) t.singles[a][u] = number(s[u], "singles");
    }
    for (int p = 0; p < 3; ++p) {
      const Json& d = array_of(j.at("doubles").at(pair_key(p)), 2, "doubles");
      for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v) t.doubles[p][u][v] = number(array_of(d[u], 2, "doubles")[v], "doubles");
    }
    t.has_triples = j.contains("triples");
    if (t.has_triples) {
      const Json& tr = array_of(j.at("triples"), 2, "triples");
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          for (int z = 0; z < 2; ++z)
            t.triples[x][y][z] = number(array_of(array_of(tr[x], 2, "triples")[y], 2, "triples")[z], "triples");
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("correlators.v1: ") + e.what());
  }
  if (!t.in_range(1e-12)) throw SchemaError("correlators.v1: entries outside [-1, 1]");
  return t;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back({m(r, c).real(), m(r, c).imag()});
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  try {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    if (rows <= 0 || cols <= 0) throw SchemaError("matrix: bad shape");
    const Json& data = array_of(j.at("data"), static_cast<std::size_t>(rows * cols), "matrix data");
    ComplexMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) {
        const Json& e = array_of(data[static_cast<std::size_t>(r * cols + c)], 2, "matrix entry");
        m(r, c) = Complex(number(e[0], "matrix entry"), number(e[1], "matrix entry"));
      }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("matrix: ") + e.what());
  }
}

Json to_json(const polytopes::MembershipReport& r, const std::string& mode) {
  Json j{{"format", "membership.v1"},
         {"mode", mode},
         {"member", r.member},
         {"status", lp::to_string(r.status)},
         {"phase1_value", r.phase1_value},
         {"weights", r.weights},
         {"certificate", r.certificate},
         {"certificate_rows", r.row_labels},
         {"residual", r.residual}};
  j["check"] = {{"valid", r.check.valid},
                {"max_violation", r.check.max_violation},
                {"margin", r.check.margin},
                {"exact_checked", r.check.exact_checked},
                {"exact_valid", r.check.exact_valid},
                {"detail", r.check.detail}};
  return j;
}

Json to_json(const entcert::CertResult& c) {
  Json j{{"format", "certificate.v1"},
         {"kind", c.kind},
         {"n", c.n},
         {"p_star", c.p_star},
         {"p_sep", c.p_sep},
         {"verdict", entcert::to_string(c.verdict)}};
  Json res = Json::object();
  for (const auto& r : c.residuals) res[r.name] = {{"value", r.value}, {"tolerance", r.tolerance}, {"ok", r.ok()}};
  j["residuals"] = res;
  Json vals = Json::object();
  for (const auto& [k, v] : c.values) vals[k] = v;
  j["values"] = vals;
  Json mats = Json::array();
  for (const auto& [name, m] : c.matrices) {
    Json mj = matrix_to_json(m);
    mj["name"] = name;
    mats.push_back(mj);
  }
  j["matrices"] = mats;
  j["notes"] = c.notes;
  return j;
}

entcert::CertResult cert_from_json(const Json& j) {
  require_schema(j, "certificate.v1");
  entcert::CertResult c;
  try {
    c.kind = j.at("kind").get<std::string>();
    c.n = j.at("n").get<int>();
    c.p_star = number(j.at("p_star"), "p_star");
    c.p_sep = number(j.at("p_sep"), "p_sep");
    c.verdict = verdict_from(j.at("verdict").get<std::string>());
    for (const auto& [name, r] : j.at("residuals").items())
      c.residuals.push_back({name, number(r.at("value"), "residual"), number(r.at("tolerance"), "tolerance")});
    for (const auto& [name, v] : j.at("values").items()) c.values.emplace_back(name, number(v, "value"));
    for (const Json& m : j.at("matrices")) c.matrices.emplace_back(m.at("name").get<std::string>(), matrix_from_json(m));
    c.notes = j.at("notes").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("certificate.v1: ") + e.what());
  }
  return c;
}

MarginalTriple marginals_from_document(const Json& j) {
  if (!j.is_object() || !j.contains("format") || !j.at("format").is_string())
    throw SchemaError("document has no format field");
  const std::string schema = j.at("format").get<std::string>();
  if (schema == "box.v1") {
    try {
      return boxes::marginals(box_from_json(j));
    } catch (const std::domain_error& e) {
      throw std::invalid_argument(std::string("box.v1 input signals: ") + e.what());
    }
  }
  if (schema == "correlators.v1") return boxes::marginals_from_correlators(correlators_from_json(j));
  throw SchemaError("unsupported schema " + schema);
}

}  // namespace margcert::json_io
