#include "daecert/sdp/json.hpp"

#include "daecert/core/json.hpp"

namespace daecert::sdp {

using nlohmann::json;

namespace {

json entries_to_json(const SparseSym& s) {
  json arr = json::array();
  for (const auto& e : s.entries) arr.push_back({e.i, e.j, e.v});
  return arr;
}

Matrix entries_from_json(const json& arr, int dim) {
  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& e : arr) {
    const int i = e.at(0).get<int>();
    const int j = e.at(1).get<int>();
    if (i < 0 || j < 0 || i >= dim || j >= dim) {
      throw InputError("coefficient entry out of range");
    }
    m(i, j) = e.at(2).get<double>();
    m(j, i) = m(i, j);
  }
  return m;
}

const char* sign_name(Sign s) { return s == Sign::kFree ? "free" : "nonnegative"; }

const char* cone_name(Cone c) {
  switch (c) {
    case Cone::kSymmetric:
      return "symmetric";
    case Cone::kPsd:
      return "psd";
    case Cone::kDiagonalPsd:
      return "diagonal-psd";
  }
  return "symmetric";
}

Cone cone_from(const std::string& s) {
  if (s == "symmetric") return Cone::kSymmetric;
  if (s == "psd") return Cone::kPsd;
  if (s == "diagonal-psd") return Cone::kDiagonalPsd;
  throw InputError("unknown cone '" + s + "'");
}

}  // namespace

json to_json(const SdpProblem& p) {
  json j;
  j["schema"] = 1;
  j["scalars"] = json::array();
  for (const auto& v : p.scalars()) {
    j["scalars"].push_back({{"name", v.name}, {"sign", sign_name(v.sign)}});
  }
  j["matrices"] = json::array();
  for (const auto& v : p.matrices()) {
    j["matrices"].push_back({{"name", v.name},
                             {"dim", v.dim},
                             {"cone", cone_name(v.cone)},
                             {"margin", v.margin}});
  }
  j["constraints"] = json::array();
  for (const auto& c : p.constraints()) {
    json terms = json::array();
    for (const auto& [s, coeff] : c.terms) {
      terms.push_back({{"slot", s}, {"entries", entries_to_json(coeff)}});
    }
    j["constraints"].push_back(
        {{"name", c.name},
         {"dim", c.dim},
         {"relation", c.relation == Relation::kPsd ? "psd" : "zero"},
         {"constant", entries_to_json(c.constant)},
         {"terms", std::move(terms)}});
  }
  j["objective"] = json::array();
  for (const auto& [s, v] : p.objective()) j["objective"].push_back({s, v});
  return j;
}

SdpProblem problem_from_json(const json& j) {
  try {
    if (j.value("schema", 1) != 1) throw InputError("unsupported problem schema");
    SdpProblem p;
    for (const auto& v : j.at("scalars")) {
      const std::string sign = v.value("sign", "free");
      if (sign != "free" && sign != "nonnegative") {
        throw InputError("unknown sign '" + sign + "'");
      }
      p.add_scalar(v.at("name").get<std::string>(),
                   sign == "free" ? Sign::kFree : Sign::kNonnegative);
    }
    for (const auto& v : j.at("matrices")) {
      p.add_matrix(v.at("name").get<std::string>(), v.at("dim").get<int>(),
                   cone_from(v.value("cone", "symmetric")), v.value("margin", 0.0));
    }
    for (const auto& c : j.at("constraints")) {
      const std::string rel = c.value("relation", "psd");
      if (rel != "psd" && rel != "zero") throw InputError("unknown relation '" + rel + "'");
      const int dim = c.at("dim").get<int>();
      const int k = p.add_constraint(c.at("name").get<std::string>(), dim,
                                     rel == "psd" ? Relation::kPsd : Relation::kZero);
      p.add_constant(k, entries_from_json(c.value("constant", json::array()), dim));
      for (const auto& t : c.value("terms", json::array())) {
        p.add_slot_term(k, t.at("slot").get<int>(),
                        SparseSym::from_dense(entries_from_json(t.at("entries"), dim)));
      }
    }
    std::vector<std::pair<int, double>> obj;
    for (const auto& t : j.value("objective", json::array())) {
      obj.emplace_back(t.at(0).get<int>(), t.at(1).get<double>());
    }
    p.set_objective_slots(std::move(obj));
    return p;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed problem JSON: ") + e.what());
  }
}

json to_json(const SdpSolution& s) {
  json j;
  j["status"] = to_string(s.status);
  j["objective"] = s.objective;
  j["primal_residual"] = s.primal_residual;
  j["dual_residual"] = s.dual_residual;
  j["duality_gap"] = s.duality_gap;
  j["iterations"] = s.iterations;
  j["margin"] = s.margin;
  j["message"] = s.message;
  j["scalars"] = s.values.scalars;
  j["matrices"] = json::array();
  for (const auto& m : s.values.matrices) j["matrices"].push_back(matrix_to_json(m));
  if (s.certificate) j["certificate_violation"] = s.certificate->violation;
  return j;
}

json to_json(const VerificationReport& r) {
  json j;
  j["pass"] = r.pass;
  j["worst"] = r.worst;
  if (r.gap_checked) j["duality_gap"] = r.duality_gap;
  j["checks"] = json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"kind", c.kind},
                           {"min_eigenvalue", c.min_eigenvalue},
                           {"pass", c.pass}});
  }
  return j;
}

}  // namespace daecert::sdp
