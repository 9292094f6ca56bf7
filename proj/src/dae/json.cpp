#include "daecert/dae/json.hpp"

#include <fstream>

#include "daecert/core/json.hpp"
#include "daecert/sos/polynomial.hpp"

namespace daecert::dae {

using nlohmann::json;

namespace {

const char* const kBlocks[] = {"A", "B_v", "B_w", "B_xi", "F", "G_v", "G_w", "G_xi", "C", "D_v"};

Matrix field(const json& j, const char* key) {
  return j.contains(key) ? matrix_from_json(j.at(key), key) : Matrix();
}

int pick(std::initializer_list<std::pair<const Matrix*, bool>> sources) {
  for (const auto& [m, rows] : sources) {
    if (m->size() > 0) return static_cast<int>(rows ? m->rows() : m->cols());
  }
  return 0;
}

Matrix or_zero(const Matrix& m, int r, int c, const char* name) {
  if (m.size() == 0) return Matrix::Zero(r, c);
  if (m.rows() != r || m.cols() != c) {
    throw InputError(std::string(name) + " must be " + std::to_string(r) + "x" + std::to_string(c));
  }
  return m;
}

sos::Polynomial polynomial_from_json(const json& j, const std::string& what) {
  if (j.is_string()) {
    try {
      return sos::parse_polynomial(j.get<std::string>());
    } catch (const InputError& e) {
      throw InputError(what + ": " + e.what());
    }
  }
  if (j.is_number()) return sos::Polynomial::constant(j.get<double>());
  if (!j.is_object() || !j.contains("vars") || !j.contains("terms")) {
    throw InputError(what + ": expected a string or {vars, terms}");
  }
  sos::Polynomial p(j.at("vars").get<std::vector<std::string>>());
  for (const auto& t : j.at("terms")) {
    if (!t.is_array() || t.size() != 2) throw InputError(what + ": term must be [exponents, coef]");
    auto e = t[0].get<sos::Exponent>();
    if (e.size() != p.vars().size()) throw InputError(what + ": exponent length mismatch");
    p.add_term(e, t[1].get<double>());
  }
  return p;
}

json polynomial_to_json(const sos::Polynomial& p) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({e, c});
  return {{"vars", p.vars()}, {"terms", terms}};
}

std::vector<sos::Polynomial> polys(const json& j, const char* key) {
  std::vector<sos::Polynomial> out;
  if (!j.contains(key)) return out;
  int i = 0;
  for (const auto& e : j.at(key)) out.push_back(polynomial_from_json(e, std::string(key) + "[" + std::to_string(i++) + "]"));
  return out;
}

std::vector<std::string> names(const json& j, const char* key) {
  return j.contains(key) ? j.at(key).get<std::vector<std::string>>() : std::vector<std::string>{};
}

}  // namespace

LinearDae linear_dae_from_json(const json& j) {
  if (!j.is_object()) throw InputError("system must be an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* b : kBlocks) known = known || key == b;
    if (!known) throw InputError("unknown system block '" + key + "'");
  }
  const Matrix a = field(j, "A"), bv = field(j, "B_v"), bw = field(j, "B_w"), bx = field(j, "B_xi");
  const Matrix f = field(j, "F"), gv = field(j, "G_v"), gw = field(j, "G_w"), gx = field(j, "G_xi");
  const Matrix c = field(j, "C"), dv = field(j, "D_v");
  const int n = pick({{&a, true}, {&bv, true}, {&bw, true}, {&f, false}, {&c, false}});
  const int m = pick({{&bv, false}, {&gv, false}, {&dv, false}});
  const int p = pick({{&bw, false}, {&gw, false}});
  const int l = pick({{&bx, false}, {&gx, false}});
  const int k = pick({{&f, true}, {&gv, true}, {&gw, true}, {&gx, true}});
  const int q = pick({{&c, true}, {&dv, true}});
  LinearDae s;
  s.a = or_zero(a, n, n, "A");
  s.b_v = or_zero(bv, n, m, "B_v");
  s.b_w = or_zero(bw, n, p, "B_w");
  s.b_xi = or_zero(bx, n, l, "B_xi");
  s.f = or_zero(f, k, n, "F");
  s.g_v = or_zero(gv, k, m, "G_v");
  s.g_w = or_zero(gw, k, p, "G_w");
  s.g_xi = or_zero(gx, k, l, "G_xi");
  s.c = or_zero(c, q, n, "C");
  s.d_v = or_zero(dv, q, m, "D_v");
  s.check();
  return s;
}

json to_json(const LinearDae& s) {
  return {{"A", matrix_to_json(s.a)},     {"B_v", matrix_to_json(s.b_v)},
          {"B_w", matrix_to_json(s.b_w)}, {"B_xi", matrix_to_json(s.b_xi)},
          {"F", matrix_to_json(s.f)},     {"G_v", matrix_to_json(s.g_v)},
          {"G_w", matrix_to_json(s.g_w)}, {"G_xi", matrix_to_json(s.g_xi)},
          {"C", matrix_to_json(s.c)},     {"D_v", matrix_to_json(s.d_v)}};
}

UncertaintySpec uncertainty_from_json(const json& j, int n, int m, int l) {
  const std::string kind = j.value("kind", "none");
  if (kind == "none") return UncertaintySpec::none();
  if (kind == "sector") return UncertaintySpec::sector(n, m, l, j.value("margin", 1e-6));
  if (!j.contains("M")) throw InputError("uncertainty: missing M");
  const Matrix mm = matrix_from_json(j.at("M"), "M");
  if (kind == "pointwise") {
    const Matrix d = j.contains("D") ? matrix_from_json(j.at("D"), "D") : Matrix::Identity(n + m + l, n + m + l);
    return UncertaintySpec::pointwise(mm, d);
  }
  if (kind == "hard_iqc") {
    if (!j.contains("filter")) throw InputError("uncertainty: missing filter");
    const json& fj = j.at("filter");
    Filter f{matrix_from_json(fj.at("A"), "filter.A"), matrix_from_json(fj.at("B"), "filter.B"),
             matrix_from_json(fj.at("C"), "filter.C"), matrix_from_json(fj.at("D"), "filter.D")};
    return UncertaintySpec::hard_iqc(f, mm);
  }
  throw InputError("uncertainty: unknown kind '" + kind + "'");
}

PolynomialDae polynomial_dae_from_json(const json& j) {
  if (!j.is_object()) throw InputError("system must be an object");
  PolynomialDae s;
  s.x = names(j, "x");
  s.v = names(j, "v");
  s.w = names(j, "w");
  s.xi = names(j, "xi");
  s.f = polys(j, "f");
  s.g = polys(j, "g");
  s.h = polys(j, "h");
  s.v0 = j.contains("v0") ? vector_from_json(j.at("v0"), "v0") : Vector::Zero(s.m());
  s.check();
  return s;
}

json to_json(const PolynomialDae& s) {
  json out = {{"x", s.x}, {"v", s.v}, {"w", s.w}, {"xi", s.xi}, {"v0", vector_to_json(s.v0)}};
  for (const char* key : {"f", "g", "h"}) out[key] = json::array();
  for (const auto& p : s.f) out["f"].push_back(polynomial_to_json(p));
  for (const auto& p : s.g) out["g"].push_back(polynomial_to_json(p));
  for (const auto& p : s.h) out["h"].push_back(polynomial_to_json(p));
  return out;
}

Model model_from_json(const json& j) {
  if (!j.is_object()) throw InputError("model must be a JSON object");
  if (j.value("schema", 1) != 1) throw InputError("unsupported model schema");
  const std::string type = j.value("type", "linear");
  if (!j.contains("system")) throw InputError("model: missing 'system'");
  Model model;
  const json unc = j.value("uncertainty", json::object());
  if (type == "linear") {
    LinearDae s = linear_dae_from_json(j.at("system"));
    model.uncertainty = uncertainty_from_json(unc, s.n(), s.m(), s.l());
    model.uncertainty.check(s.n(), s.m(), s.l());
    model.system = std::move(s);
  } else if (type == "polynomial") {
    PolynomialDae s = polynomial_dae_from_json(j.at("system"));
    model.uncertainty = uncertainty_from_json(unc, s.n(), s.m(), s.l());
    model.uncertainty.check(s.n(), s.m(), s.l());
    model.system = std::move(s);
  } else {
    throw InputError("model: unknown type '" + type + "'");
  }
  return model;
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("model file '" + path + "': " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const json::exception& e) {
    throw InputError("model file '" + path + "': " + e.what());
  }
}

}  // namespace daecert::dae
