#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <variant>

#include "daecert/dae/linear_dae.hpp"
#include "daecert/dae/polynomial_dae.hpp"
#include "daecert/dae/uncertainty.hpp"

namespace daecert::dae {

/// Blocks "A", "B_v", "B_w", "B_xi", "F", "G_v", "G_w", "G_xi", "C", "D_v";
/// absent blocks are zero with dimensions inferred from the others.
LinearDae linear_dae_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LinearDae& sys);

/// {"kind": "none" | "pointwise" | "hard_iqc" | "sector", "M", "D",
///  "filter": {"A", "B", "C", "D"}, "margin"}.  Sector needs the system
/// dimensions.
UncertaintySpec uncertainty_from_json(const nlohmann::json& j, int n, int m, int l);

/// {"x": [...], "v": [...], "w": [...], "xi": [...], "f": [...], "g": [...],
///  "h": [...], "v0": [...]}.  Each polynomial is either a string such as
/// "x1^2 + (x2^2 + 5)*v" or {"vars": [...], "terms": [[[exps], coef], ...]}.
PolynomialDae polynomial_dae_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PolynomialDae& sys);

struct Model {
  std::variant<LinearDae, PolynomialDae> system;
  UncertaintySpec uncertainty;
  bool is_linear() const { return std::holds_alternative<LinearDae>(system); }
};

/// Model file: {"schema": 1, "type": "linear" | "polynomial", "system": {...},
/// "uncertainty": {...}}.  Throws InputError with the offending field.
Model model_from_json(const nlohmann::json& j);
Model load_model(const std::string& path);

}  // namespace daecert::dae
