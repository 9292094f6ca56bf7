#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "daecert/core/matrix.hpp"

namespace daecert {

/// Row-major nested arrays; an empty matrix becomes [].
nlohmann::json matrix_to_json(const Matrix& m);
nlohmann::json vector_to_json(const Vector& v);

/// Accepts nested arrays, a flat array (read as a column) or a number
/// (1×1).  `what` names the field in error messages.
Matrix matrix_from_json(const nlohmann::json& j, const std::string& what);
Vector vector_from_json(const nlohmann::json& j, const std::string& what);

}  // namespace daecert
