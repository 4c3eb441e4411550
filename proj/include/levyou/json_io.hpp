#pragma once

#include "levyou/linalg.hpp"

#include <json.hpp>

#include <string>

namespace levyou {

using Json = nlohmann::json;

/// Row-major nested arrays. A bare number is accepted for 1x1 and a flat
/// array for a single column. `where` names the field in error messages.
Matrix matrix_from_json(const Json& j, const std::string& where);
Json matrix_to_json(const Matrix& m);
/// Flat array, or a bare number for length 1.
Vector vector_from_json(const Json& j, const std::string& where);
Json vector_to_json(const Vector& v);

/// JSON has no infinity; extended reals travel as the strings "inf"/"-inf".
Json real_to_json(double x);
double real_from_json(const Json& j, const std::string& where);

/// Parses a JSON document from disk; ConfigError on I/O or syntax errors.
Json read_json_file(const std::string& path);

}  // namespace levyou
