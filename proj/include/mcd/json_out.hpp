#pragma once

#include <string>

#include <json.hpp>

#include "mcd/elliptical.hpp"
#include "mcd/linalg.hpp"

namespace mcd {

using Json = nlohmann::ordered_json;

/// Serialize with every number printed at 17 significant digits, so the
/// text round-trips 64-bit floats exactly and reruns diff byte-identical.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);  // row-major nested arrays

/// Flat constants object with the documented key names.
Json constants_json(const EllipticalConstants& c);

}  // namespace mcd
