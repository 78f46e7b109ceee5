#pragma once

#include <string>

#include "mcd/linalg.hpp"

namespace mcd {

/// Load a comma-separated numeric table: one observation per row, decimal
/// point, no header unless skip_header. Throws Error on unreadable files and
/// ParseError (with line number) on malformed rows.
Matrix load_csv(const std::string& path, bool skip_header = false);

}  // namespace mcd
