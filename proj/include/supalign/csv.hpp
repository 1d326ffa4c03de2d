#pragma once

#include <filesystem>
#include <string>

#include "supalign/linalg.hpp"

namespace supalign::csv {

/// Parses a header-free CSV of decimal numbers. All rows must have the same
/// number of fields. Throws io (unreadable) or schema (malformed) errors.
Matrix read_matrix(const std::filesystem::path& path);
Matrix parse_matrix(const std::string& text, const std::string& origin = "<memory>");

/// Shortest round-trip decimal representation, comma separated, LF endings.
std::string format_matrix(const Matrix& m);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

/// Shortest representation of a single value (what format_matrix uses per cell).
std::string format_number(double value);

}  // namespace supalign::csv
