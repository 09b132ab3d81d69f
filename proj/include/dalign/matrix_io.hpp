#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "dalign/types.hpp"

namespace dalign {

// Matrix text format: a "rows cols" header line followed by the rows as
// whitespace-separated decimals. Lines whose first non-blank character is '#'
// are comments. Values are written with 17 significant digits.

MatrixXd read_matrix(std::istream& in);
MatrixXd read_matrix_file(const std::filesystem::path& path);

void write_matrix(std::ostream& out, const MatrixXd& m);
void write_matrix_file(const std::filesystem::path& path, const MatrixXd& m);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_shortest(double value);

}  // namespace dalign
