#ifndef CSA_IO_HPP
#define CSA_IO_HPP

#include "csa/types.hpp"

#include <string>

namespace csa {

/// Reads a rectangular numeric CSV into a matrix: file row i, column j maps
/// to entry (i, j). An optional first line "# d n" is validated against the
/// parsed shape. Ragged rows and non-numeric cells raise ParseError with the
/// offending line number.
Matrix parse_matrix_csv(const std::string& path);

/// Writes a matrix in the same format (no header line). Values round-trip
/// bit-exactly through parse_matrix_csv.
void write_matrix_csv(const std::string& path, const Matrix& m);

}  // namespace csa

#endif  // CSA_IO_HPP
