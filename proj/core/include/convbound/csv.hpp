#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "convbound/dense_matrix.hpp"

namespace convbound {

// Shortest decimal string that reproduces the double exactly on read-back
// (17 significant digits).
std::string format_full(double v);

// One CSV row, LF-terminated; fields are written verbatim.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Writes a matrix as CSV with a c0..c{n-1} header row.
void write_csv_matrix(std::ostream& out, const DenseMatrix& m);

// Reads a numeric CSV matrix. When the first row is non-numeric it is
// treated as a header and skipped. All rows must have equal width.
DenseMatrix read_csv_matrix(const std::filesystem::path& path);

// Reads one positive integer per non-empty line.
std::vector<std::size_t> read_labels(const std::filesystem::path& path);

}  // namespace convbound
