#pragma once

#include "mdt/common.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mdt::io {

/// Shortest round-trip decimal representation, independent of locale.
std::string format_double(double value);

/// Reads a dense numeric CSV (comma separated). Errors name row and column.
Matrix read_csv_matrix(const std::filesystem::path& path, bool skip_header = false);

/// Reads a single-column CSV of integers.
std::vector<int> read_labels(const std::filesystem::path& path, bool skip_header = false);

std::string matrix_to_csv(const Matrix& m, const std::vector<std::string>& header = {});

/// Writes `contents` to a sibling temporary file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& contents);

inline void write_csv_matrix(const std::filesystem::path& path, const Matrix& m,
                             const std::vector<std::string>& header = {}) {
  write_text_atomic(path, matrix_to_csv(m, header));
}

}  // namespace mdt::io
