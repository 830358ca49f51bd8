#include "mdt/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mdt::io {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path,
                                                bool skip_header) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first && skip_header) {
      first = false;
      continue;
    }
    first = false;
    if (trim(line).empty()) continue;
    rows.push_back(split_line(line));
  }
  return rows;
}

double parse_double(const std::string& raw, const std::filesystem::path& path,
                    std::size_t row, std::size_t col) {
  const std::string s = trim(raw);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw Error(path.string() + ": non-numeric cell at row " + std::to_string(row + 1) +
                ", column " + std::to_string(col + 1) + ": '" + s + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("format_double failed");
  return std::string(buf, ptr);
}

Matrix read_csv_matrix(const std::filesystem::path& path, bool skip_header) {
  const auto rows = read_rows(path, skip_header);
  if (rows.empty()) throw Error(path.string() + ": no data rows");
  const std::size_t cols = rows.front().size();
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw Error(path.string() + ": row " + std::to_string(r + 1) + " has " +
                  std::to_string(rows[r].size()) + " columns, expected " +
                  std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = parse_double(rows[r][c], path, r, c);
    }
  }
  return m;
}

std::vector<int> read_labels(const std::filesystem::path& path, bool skip_header) {
  const auto rows = read_rows(path, skip_header);
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 1) {
      throw Error(path.string() + ": labels file must have one column (row " +
                  std::to_string(r + 1) + ")");
    }
    const std::string s = trim(rows[r][0]);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      throw Error(path.string() + ": non-integer label at row " + std::to_string(r + 1) +
                  ", column 1: '" + s + "'");
    }
    labels.push_back(value);
  }
  return labels;
}

std::string matrix_to_csv(const Matrix& m, const std::vector<std::string>& header) {
  std::string out;
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) out += ',';
      out += header[c];
    }
    out += '\n';
  }
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace mdt::io
