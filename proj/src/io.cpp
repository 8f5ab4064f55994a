#include "csa/io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace csa {

namespace {

bool parse_cell(const std::string& cell, double& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(end[-1]))) {
    --end;
  }
  if (begin == end) {
    return false;
  }
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

Matrix parse_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInput("parse_matrix_csv: cannot open " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_number = 0;
  long declared_rows = -1;
  long declared_cols = -1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (line[0] == '#') {
      if (line_number == 1) {
        std::istringstream hdr(line.substr(1));
        if (!(hdr >> declared_rows >> declared_cols)) {
          declared_rows = declared_cols = -1;
        }
      }
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double value = 0.0;
      if (!parse_cell(cell, value)) {
        throw ParseError("parse_matrix_csv: non-numeric cell '" + cell + "'",
                         line_number);
      }
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("parse_matrix_csv: ragged row", line_number);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw InvalidInput("parse_matrix_csv: no data rows in " + path);
  }
  const Index r = static_cast<Index>(rows.size());
  const Index c = static_cast<Index>(rows.front().size());
  if (declared_rows >= 0 &&
      (declared_rows != r || declared_cols != c)) {
    throw ParseError("parse_matrix_csv: header shape does not match data", 1);
  }
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) {
      m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
  }
  require_finite(m, "parse_matrix_csv");
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidInput("write_matrix_csv: cannot open " + path);
  }
  char buffer[64];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      // %.17g round-trips doubles exactly.
      std::snprintf(buffer, sizeof(buffer), "%.17g", m(i, j));
      out << buffer;
      if (j + 1 < m.cols()) {
        out << ',';
      }
    }
    out << '\n';
  }
}

}  // namespace csa
