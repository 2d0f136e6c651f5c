// SPDX-FileCopyrightText: © 2026 The ELMA Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "elma/matrix.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace elma {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_field(std::string_view field, std::size_t line_no) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() ||
      ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw FormatError("matrix csv line " + std::to_string(line_no) +
                      ": bad number '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::uint64_t Rng::derive(std::uint64_t base, std::uint64_t i,
                          std::uint64_t j) {
  return splitmix64(base ^ splitmix64(splitmix64(i) + 0x632be59bd9b4e019ULL * j));
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<double> data;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    Index n = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      data.push_back(parse_field(rest.substr(0, comma), line_no));
      ++n;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols >= 0 && n != cols) {
      throw FormatError("matrix csv line " + std::to_string(line_no) +
                        ": expected " + std::to_string(cols) + " fields, got " +
                        std::to_string(n));
    }
    cols = n;
    ++rows;
  }
  if (rows == 0) throw FormatError("matrix csv: no data");
  return make_matrix<double>(rows, cols, data);
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return read_matrix_csv(in);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace elma
