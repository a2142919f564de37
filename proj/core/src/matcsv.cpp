// Copyright 2026 The ropdl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ropdl/matcsv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "ropdl/error.hpp"

namespace ropdl {
namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view field, std::size_t line_no) {
  field = trim(field);
  // strtod accepts the full "%.17g" output including exponents.
  std::string buf(field);
  char* end = nullptr;
  const double value = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size()) {
    throw ParseError("matcsv line " + std::to_string(line_no) +
                         ": invalid number '" + buf + "'",
                     line_no);
  }
  if (!std::isfinite(value)) {
    throw ParseError("matcsv line " + std::to_string(line_no) + ": non-finite value '" +
                         buf + "'",
                     line_no);
  }
  return value;
}

long parse_count(std::string_view field, std::size_t line_no) {
  field = trim(field);
  long value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || value < 1) {
    throw ParseError("matcsv line " + std::to_string(line_no) +
                         ": expected a positive count, got '" +
                         std::string(field) + "'",
                     line_no);
  }
  return value;
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_matcsv(std::ostream& out, const Mat& a) {
  out << a.rows() << ',' << a.cols() << '\n';
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_real(a(r, c));
    }
    out << '\n';
  }
}

void write_matcsv(const std::filesystem::path& path, const Mat& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_matcsv(out, a);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Mat read_matcsv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("matcsv: empty input", 1);
  const auto header = split_commas(line);
  if (header.size() != 2) {
    throw ParseError("matcsv line 1: header must be 'rows,cols'", 1);
  }
  const long rows = parse_count(header[0], 1);
  const long cols = parse_count(header[1], 1);

  Mat a(rows, cols);
  for (long r = 0; r < rows; ++r) {
    ++line_no;
    if (!std::getline(in, line)) {
      throw ParseError("matcsv line " + std::to_string(line_no) +
                           ": expected " + std::to_string(rows) +
                           " data rows, file ended",
                       line_no);
    }
    const auto fields = split_commas(line);
    if (static_cast<long>(fields.size()) != cols) {
      throw ParseError("matcsv line " + std::to_string(line_no) + ": expected " +
                           std::to_string(cols) + " values, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (long c = 0; c < cols; ++c) a(r, c) = parse_double(fields[c], line_no);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      throw ParseError("matcsv line " + std::to_string(line_no) +
                           ": unexpected data after last row",
                       line_no);
    }
  }
  if (!a.allFinite()) throw ParseError("matcsv: non-finite value", line_no);
  return a;
}

Mat read_matcsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_matcsv(in);
}

}  // namespace ropdl
