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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ropdl/matrix.hpp"

namespace ropdl {

// "matcsv" text format:
//
//   rows,cols
//   a11,a12,...,a1c
//   ...
//   ar1,ar2,...,arc
//
// Rows are written in order, entries with 17 significant digits ("%.17g"),
// so a write/read round trip is bit-exact. Parse failures throw ParseError
// carrying the 1-based line number.

void write_matcsv(std::ostream& out, const Mat& a);
void write_matcsv(const std::filesystem::path& path, const Mat& a);

Mat read_matcsv(std::istream& in);
Mat read_matcsv(const std::filesystem::path& path);

/// One value formatted exactly as matcsv writes it.
std::string format_real(double value);

}  // namespace ropdl
