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

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ropdl {

/// Dense real matrix. Storage is Eigen's default column-major order; every
/// file format in this project serializes row by row regardless.
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Z = sigma * u * v^T with unit u and v. The largest-magnitude entry of u
/// is positive (lowest index wins ties).
struct RankOneAtom {
  double sigma = 0.0;
  Vec u;
  Vec v;
};

/// Dictionary D (M x K, unit-norm columns) and coefficients X (K x N).
/// Atoms that carried no energy are kept as seeded unit columns with a zero
/// coefficient row and flagged in `dead`; D never holds a zero column.
struct DictionaryModel {
  Mat D;
  Mat X;
  std::vector<bool> dead;

  std::size_t atom_count() const { return static_cast<std::size_t>(D.cols()); }
  std::size_t dead_count() const;
  Mat reconstruction() const { return D * X; }
};

/// l2 norm of every column.
Vec column_norms(const Mat& a);

struct NormalizedColumns {
  Mat matrix;
  /// Original column norms; 0 marks a zero column that was passed through.
  Vec scales;
};

/// Scales nonzero columns to unit l2 norm. Zero columns pass through
/// unchanged with scale 0.
NormalizedColumns normalize_columns(const Mat& a);

/// Sum of column l2 norms (the l2,1 group norm).
double group_l21_norm(const Mat& a);

bool all_finite(const Mat& a);

/// Throws InvalidArgument naming `what` if `a` has a NaN or Inf entry.
void require_finite(const Mat& a, std::string_view what);

/// Returns +1 or -1 such that multiplying `u` by it makes its
/// largest-magnitude entry positive. Ties go to the lowest index; a zero
/// vector yields +1.
double canonical_sign(const Vec& u);

}  // namespace ropdl
