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

// Two-stage dictionary learning: OMP sparse coding alternating with a MOD
// or K-SVD dictionary update.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ropdl/matrix.hpp"
#include "ropdl/random.hpp"

namespace ropdl {

enum class DictionaryUpdate { kMod, kKsvd };

struct TwoStageOptions {
  int atoms = 1;     ///< K
  int sparsity = 1;  ///< S, nonzeros per coefficient column
  int max_outer_iter = 500;
  std::uint64_t seed = 0;
  DictionaryUpdate method = DictionaryUpdate::kKsvd;
};

void validate(const TwoStageOptions& opts, Eigen::Index signal_dim);

/// Nonzeros of one coefficient column, in selection order. Indices are
/// 0-based and distinct.
struct SparseColumn {
  std::vector<Eigen::Index> support;
  std::vector<double> values;
};

struct SparseCode {
  Eigen::Index atoms = 0;
  std::vector<SparseColumn> columns;

  Mat to_dense() const;
};

/// Orthogonal matching pursuit. Each step picks the atom with the largest
/// |correlation| with the current residual (lowest index on ties), then
/// refits all selected coefficients by least squares (minimum-norm if the
/// support is rank deficient). Stops after S steps or once
/// ||residual|| <= 1e-12 ||y||.
///
/// Throws InvalidArgument if a column of D deviates from unit norm by more
/// than 1e-6 or S is outside [0, rows(D)].
SparseColumn omp(const Mat& d, const Vec& y, int sparsity);

/// omp on every column of Y.
SparseCode sparse_code(const Mat& d, const Mat& y, int sparsity);

struct ModResult {
  Mat D;  ///< unit-norm columns
  Mat X;  ///< input X with rows rescaled so that D X is unchanged
  std::vector<bool> reseeded;
};

/// D = Y X^T (X X^T)^{-1}, then columns normalized. If X X^T is singular a
/// ridge of 1e-10 trace(X X^T) / K is added; atoms that still come out zero
/// are replaced by seeded Gaussian unit columns with zero coefficients.
ModResult mod_update(const Mat& y, const Mat& x, Rng& rng);

/// One K-SVD sweep, k ascending. For each atom the residual without it,
/// restricted to the columns that use it, is replaced by its best rank-one
/// approximation. Atoms with empty support are re-seeded from the
/// worst-represented training column (largest residual norm).
/// Returns the number of re-seeded atoms.
int ksvd_update(const Mat& y, Mat& d, Mat& x);

struct TwoStageResult {
  DictionaryModel model;
  /// ||Y - D X||_F after each outer iteration.
  std::vector<double> trace;
  int reseeded_atoms = 0;
};

/// Seeded Gaussian normalized initial dictionary, then alternates
/// sparse_code and the chosen update for max_outer_iter iterations.
TwoStageResult run_two_stage(const Mat& y, const TwoStageOptions& opts);

std::string to_string(DictionaryUpdate method);

}  // namespace ropdl
