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

// Numerical kernels of the rank-one ADMM: column-wise group shrinkage,
// the leading singular triple with the induced rank-one projection, and a
// matrix-free conjugate-gradient solver.

#pragma once

#include <cstdint>
#include <functional>

#include "ropdl/matrix.hpp"

namespace ropdl {

/// Proximal map of tau * ||.||_{2,1}: column n becomes
/// (1 - tau / ||a_n||)_+ * a_n. Columns with norm <= tau are exactly zero.
/// Throws InvalidArgument unless tau > 0.
Mat group_shrink_columns(const Mat& a, double tau);

struct SingularTriple {
  double sigma = 0.0;
  Vec u;  ///< left, length rows(A); largest-magnitude entry positive
  Vec v;  ///< right, length cols(A)
  int iterations = 0;
  bool converged = false;
  /// max(||A v - sigma u||, ||A^T u - sigma v||) / ||A||_F at return.
  double relative_residual = 0.0;
};

struct PowerOptions {
  /// Stop once both singular-pair residuals are <= tol * ||A||_F. The
  /// default keeps sigma u v^T within about 1e-11 ||A||_F of the exact
  /// truncation.
  double tol = 1e-13;
  int max_iter = 1000;
  std::uint64_t seed = 0x5eedULL;
  /// Optional warm start for the iterated side (u when rows <= cols,
  /// otherwise v). Ignored when its size does not match.
  const Vec* start = nullptr;
};

/// Dominant singular triple by power iteration on the Gram matrix of the
/// smaller side (A A^T or A^T A). A few plain power steps run first; if they
/// have not converged the Gram matrix is repeatedly squared, which raises
/// the eigenvalue ratio to the power 2^t and makes near-ties tractable.
/// On non-convergence the iteration restarts once from another seeded
/// vector and the better of the two iterates is returned with
/// converged = false. Exactly tied leading values return some dominant
/// triple.
///
/// Throws DegenerateInput for the zero matrix and InvalidArgument for
/// non-finite input.
SingularTriple leading_singular_triple(const Mat& a,
                                       const PowerOptions& opts = {});

/// Best rank-one Frobenius approximation sigma_1 u_1 v_1^T. The zero
/// matrix maps to itself.
Mat rank_one_project(const Mat& a, const PowerOptions& opts = {});

struct CgReport {
  int iterations = 0;
  double final_residual_norm = 0.0;
  bool converged = false;
};

struct CgOptions {
  /// Relative: converged once ||apply(x) - b|| <= tol * ||b||.
  double tol = 1e-10;
  int max_iter = 1000;
};

struct CgResult {
  Vec x;
  CgReport report;
};

using LinearOperator = std::function<Vec(const Vec&)>;

/// Conjugate gradients for a symmetric positive-definite operator, starting
/// from x0 (zero when null). Returns the last iterate with
/// converged = false if max_iter is exhausted.
CgResult cg_solve(const LinearOperator& apply, const Vec& b,
                  const CgOptions& opts = {}, const Vec* x0 = nullptr);

}  // namespace ropdl
