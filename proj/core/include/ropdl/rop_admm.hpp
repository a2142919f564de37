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

// Rank-one projection (ROP) dictionary learning.
//
// The training matrix Y (M x N) is written as a sum of K rank-one blocks
// Z_k, each with few nonzero columns:
//
//   min  sum_k ||Q_k||_{2,1}
//   s.t. Y = sum_k P_k,  Q_k = P_k,  Z_k = P_k,  rank(Z_k) <= 1.
//
// The solver is scaled-form ADMM with multipliers L0 (for Y = sum P_k),
// L1_k (Q_k = P_k) and L2_k (Z_k = P_k). One iteration is
//
//   P  <- argmin ||sum P_k - Y + L0||^2 + sum ||P_k - Q_k + L1_k||^2
//                                      + sum ||P_k - Z_k + L2_k||^2
//   Q_k <- group_shrink_columns(P_k + L1_k, 1 / rho)
//   Z_k <- rank_one_project(P_k + L2_k)
//   L0 += sum P_k - Y;  L1_k += P_k - Q_k;  L2_k += P_k - Z_k
//
// and the dictionary is read off the final Z_k by their singular triples.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ropdl/matrix.hpp"
#include "ropdl/prox.hpp"

namespace ropdl {

enum class PUpdateMode {
  kClosedForm,  ///< exact block solve, O(K M N)
  kCg,          ///< conjugate gradients on the stacked K M N system
};

/// How `RopOptions::rho` maps to the penalty the iteration uses.
inline constexpr double kRelativePenaltyScale = 144.0;

enum class PenaltyScaling {
  /// penalty = 144 rho sqrt(N / K) / ||Y||_F, i.e. the column-shrink
  /// threshold 1 / penalty is the RMS column norm of Y times
  /// sqrt(K) / (144 rho). Makes rho dimensionless: scaling Y by c scales
  /// every iterate by c and leaves the recovered dictionary alone. The
  /// sqrt(K) keeps rho = 1 usable from K ~ 10 up to K ~ N.
  kRelative,
  /// penalty = rho, in the units of Y.
  kAbsolute,
};

struct RopOptions {
  int atoms = 1;  ///< K
  double rho = 1.0;
  PenaltyScaling penalty_scaling = PenaltyScaling::kRelative;
  int max_iter = 500;
  /// Stop when all three primal residuals (relative to ||Y||_F) are <= this.
  double primal_tol = 1e-6;
  std::uint64_t seed = 0;
  PUpdateMode p_update_mode = PUpdateMode::kClosedForm;
  bool record_trace = false;
  /// CG settings for PUpdateMode::kCg. cg_max_iter = 0 selects
  /// min(10 K M N, 1000).
  double cg_tol = 1e-10;
  int cg_max_iter = 0;
  /// The penalty starts at warmup_factor times its target and decays
  /// geometrically to the target over the first warmup_iters iterations.
  /// A larger early penalty keeps the blocks from locking into a wrong
  /// split before the multipliers settle. 0 iterations disables it.
  int warmup_iters = 100;
  double warmup_factor = 2.0;
};

/// Throws InvalidArgument on K < 1, rho <= 0, max_iter < 1, negative or
/// non-finite tolerances.
void validate(const RopOptions& opts);

/// The target penalty for Y under `opts` (reached after the warm-up).
double effective_penalty(const Mat& y, const RopOptions& opts);

/// Penalty in force during iteration `iteration` (0 = initial state).
double warmup_penalty(double target, const RopOptions& opts, int iteration);

struct AdmmState {
  std::vector<Mat> P, Q, Z;
  Mat L0;
  std::vector<Mat> L1, L2;
  double rho = 1.0;  ///< effective penalty; Q-update threshold is 1 / rho
  int iter = 0;
  /// Warm starts for the rank-one projections: the dominant singular vector
  /// of the smaller side of each Z_k from the previous Z-update.
  std::vector<Vec> z_direction;
  /// Number of P-updates whose CG solve did not reach cg_tol.
  int cg_failures = 0;

  int atoms() const { return static_cast<int>(P.size()); }
};

/// Changes the penalty, rescaling the scaled multipliers so the unscaled
/// ones are unchanged.
void set_penalty(AdmmState& state, double rho);

struct Residuals {
  double data_residual = 0.0;  ///< ||sum P_k - Y||_F / ||Y||_F
  double pq_residual = 0.0;    ///< max_k ||P_k - Q_k||_F / ||Y||_F
  double pz_residual = 0.0;    ///< max_k ||P_k - Z_k||_F / ||Y||_F
  double objective = 0.0;      ///< sum_k ||Q_k||_{2,1}

  double max_primal() const;
  bool finite() const;
};

struct RopResult {
  DictionaryModel model;
  std::vector<RankOneAtom> atoms;
  Residuals residuals;
  std::vector<Residuals> trace;  ///< one entry per iteration when recorded
  int iterations_run = 0;
  double penalty = 0.0;  ///< target penalty, in force after the warm-up
  bool converged = false;  ///< primal_tol reached before max_iter
  int cg_failures = 0;
};

/// Seeded random rank-one start: Z_k = (||Y||_F / K) u_k v_k^T with
/// independent Gaussian unit u_k, v_k; P = Q = Z; multipliers zero.
/// Throws InvalidArgument for a zero or non-finite Y or invalid options.
AdmmState init_state(const Mat& y, const RopOptions& opts);

/// Joint minimization over all P_k. The closed form follows from the
/// stationarity conditions 2 P_k + sum_j P_j = R_k with
/// R_k = (Y - L0) + (Q_k - L1_k) + (Z_k - L2_k), giving
/// sum_j P_j = sum_k R_k / (K + 2) and P_k = (R_k - sum_j P_j) / 2.
/// CG mode solves the same system matrix-free and returns its report.
std::optional<CgReport> p_update(AdmmState& state, const Mat& y,
                                 PUpdateMode mode = PUpdateMode::kClosedForm,
                                 const CgOptions& cg = {});

void q_update(AdmmState& state);
void z_update(AdmmState& state);
void dual_update(AdmmState& state, const Mat& y);

Residuals residuals(const AdmmState& state, const Mat& y);

struct ExtractedFactors {
  DictionaryModel model;
  std::vector<RankOneAtom> atoms;
};

/// D(:,k) = u_k and X(k,:) = sigma_k v_k^T from each Z_k. An all-zero Z_k
/// becomes a dead atom: a seeded random unit column (from `seed`, k) with a
/// zero coefficient row. Throws ContractViolation if some Z_k is not rank
/// one, i.e. ||Z_k - sigma_1 u_1 v_1^T||_F > 1e-8 ||Z_k||_F.
ExtractedFactors extract_factors(std::span<const Mat> z, std::uint64_t seed = 0);

/// Full solve. Deterministic for fixed (Y, opts) at any thread count.
/// Throws InvalidArgument for invalid input and Diverged if an iterate
/// turns non-finite.
RopResult run_rop(const Mat& y, const RopOptions& opts);

/// Writes `iter,data_residual,pq_residual,pz_residual,objective` lines,
/// iterations numbered from 1, no header.
void write_trace(std::ostream& out, std::span<const Residuals> trace);

std::string to_string(PUpdateMode mode);
std::string to_string(PenaltyScaling scaling);

}  // namespace ropdl
