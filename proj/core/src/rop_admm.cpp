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

#include "ropdl/rop_admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ropdl/error.hpp"
#include "ropdl/matcsv.hpp"
#include "ropdl/parallel.hpp"
#include "ropdl/random.hpp"

namespace ropdl {
namespace {

bool is_zero(const Mat& a) { return (a.array() == 0.0).all(); }

// Fixed k order so the reduction is identical at any thread count.
Mat sum_blocks(const std::vector<Mat>& blocks) {
  Mat total = blocks.front();
  for (std::size_t k = 1; k < blocks.size(); ++k) total += blocks[k];
  return total;
}

void check_dims(const AdmmState& state, const Mat& y) {
  const auto k = state.P.size();
  if (k == 0 || state.Q.size() != k || state.Z.size() != k ||
      state.L1.size() != k || state.L2.size() != k) {
    throw InvalidArgument("ADMM state has inconsistent block counts");
  }
  if (state.L0.rows() != y.rows() || state.L0.cols() != y.cols() ||
      state.P.front().rows() != y.rows() || state.P.front().cols() != y.cols()) {
    throw InvalidArgument("ADMM state dimensions do not match Y");
  }
}

int default_cg_iterations(const AdmmState& state) {
  const double dof = 10.0 * static_cast<double>(state.P.size()) *
                     static_cast<double>(state.P.front().size());
  return static_cast<int>(std::min(dof, 1000.0));
}

}  // namespace

void validate(const RopOptions& opts) {
  if (opts.atoms < 1) throw InvalidArgument("ROP: K (atoms) must be >= 1");
  if (!(opts.rho > 0.0) || !std::isfinite(opts.rho)) {
    throw InvalidArgument("ROP: rho must be a positive finite number");
  }
  if (opts.max_iter < 1) throw InvalidArgument("ROP: max_iter must be >= 1");
  if (!(opts.primal_tol >= 0.0) || !std::isfinite(opts.primal_tol)) {
    throw InvalidArgument("ROP: primal_tol must be >= 0");
  }
  if (!(opts.cg_tol > 0.0) || opts.cg_max_iter < 0) {
    throw InvalidArgument("ROP: cg_tol must be > 0 and cg_max_iter >= 0");
  }
  if (opts.warmup_iters < 0 || !(opts.warmup_factor >= 1.0) ||
      !std::isfinite(opts.warmup_factor)) {
    throw InvalidArgument("ROP: need warmup_iters >= 0 and warmup_factor >= 1");
  }
}

double effective_penalty(const Mat& y, const RopOptions& opts) {
  if (opts.penalty_scaling == PenaltyScaling::kAbsolute) return opts.rho;
  const double samples_per_atom =
      static_cast<double>(y.cols()) / static_cast<double>(opts.atoms);
  return opts.rho * kRelativePenaltyScale * std::sqrt(samples_per_atom) / y.norm();
}

double warmup_penalty(double target, const RopOptions& opts, int iteration) {
  const int span = std::min(opts.warmup_iters, opts.max_iter);
  if (span <= 0 || iteration >= span) return target;
  const double remaining = 1.0 - static_cast<double>(iteration) / span;
  return target * std::pow(opts.warmup_factor, remaining);
}

void set_penalty(AdmmState& state, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw InvalidArgument("set_penalty: rho must be a positive finite number");
  }
  // Scaled multipliers are Lambda / rho.
  const double ratio = state.rho / rho;
  if (ratio == 1.0) return;
  state.L0 *= ratio;
  for (auto& l : state.L1) l *= ratio;
  for (auto& l : state.L2) l *= ratio;
  state.rho = rho;
}

double Residuals::max_primal() const {
  return std::max({data_residual, pq_residual, pz_residual});
}

bool Residuals::finite() const {
  return std::isfinite(data_residual) && std::isfinite(pq_residual) &&
         std::isfinite(pz_residual) && std::isfinite(objective);
}

AdmmState init_state(const Mat& y, const RopOptions& opts) {
  validate(opts);
  require_finite(y, "training matrix");
  const double norm_y = y.norm();
  if (norm_y == 0.0) throw InvalidArgument("ROP: training matrix is zero");

  const auto m = y.rows();
  const auto n = y.cols();
  const auto k_count = static_cast<std::size_t>(opts.atoms);
  const double scale = norm_y / opts.atoms;

  AdmmState s;
  s.rho = warmup_penalty(effective_penalty(y, opts), opts, 0);
  s.L0 = Mat::Zero(m, n);
  Rng rng(opts.seed);
  for (std::size_t k = 0; k < k_count; ++k) {
    const Vec u = rng.unit_vector(m);
    const Vec v = rng.unit_vector(n);
    s.Z.push_back(scale * u * v.transpose());
    s.z_direction.push_back(m <= n ? u : v);
  }
  s.P = s.Z;
  s.Q = s.Z;
  s.L1.assign(k_count, Mat::Zero(m, n));
  s.L2.assign(k_count, Mat::Zero(m, n));
  return s;
}

std::optional<CgReport> p_update(AdmmState& state, const Mat& y,
                                 PUpdateMode mode, const CgOptions& cg) {
  check_dims(state, y);
  const auto k_count = state.P.size();
  const double k_real = static_cast<double>(k_count);
  const Mat data_target = y - state.L0;

  // Right-hand sides R_k of the stationarity system 2 P_k + sum_j P_j = R_k.
  std::vector<Mat> rhs(k_count);
  parallel_for(k_count, [&](std::size_t k) {
    rhs[k] = data_target + (state.Q[k] - state.L1[k]) + (state.Z[k] - state.L2[k]);
  });

  if (mode == PUpdateMode::kClosedForm) {
    const Mat total = sum_blocks(rhs) / (k_real + 2.0);
    parallel_for(k_count, [&](std::size_t k) {
      state.P[k] = 0.5 * (rhs[k] - total);
    });
    return std::nullopt;
  }

  const auto m = y.rows();
  const auto n = y.cols();
  const Eigen::Index block = m * n;
  Vec b(block * static_cast<Eigen::Index>(k_count));
  Vec x0(b.size());
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto offset = static_cast<Eigen::Index>(k) * block;
    b.segment(offset, block) = rhs[k].reshaped();
    x0.segment(offset, block) = state.P[k].reshaped();
  }
  // Half the Hessian of the P objective: (H x)_k = 2 x_k + sum_j x_j.
  auto apply = [&](const Vec& x) -> Vec {
    Vec total = x.segment(0, block);
    for (std::size_t k = 1; k < k_count; ++k) {
      total += x.segment(static_cast<Eigen::Index>(k) * block, block);
    }
    Vec out(x.size());
    for (std::size_t k = 0; k < k_count; ++k) {
      const auto offset = static_cast<Eigen::Index>(k) * block;
      out.segment(offset, block) = 2.0 * x.segment(offset, block) + total;
    }
    return out;
  };
  CgOptions options = cg;
  if (options.max_iter == 0) options.max_iter = default_cg_iterations(state);
  CgResult solved = cg_solve(apply, b, options, &x0);
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto offset = static_cast<Eigen::Index>(k) * block;
    state.P[k] = solved.x.segment(offset, block).reshaped(m, n);
  }
  if (!solved.report.converged) ++state.cg_failures;
  return solved.report;
}

void q_update(AdmmState& state) {
  const double tau = 1.0 / state.rho;
  parallel_for(state.P.size(), [&](std::size_t k) {
    state.Q[k] = group_shrink_columns(state.P[k] + state.L1[k], tau);
  });
}

void z_update(AdmmState& state) {
  parallel_for(state.P.size(), [&](std::size_t k) {
    const Mat target = state.P[k] + state.L2[k];
    if (is_zero(target)) {
      state.Z[k].setZero(target.rows(), target.cols());
      return;
    }
    PowerOptions opts;
    opts.seed = derive_seed(0x5eedULL, k);
    if (k < state.z_direction.size()) opts.start = &state.z_direction[k];
    const SingularTriple t = leading_singular_triple(target, opts);
    state.Z[k] = t.sigma * t.u * t.v.transpose();
    if (k < state.z_direction.size()) {
      state.z_direction[k] = target.rows() <= target.cols() ? t.u : t.v;
    }
  });
}

void dual_update(AdmmState& state, const Mat& y) {
  check_dims(state, y);
  state.L0 += sum_blocks(state.P) - y;
  parallel_for(state.P.size(), [&](std::size_t k) {
    state.L1[k] += state.P[k] - state.Q[k];
    state.L2[k] += state.P[k] - state.Z[k];
  });
}

Residuals residuals(const AdmmState& state, const Mat& y) {
  check_dims(state, y);
  const double norm_y = y.norm();
  Residuals r;
  r.data_residual = (sum_blocks(state.P) - y).norm() / norm_y;
  for (std::size_t k = 0; k < state.P.size(); ++k) {
    r.pq_residual = std::max(r.pq_residual, (state.P[k] - state.Q[k]).norm() / norm_y);
    r.pz_residual = std::max(r.pz_residual, (state.P[k] - state.Z[k]).norm() / norm_y);
    r.objective += group_l21_norm(state.Q[k]);
  }
  // std::max drops NaN; carry it through explicitly.
  for (std::size_t k = 0; k < state.P.size(); ++k) {
    if (!state.P[k].allFinite() || !state.Q[k].allFinite() || !state.Z[k].allFinite()) {
      r.pq_residual = r.pz_residual = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return r;
}

ExtractedFactors extract_factors(std::span<const Mat> z, std::uint64_t seed) {
  if (z.empty()) throw InvalidArgument("extract_factors: no blocks");
  const auto m = z.front().rows();
  const auto n = z.front().cols();
  const auto k_count = static_cast<Eigen::Index>(z.size());

  ExtractedFactors out;
  out.model.D.resize(m, k_count);
  out.model.X.resize(k_count, n);
  out.model.dead.assign(z.size(), false);
  out.atoms.resize(z.size());

  for (Eigen::Index k = 0; k < k_count; ++k) {
    const Mat& block = z[static_cast<std::size_t>(k)];
    if (block.rows() != m || block.cols() != n) {
      throw InvalidArgument("extract_factors: blocks differ in shape");
    }
    RankOneAtom& atom = out.atoms[static_cast<std::size_t>(k)];
    if (is_zero(block)) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
      atom.u = rng.unit_vector(m);
      atom.u *= canonical_sign(atom.u);
      atom.v = rng.unit_vector(n);
      atom.sigma = 0.0;
      out.model.D.col(k) = atom.u;
      out.model.X.row(k).setZero();
      out.model.dead[static_cast<std::size_t>(k)] = true;
      continue;
    }
    const SingularTriple t = leading_singular_triple(block);
    const double remainder = (block - t.sigma * t.u * t.v.transpose()).norm();
    if (remainder > 1e-8 * block.norm()) {
      throw ContractViolation("extract_factors: block " + std::to_string(k) +
                              " is not rank one (remainder " +
                              format_real(remainder / block.norm()) + ")");
    }
    atom.sigma = t.sigma;
    atom.u = t.u;
    atom.v = t.v;
    out.model.D.col(k) = t.u;
    out.model.X.row(k) = t.sigma * t.v.transpose();
  }
  return out;
}

RopResult run_rop(const Mat& y, const RopOptions& opts) {
  AdmmState state = init_state(y, opts);
  CgOptions cg{opts.cg_tol, opts.cg_max_iter};

  RopResult result;
  result.penalty = effective_penalty(y, opts);
  for (int it = 1; it <= opts.max_iter; ++it) {
    set_penalty(state, warmup_penalty(result.penalty, opts, it));
    p_update(state, y, opts.p_update_mode, cg);
    q_update(state);
    z_update(state);
    dual_update(state, y);
    state.iter = it;

    const Residuals r = residuals(state, y);
    if (!r.finite() || !state.L0.allFinite()) {
      throw Diverged("ROP iterate became non-finite", it);
    }
    if (opts.record_trace) result.trace.push_back(r);
    result.residuals = r;
    result.iterations_run = it;
    if (r.max_primal() <= opts.primal_tol) {
      result.converged = true;
      break;
    }
  }

  ExtractedFactors factors =
      extract_factors(state.Z, derive_seed(opts.seed, 0xdeadULL));
  result.model = std::move(factors.model);
  result.atoms = std::move(factors.atoms);
  result.cg_failures = state.cg_failures;
  return result;
}

void write_trace(std::ostream& out, std::span<const Residuals> trace) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Residuals& r = trace[i];
    out << (i + 1) << ',' << format_real(r.data_residual) << ','
        << format_real(r.pq_residual) << ',' << format_real(r.pz_residual) << ','
        << format_real(r.objective) << '\n';
  }
}

std::string to_string(PUpdateMode mode) {
  return mode == PUpdateMode::kClosedForm ? "closed_form" : "cg";
}

std::string to_string(PenaltyScaling scaling) {
  return scaling == PenaltyScaling::kRelative ? "relative" : "absolute";
}

}  // namespace ropdl
