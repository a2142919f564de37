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

#include "ropdl/prox.hpp"

#include <cmath>
#include <limits>

#include "ropdl/error.hpp"
#include "ropdl/random.hpp"

namespace ropdl {

Mat group_shrink_columns(const Mat& a, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("group_shrink_columns: tau must be > 0");
  Mat out(a.rows(), a.cols());
  for (Eigen::Index n = 0; n < a.cols(); ++n) {
    const double norm = a.col(n).norm();
    if (norm <= tau) {
      out.col(n).setZero();
    } else {
      out.col(n) = (1.0 - tau / norm) * a.col(n);
    }
  }
  return out;
}

namespace {

constexpr int kPlainPowerSteps = 8;

// For a unit iterate x of the Gram matrix G (= A A^T or A^T A) with
// lambda = x^T G x = sigma^2, ||G x - lambda x|| / sigma equals the
// singular-vector residual of the opposite side, e.g. ||A^T u - sigma v||
// with v = A^T u / sigma.
double gram_residual(const Mat& gram, const Vec& x) {
  const Vec gx = gram * x;
  const double lambda = x.dot(gx);
  if (!(lambda > 0.0)) return std::numeric_limits<double>::infinity();
  return (gx - lambda * x).norm() / std::sqrt(lambda);
}

struct GramIterate {
  Vec x;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

GramIterate iterate_gram(const Mat& gram, Vec x, double target, int max_iter) {
  GramIterate best{x, gram_residual(gram, x), 0, false};
  if (best.residual <= target) {
    best.converged = true;
    return best;
  }

  Mat powered;
  bool squaring = false;
  for (int it = 1; it <= max_iter; ++it) {
    if (it == kPlainPowerSteps + 1) {
      powered = gram / gram.norm();
      squaring = true;
    }
    Vec y = squaring ? Vec(powered * x) : Vec(gram * x);
    const double ny = y.norm();
    if (!(ny > 0.0) || !std::isfinite(ny)) break;
    y /= ny;
    const double change = (y - x).norm();
    x = std::move(y);

    const double res = gram_residual(gram, x);
    if (res < best.residual) best = {x, res, it, false};
    best.iterations = it;
    if (res <= target) {
      best.converged = true;
      return best;
    }
    if (squaring) {
      // Once the powered matrix has collapsed onto the dominant subspace
      // the iterate stops moving; further squaring cannot help.
      if (change <= 8.0 * std::numeric_limits<double>::epsilon()) break;
      powered = powered * powered;
      const double pn = powered.norm();
      if (!(pn > 0.0) || !std::isfinite(pn)) break;
      powered /= pn;
    }
  }
  return best;
}

}  // namespace

SingularTriple leading_singular_triple(const Mat& a, const PowerOptions& opts) {
  require_finite(a, "leading_singular_triple input");
  const double norm_a = a.norm();
  if (norm_a == 0.0) {
    throw DegenerateInput("leading_singular_triple: zero matrix has no dominant direction");
  }
  if (!(opts.tol > 0.0) || opts.max_iter < 1) {
    throw InvalidArgument("leading_singular_triple: need tol > 0 and max_iter >= 1");
  }

  // Iterate on the smaller side's Gram matrix.
  const bool left = a.rows() <= a.cols();
  const Mat gram = left ? Mat(a * a.transpose()) : Mat(a.transpose() * a);
  const Eigen::Index dim = gram.rows();
  const double target = opts.tol * norm_a;

  Vec start;
  if (opts.start != nullptr && opts.start->size() == dim &&
      opts.start->norm() > 0.0 && opts.start->allFinite()) {
    start = *opts.start / opts.start->norm();
  } else {
    start = Rng(opts.seed).unit_vector(dim);
  }

  GramIterate result = iterate_gram(gram, start, target, opts.max_iter);
  if (!result.converged) {
    Vec restart = Rng(derive_seed(opts.seed, 1)).unit_vector(dim);
    GramIterate second = iterate_gram(gram, restart, target, opts.max_iter);
    second.iterations += result.iterations;
    if (second.converged || second.residual < result.residual) {
      result = std::move(second);
    } else {
      result.iterations = second.iterations;
    }
  }

  SingularTriple t;
  if (left) {
    t.u = result.x;
    const Vec w = a.transpose() * t.u;
    t.sigma = w.norm();
    t.v = t.sigma > 0.0 ? Vec(w / t.sigma) : Vec(Vec::Zero(a.cols()));
  } else {
    t.v = result.x;
    const Vec w = a * t.v;
    t.sigma = w.norm();
    t.u = t.sigma > 0.0 ? Vec(w / t.sigma) : Vec(Vec::Zero(a.rows()));
  }
  const double sign = canonical_sign(t.u);
  t.u *= sign;
  t.v *= sign;
  t.iterations = result.iterations;
  t.converged = result.converged;
  t.relative_residual = result.residual / norm_a;
  return t;
}

Mat rank_one_project(const Mat& a, const PowerOptions& opts) {
  if (a.size() == 0 || (a.array() == 0.0).all()) {
    return Mat::Zero(a.rows(), a.cols());
  }
  const SingularTriple t = leading_singular_triple(a, opts);
  return t.sigma * t.u * t.v.transpose();
}

CgResult cg_solve(const LinearOperator& apply, const Vec& b,
                  const CgOptions& opts, const Vec* x0) {
  if (!(opts.tol > 0.0) || opts.max_iter < 0) {
    throw InvalidArgument("cg_solve: need tol > 0 and max_iter >= 0");
  }
  CgResult out;
  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    out.x = Vec::Zero(b.size());
    out.report.converged = true;
    return out;
  }

  Vec x = (x0 != nullptr && x0->size() == b.size()) ? *x0 : Vec(Vec::Zero(b.size()));
  Vec r = b - apply(x);
  Vec p = r;
  double rs = r.squaredNorm();
  const double target = opts.tol * b_norm;

  int it = 0;
  while (std::sqrt(rs) > target && it < opts.max_iter) {
    const Vec ap = apply(p);
    const double curvature = p.dot(ap);
    if (!(curvature > 0.0)) {
      throw InvalidArgument("cg_solve: operator is not positive definite");
    }
    const double alpha = rs / curvature;
    x += alpha * p;
    r -= alpha * ap;
    const double rs_next = r.squaredNorm();
    p = r + (rs_next / rs) * p;
    rs = rs_next;
    ++it;
  }

  out.x = std::move(x);
  out.report.iterations = it;
  out.report.final_residual_norm = std::sqrt(rs);
  out.report.converged = out.report.final_residual_norm <= target;
  return out;
}

}  // namespace ropdl
