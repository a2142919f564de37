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

#include "ropdl/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "ropdl/error.hpp"
#include "ropdl/parallel.hpp"
#include "ropdl/prox.hpp"

namespace ropdl {
namespace {

constexpr double kUnitNormSlack = 1e-6;

void require_unit_columns(const Mat& d) {
  for (Eigen::Index k = 0; k < d.cols(); ++k) {
    if (std::abs(d.col(k).norm() - 1.0) > kUnitNormSlack) {
      throw InvalidArgument("omp: dictionary column " + std::to_string(k) +
                            " is not unit norm");
    }
  }
}

SparseColumn omp_unchecked(const Mat& d, const Vec& y, int sparsity) {
  SparseColumn out;
  const double stop = 1e-12 * y.norm();
  Vec residual = y;
  Vec coef;
  std::vector<bool> chosen(static_cast<std::size_t>(d.cols()), false);

  for (int step = 0; step < sparsity; ++step) {
    if (residual.norm() <= stop) break;
    const Vec corr = d.transpose() * residual;
    Eigen::Index best = -1;
    double best_mag = -1.0;
    for (Eigen::Index k = 0; k < corr.size(); ++k) {
      if (chosen[static_cast<std::size_t>(k)]) continue;
      const double mag = std::abs(corr(k));
      if (mag > best_mag) {
        best_mag = mag;
        best = k;
      }
    }
    if (best < 0) break;
    chosen[static_cast<std::size_t>(best)] = true;
    out.support.push_back(best);

    Mat sub(d.rows(), static_cast<Eigen::Index>(out.support.size()));
    for (std::size_t j = 0; j < out.support.size(); ++j) {
      sub.col(static_cast<Eigen::Index>(j)) = d.col(out.support[j]);
    }
    coef = sub.completeOrthogonalDecomposition().solve(y);
    residual = y - sub * coef;
  }
  out.values.assign(coef.data(), coef.data() + coef.size());
  return out;
}

}  // namespace

void validate(const TwoStageOptions& opts, Eigen::Index signal_dim) {
  if (opts.atoms < 1) throw InvalidArgument("two-stage: K (atoms) must be >= 1");
  if (opts.sparsity < 1 || opts.sparsity > signal_dim) {
    throw InvalidArgument("two-stage: S must satisfy 1 <= S <= M (S=" +
                          std::to_string(opts.sparsity) +
                          ", M=" + std::to_string(signal_dim) + ")");
  }
  if (opts.max_outer_iter < 1) {
    throw InvalidArgument("two-stage: max_outer_iter must be >= 1");
  }
}

Mat SparseCode::to_dense() const {
  Mat x = Mat::Zero(atoms, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t n = 0; n < columns.size(); ++n) {
    const auto& col = columns[n];
    for (std::size_t j = 0; j < col.support.size(); ++j) {
      x(col.support[j], static_cast<Eigen::Index>(n)) = col.values[j];
    }
  }
  return x;
}

SparseColumn omp(const Mat& d, const Vec& y, int sparsity) {
  if (sparsity < 0 || sparsity > d.rows()) {
    throw InvalidArgument("omp: sparsity must be in [0, rows(D)]");
  }
  if (y.size() != d.rows()) throw InvalidArgument("omp: signal length mismatch");
  require_unit_columns(d);
  return omp_unchecked(d, y, sparsity);
}

SparseCode sparse_code(const Mat& d, const Mat& y, int sparsity) {
  if (sparsity < 0 || sparsity > d.rows()) {
    throw InvalidArgument("sparse_code: sparsity must be in [0, rows(D)]");
  }
  if (y.rows() != d.rows()) throw InvalidArgument("sparse_code: row mismatch");
  require_unit_columns(d);
  SparseCode code;
  code.atoms = d.cols();
  code.columns.resize(static_cast<std::size_t>(y.cols()));
  parallel_for(code.columns.size(), [&](std::size_t n) {
    code.columns[n] =
        omp_unchecked(d, y.col(static_cast<Eigen::Index>(n)), sparsity);
  });
  return code;
}

ModResult mod_update(const Mat& y, const Mat& x, Rng& rng) {
  if (x.cols() != y.cols()) throw InvalidArgument("mod_update: column mismatch");
  const auto k_count = x.rows();
  Mat gram = x * x.transpose();
  const Mat cross = y * x.transpose();

  Eigen::LLT<Mat> llt(gram);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-12)) {
    const double ridge = 1e-10 * gram.trace() / static_cast<double>(k_count);
    gram.diagonal().array() += ridge > 0.0 ? ridge : 1e-300;
    llt.compute(gram);
  }
  // D = Y X^T G^{-1}  <=>  G D^T = X Y^T (G symmetric).
  ModResult out;
  out.D = llt.solve(cross.transpose()).transpose();
  out.X = x;
  out.reseeded.assign(static_cast<std::size_t>(k_count), false);

  for (Eigen::Index k = 0; k < k_count; ++k) {
    const double norm = out.D.col(k).norm();
    if (!(norm > 1e-12) || !std::isfinite(norm)) {
      out.D.col(k) = rng.unit_vector(y.rows());
      out.X.row(k).setZero();
      out.reseeded[static_cast<std::size_t>(k)] = true;
      continue;
    }
    out.D.col(k) /= norm;
    out.X.row(k) *= norm;
  }
  return out;
}

int ksvd_update(const Mat& y, Mat& d, Mat& x) {
  if (d.rows() != y.rows() || x.cols() != y.cols() || d.cols() != x.rows()) {
    throw InvalidArgument("ksvd_update: dimension mismatch");
  }
  int reseeded = 0;
  for (Eigen::Index k = 0; k < d.cols(); ++k) {
    std::vector<Eigen::Index> used;
    for (Eigen::Index n = 0; n < x.cols(); ++n) {
      if (x(k, n) != 0.0) used.push_back(n);
    }

    if (used.empty()) {
      const Vec err = column_norms(y - d * x);
      Eigen::Index worst = 0;
      for (Eigen::Index n = 1; n < err.size(); ++n) {
        if (err(n) > err(worst)) worst = n;
      }
      if (err(worst) > 0.0) {
        Vec atom = (y - d * x).col(worst);
        atom /= atom.norm();
        d.col(k) = atom * canonical_sign(atom);
        ++reseeded;
      }
      continue;
    }

    const auto width = static_cast<Eigen::Index>(used.size());
    Mat restricted(y.rows(), width);
    for (Eigen::Index j = 0; j < width; ++j) {
      const Eigen::Index n = used[static_cast<std::size_t>(j)];
      restricted.col(j) = y.col(n) - d * x.col(n) + d.col(k) * x(k, n);
    }
    if ((restricted.array() == 0.0).all()) continue;

    const SingularTriple t = leading_singular_triple(restricted);
    d.col(k) = t.u;
    for (Eigen::Index j = 0; j < width; ++j) {
      x(k, used[static_cast<std::size_t>(j)]) = t.sigma * t.v(j);
    }
  }
  return reseeded;
}

TwoStageResult run_two_stage(const Mat& y, const TwoStageOptions& opts) {
  validate(opts, y.rows());
  require_finite(y, "training matrix");

  Rng rng(opts.seed);
  Mat d = normalize_columns(rng.gaussian_matrix(y.rows(), opts.atoms)).matrix;
  Mat x;
  TwoStageResult result;
  for (int it = 0; it < opts.max_outer_iter; ++it) {
    x = sparse_code(d, y, opts.sparsity).to_dense();
    if (opts.method == DictionaryUpdate::kMod) {
      ModResult updated = mod_update(y, x, rng);
      d = std::move(updated.D);
      x = std::move(updated.X);
      result.reseeded_atoms += static_cast<int>(
          std::count(updated.reseeded.begin(), updated.reseeded.end(), true));
    } else {
      result.reseeded_atoms += ksvd_update(y, d, x);
    }
    result.trace.push_back((y - d * x).norm());
  }
  result.model.D = std::move(d);
  result.model.X = std::move(x);
  result.model.dead.assign(static_cast<std::size_t>(opts.atoms), false);
  for (Eigen::Index k = 0; k < result.model.X.rows(); ++k) {
    result.model.dead[static_cast<std::size_t>(k)] =
        (result.model.X.row(k).array() == 0.0).all();
  }
  return result;
}

std::string to_string(DictionaryUpdate method) {
  return method == DictionaryUpdate::kMod ? "mod" : "ksvd";
}

}  // namespace ropdl
