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

#include "ropdl/superres.hpp"

#include <string>

#include "ropdl/baselines.hpp"
#include "ropdl/error.hpp"
#include "ropdl/parallel.hpp"

namespace ropdl {
namespace {

std::string dims(const GrayImage& img) {
  return std::to_string(img.height()) + "x" + std::to_string(img.width());
}

Eigen::Index stacked_rows(int low_patch_size) {
  const Eigen::Index p = low_patch_size;
  return p * p + 4 * p * p;
}

}  // namespace

GrayImage downsample_2x2(const GrayImage& img) {
  if (img.height() % 2 != 0 || img.width() % 2 != 0 || img.height() == 0) {
    throw InvalidArgument("downsample_2x2: dimensions must be even, got " + dims(img));
  }
  GrayImage out(img.height() / 2, img.width() / 2);
  for (Eigen::Index r = 0; r < out.height(); ++r) {
    for (Eigen::Index c = 0; c < out.width(); ++c) {
      out.pixels(r, c) = 0.25 * img.pixels.block<2, 2>(2 * r, 2 * c).sum();
    }
  }
  return out;
}

GrayImage upsample_nearest_2x(const GrayImage& img) {
  GrayImage out(2 * img.height(), 2 * img.width());
  for (Eigen::Index r = 0; r < out.height(); ++r) {
    for (Eigen::Index c = 0; c < out.width(); ++c) {
      out.pixels(r, c) = img.pixels(r / 2, c / 2);
    }
  }
  return out;
}

PatchGrid extract_patches(const GrayImage& img, int patch_size, int stride) {
  if (patch_size < 1 || stride < 1) {
    throw InvalidArgument("extract_patches: patch size and stride must be >= 1");
  }
  if (patch_size > img.height() || patch_size > img.width()) {
    throw InvalidArgument("extract_patches: patch " + std::to_string(patch_size) +
                          " does not fit image " + dims(img));
  }
  PatchGrid grid;
  grid.patch_size = patch_size;
  grid.stride = stride;
  for (Eigen::Index r = 0; r + patch_size <= img.height(); r += stride) {
    for (Eigen::Index c = 0; c + patch_size <= img.width(); c += stride) {
      grid.offsets.push_back({r, c});
    }
  }
  const Eigen::Index len = static_cast<Eigen::Index>(patch_size) * patch_size;
  grid.patches.resize(len, static_cast<Eigen::Index>(grid.offsets.size()));
  for (std::size_t n = 0; n < grid.offsets.size(); ++n) {
    const auto [r, c] = grid.offsets[n];
    grid.patches.col(static_cast<Eigen::Index>(n)) =
        img.pixels.block(r, c, patch_size, patch_size).reshaped();
  }
  return grid;
}

GrayImage assemble_overlap_average(const Mat& patches, int patch_size,
                                   std::span<const PatchOffset> offsets,
                                   Eigen::Index height, Eigen::Index width) {
  const Eigen::Index len = static_cast<Eigen::Index>(patch_size) * patch_size;
  if (patches.rows() != len || patches.cols() != static_cast<Eigen::Index>(offsets.size())) {
    throw InvalidArgument("assemble_overlap_average: patch matrix does not match offsets");
  }
  Mat sum = Mat::Zero(height, width);
  Mat count = Mat::Zero(height, width);
  for (std::size_t n = 0; n < offsets.size(); ++n) {
    const auto [r, c] = offsets[n];
    if (r < 0 || c < 0 || r + patch_size > height || c + patch_size > width) {
      throw InvalidArgument("assemble_overlap_average: patch " + std::to_string(n) +
                            " falls outside the image");
    }
    sum.block(r, c, patch_size, patch_size) +=
        patches.col(static_cast<Eigen::Index>(n)).reshaped(patch_size, patch_size);
    count.block(r, c, patch_size, patch_size).array() += 1.0;
  }
  if ((count.array() == 0.0).any()) {
    throw InvalidArgument("assemble_overlap_average: some pixels are not covered");
  }
  return GrayImage(Mat(sum.array() / count.array()));
}

Mat build_training_matrix(const GrayImage& low, const GrayImage& high,
                          int low_patch_size) {
  if (high.height() != 2 * low.height() || high.width() != 2 * low.width()) {
    throw InvalidArgument("build_training_matrix: high image " + dims(high) +
                          " must be twice the low image " + dims(low));
  }
  const PatchGrid lo = extract_patches(low, low_patch_size, 1);
  const PatchGrid hi = extract_patches(high, 2 * low_patch_size, 2);
  // Offsets align one-to-one: low (i, j) <-> high (2i, 2j).
  if (lo.offsets.size() != hi.offsets.size()) {
    throw InvalidArgument("build_training_matrix: patch grids do not align");
  }
  Mat y(lo.patches.rows() + hi.patches.rows(), lo.patches.cols());
  y.topRows(lo.patches.rows()) = lo.patches;
  y.bottomRows(hi.patches.rows()) = hi.patches;
  return y;
}

Mat build_training_matrix(std::span<const GrayImage> high_images,
                          int low_patch_size) {
  if (high_images.empty()) throw InvalidArgument("build_training_matrix: no images");
  std::vector<Mat> parts;
  Eigen::Index cols = 0;
  for (const auto& high : high_images) {
    parts.push_back(build_training_matrix(downsample_2x2(high), high, low_patch_size));
    cols += parts.back().cols();
  }
  Mat y(parts.front().rows(), cols);
  Eigen::Index at = 0;
  for (const auto& part : parts) {
    y.middleCols(at, part.cols()) = part;
    at += part.cols();
  }
  return y;
}

Mat CoupledDictionary::stacked() const {
  Mat out(low.rows() + high.rows(), low.cols());
  out.topRows(low.rows()) = low;
  out.bottomRows(high.rows()) = high;
  return out;
}

CoupledDictionary CoupledDictionary::from_stacked(const Mat& stacked,
                                                  int low_patch_size,
                                                  std::vector<bool> dead) {
  if (low_patch_size < 1 || stacked.rows() != stacked_rows(low_patch_size)) {
    throw InvalidArgument("coupled dictionary has " + std::to_string(stacked.rows()) +
                          " rows; patch size " + std::to_string(low_patch_size) +
                          " needs " + std::to_string(stacked_rows(low_patch_size)));
  }
  const Eigen::Index low_rows = static_cast<Eigen::Index>(low_patch_size) * low_patch_size;
  CoupledDictionary d;
  d.low_patch_size = low_patch_size;
  d.low = stacked.topRows(low_rows);
  d.high = stacked.bottomRows(stacked.rows() - low_rows);
  d.low_norms = column_norms(d.low);
  if (dead.empty()) dead.assign(static_cast<std::size_t>(stacked.cols()), false);
  if (dead.size() != static_cast<std::size_t>(stacked.cols())) {
    throw InvalidArgument("coupled dictionary: dead-atom flags do not match atom count");
  }
  d.dead = std::move(dead);
  return d;
}

CoupledDictionary train_joint_dictionary(const Mat& y, Method method,
                                         const SrTrainOptions& opts) {
  if (y.rows() != stacked_rows(opts.low_patch_size)) {
    throw InvalidArgument("train_joint_dictionary: training matrix has " +
                          std::to_string(y.rows()) + " rows, expected " +
                          std::to_string(stacked_rows(opts.low_patch_size)));
  }
  DictionaryModel model;
  if (method == Method::kRop) {
    RopOptions rop = opts.rop;
    rop.atoms = opts.atoms;
    rop.seed = opts.seed;
    model = run_rop(y, rop).model;
  } else {
    TwoStageOptions two;
    two.atoms = opts.atoms;
    two.sparsity = opts.sparsity;
    two.max_outer_iter = opts.baseline_max_iter;
    two.seed = opts.seed;
    two.method = method == Method::kMod ? DictionaryUpdate::kMod : DictionaryUpdate::kKsvd;
    model = run_two_stage(y, two).model;
  }
  return CoupledDictionary::from_stacked(model.D, opts.low_patch_size, model.dead);
}

CoupledDictionary train_joint_dictionary(const Mat& y, std::string_view method,
                                         const SrTrainOptions& opts) {
  return train_joint_dictionary(y, parse_method(method), opts);
}

GrayImage reconstruct_high_res(const GrayImage& low, const CoupledDictionary& dict,
                               int s_test) {
  const int p = dict.low_patch_size;
  const Eigen::Index low_rows = static_cast<Eigen::Index>(p) * p;
  if (dict.low.rows() != low_rows || dict.high.rows() != 4 * low_rows ||
      dict.high.cols() != dict.low.cols()) {
    throw InvalidArgument("reconstruct_high_res: dictionary geometry (" +
                          std::to_string(dict.low.rows()) + "+" +
                          std::to_string(dict.high.rows()) +
                          " rows) does not match patch size " + std::to_string(p));
  }
  if (s_test < 0 || s_test > low_rows) {
    throw InvalidArgument("reconstruct_high_res: S_test must be in [0, " +
                          std::to_string(low_rows) + "]");
  }

  std::vector<Eigen::Index> live;
  for (Eigen::Index k = 0; k < dict.atoms(); ++k) {
    const bool dead = k < static_cast<Eigen::Index>(dict.dead.size()) &&
                      dict.dead[static_cast<std::size_t>(k)];
    if (!dead && dict.low_norms(k) > 1e-12) live.push_back(k);
  }
  const auto live_count = static_cast<Eigen::Index>(live.size());
  Mat low_unit(low_rows, live_count);
  Mat high_live(dict.high.rows(), live_count);
  Vec scale(live_count);
  for (Eigen::Index j = 0; j < live_count; ++j) {
    const Eigen::Index k = live[static_cast<std::size_t>(j)];
    scale(j) = dict.low_norms(k);
    low_unit.col(j) = dict.low.col(k) / scale(j);
    high_live.col(j) = dict.high.col(k);
  }

  const PatchGrid grid = extract_patches(low, p, 1);
  const int sparsity = static_cast<int>(std::min<Eigen::Index>(s_test, live_count));
  Mat high_patches = Mat::Zero(dict.high.rows(), grid.patches.cols());
  parallel_for(static_cast<std::size_t>(grid.patches.cols()), [&](std::size_t n) {
    if (sparsity == 0) return;
    const auto col = static_cast<Eigen::Index>(n);
    const SparseColumn code = omp(low_unit, grid.patches.col(col), sparsity);
    for (std::size_t j = 0; j < code.support.size(); ++j) {
      const Eigen::Index a = code.support[j];
      // alpha = beta / ||D_L(:, a)|| keeps D_L alpha equal to the coded patch.
      high_patches.col(col) += (code.values[j] / scale(a)) * high_live.col(a);
    }
  });

  std::vector<PatchOffset> doubled;
  doubled.reserve(grid.offsets.size());
  for (const auto& [r, c] : grid.offsets) doubled.push_back({2 * r, 2 * c});
  return assemble_overlap_average(high_patches, 2 * p, doubled, 2 * low.height(),
                                  2 * low.width());
}

double sr_error(const GrayImage& estimate, const GrayImage& truth) {
  if (estimate.height() != truth.height() || estimate.width() != truth.width()) {
    throw InvalidArgument("sr_error: estimate is " + dims(estimate) +
                          " but ground truth is " + dims(truth));
  }
  const double denom = truth.pixels.squaredNorm();
  if (denom == 0.0) throw InvalidArgument("sr_error: ground truth image is zero");
  return (estimate.pixels - truth.pixels).squaredNorm() / denom;
}

}  // namespace ropdl
