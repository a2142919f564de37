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

// Patch-based 2x single-image super-resolution with a coupled dictionary.
//
// Training stacks every low-resolution patch (p x p, stride 1) over the
// high-resolution patch at twice its offset (2p x 2p, stride 2) into one
// column of Y, so the digit geometry (14x14 low, 28x28 high, p = 3) gives a
// 45 x 144 matrix. A learned dictionary [D_L; D_H] is split by rows. At
// test time each low patch is coded against the column-normalized D_L by
// OMP and D_H alpha is placed at the doubled offset; overlapping pixels are
// averaged.
//
// Patches are vectorized column-major (the patch's first column first).

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ropdl/experiments.hpp"
#include "ropdl/matrix.hpp"
#include "ropdl/rop_admm.hpp"

namespace ropdl {

/// Grayscale image, pixels(row, col) nominally in [0, 1].
struct GrayImage {
  Mat pixels;

  GrayImage() = default;
  explicit GrayImage(Mat p) : pixels(std::move(p)) {}
  GrayImage(Eigen::Index height, Eigen::Index width)
      : pixels(Mat::Zero(height, width)) {}

  Eigen::Index height() const { return pixels.rows(); }
  Eigen::Index width() const { return pixels.cols(); }
};

/// (row, col) of a patch's top-left pixel.
using PatchOffset = std::array<Eigen::Index, 2>;

struct PatchGrid {
  int patch_size = 0;
  int stride = 0;
  std::vector<PatchOffset> offsets;  ///< row-major scan order
  Mat patches;                       ///< one vectorized patch per column
};

/// Mean of each 2x2 block. Throws InvalidArgument for odd dimensions.
GrayImage downsample_2x2(const GrayImage& img);

/// Pixel replication to twice the size.
GrayImage upsample_nearest_2x(const GrayImage& img);

/// Every fully contained patch, scanning offsets row-major with the given
/// stride. Throws InvalidArgument if the patch does not fit or stride < 1.
PatchGrid extract_patches(const GrayImage& img, int patch_size, int stride);

/// Places patch n at offsets[n] and averages overlapping contributions.
/// Throws InvalidArgument if a pixel is left uncovered or a patch falls
/// outside the image.
GrayImage assemble_overlap_average(const Mat& patches, int patch_size,
                                   std::span<const PatchOffset> offsets,
                                   Eigen::Index height, Eigen::Index width);

/// Stacked low/high training columns from one aligned pair; `high` must be
/// exactly twice `low` in both dimensions. Rows: p^2 + (2p)^2.
Mat build_training_matrix(const GrayImage& low, const GrayImage& high,
                          int low_patch_size = 3);

/// Concatenates build_training_matrix(downsample_2x2(h), h) over several
/// high-resolution images.
Mat build_training_matrix(std::span<const GrayImage> high_images,
                          int low_patch_size = 3);

struct CoupledDictionary {
  Mat low;   ///< p^2 x K rows of the learned dictionary
  Mat high;  ///< (2p)^2 x K
  Vec low_norms;  ///< column norms of `low`, used to renormalize for coding
  std::vector<bool> dead;
  int low_patch_size = 3;

  Eigen::Index atoms() const { return low.cols(); }
  /// [low; high] stacked back into one matrix.
  Mat stacked() const;
  /// Splits a stacked dictionary. Throws InvalidArgument if its row count
  /// is not p^2 + (2p)^2.
  static CoupledDictionary from_stacked(const Mat& stacked, int low_patch_size,
                                        std::vector<bool> dead = {});
};

struct SrTrainOptions {
  int atoms = 128;
  /// Sparsity for the two-stage learners (ROP does not use it).
  int sparsity = 3;
  int low_patch_size = 3;
  std::uint64_t seed = 0;
  /// rho, scaling, iterations and tolerance for ROP; atoms/seed overridden.
  RopOptions rop;
  int baseline_max_iter = 500;
};

/// Learns [D_L; D_H] from a stacked training matrix with the chosen method.
CoupledDictionary train_joint_dictionary(const Mat& y, Method method,
                                         const SrTrainOptions& opts);
/// Same with the method given by name; unknown names throw InvalidArgument.
CoupledDictionary train_joint_dictionary(const Mat& y, std::string_view method,
                                         const SrTrainOptions& opts);

/// 2x reconstruction of `low`. Dead atoms and atoms whose low part is zero
/// are excluded from coding. S_test = 0 yields an all-zero image. Throws
/// InvalidArgument if S_test exceeds p^2 or the image is smaller than a
/// patch.
GrayImage reconstruct_high_res(const GrayImage& low, const CoupledDictionary& dict,
                               int s_test = 3);

/// ||I_hat - I0||_F^2 / ||I0||_F^2. Throws InvalidArgument on shape
/// mismatch or zero ground truth.
double sr_error(const GrayImage& estimate, const GrayImage& truth);

/// A seeded 28x28 handwritten-style rendering of `digit` (0-9): anti-aliased
/// strokes with a random small rotation, scale, shift and stroke width.
GrayImage render_digit(int digit, std::uint64_t seed);

}  // namespace ropdl
