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

#include <cstdint>
#include <random>
#include <vector>

#include "ropdl/matrix.hpp"

namespace ropdl {

/// Derives an independent stream seed from (master, stream) with a
/// splitmix64 finalizer. Used so that trial i of a benchmark sees the same
/// numbers whether trials run serially or in parallel.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Seeded source of the Gaussian and uniform draws used throughout.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal();
  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);

  Vec gaussian_vector(Eigen::Index n);
  /// Gaussian direction normalized to unit length.
  Vec unit_vector(Eigen::Index n);
  Mat gaussian_matrix(Eigen::Index rows, Eigen::Index cols);
  /// `count` distinct indices drawn uniformly from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t count);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ropdl
