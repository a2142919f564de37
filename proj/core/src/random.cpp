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

#include "ropdl/random.hpp"

#include <numeric>

namespace ropdl {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::normal() { return normal_(engine_); }

std::size_t Rng::uniform_index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

Vec Rng::gaussian_vector(Eigen::Index n) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Vec Rng::unit_vector(Eigen::Index n) {
  Vec v = gaussian_vector(n);
  // Zero draw has probability zero, but the result must be unit length.
  while (v.norm() == 0.0) v = gaussian_vector(n);
  return v / v.norm();
}

Mat Rng::gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
  Mat m(rows, cols);
  // Column by column so a matrix and a sequence of column draws agree.
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = normal();
  }
  return m;
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n,
                                                         std::size_t count) {
  // Partial Fisher-Yates: every count-subset is equally likely.
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> dist(i, n - 1);
    std::swap(pool[i], pool[dist(engine_)]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace ropdl
