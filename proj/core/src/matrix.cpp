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

#include "ropdl/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ropdl/error.hpp"

namespace ropdl {

std::size_t DictionaryModel::dead_count() const {
  return static_cast<std::size_t>(std::count(dead.begin(), dead.end(), true));
}

Vec column_norms(const Mat& a) {
  Vec norms(a.cols());
  for (Eigen::Index n = 0; n < a.cols(); ++n) norms(n) = a.col(n).norm();
  return norms;
}

NormalizedColumns normalize_columns(const Mat& a) {
  NormalizedColumns out{a, column_norms(a)};
  for (Eigen::Index n = 0; n < a.cols(); ++n) {
    if (out.scales(n) > 0.0) out.matrix.col(n) /= out.scales(n);
  }
  return out;
}

double group_l21_norm(const Mat& a) {
  double total = 0.0;
  for (Eigen::Index n = 0; n < a.cols(); ++n) total += a.col(n).stableNorm();
  return total;
}

bool all_finite(const Mat& a) { return a.allFinite(); }

void require_finite(const Mat& a, std::string_view what) {
  if (!a.allFinite()) {
    throw InvalidArgument(std::string(what) + " contains non-finite entries");
  }
}

double canonical_sign(const Vec& u) {
  Eigen::Index best = 0;
  double best_mag = -1.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double mag = std::abs(u(i));
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  if (u.size() == 0 || u(best) >= 0.0) return 1.0;
  return -1.0;
}

}  // namespace ropdl
