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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "ropdl/error.hpp"
#include "ropdl/matcsv.hpp"
#include "ropdl/matrix.hpp"
#include "ropdl/parallel.hpp"
#include "ropdl/random.hpp"

namespace ropdl {
namespace {

TEST(ColumnNorms, SmallCases) {
  EXPECT_EQ(column_norms(Mat::Identity(2, 2)), Vec::Ones(2));
  Mat a(2, 1);
  a << 3, 4;
  EXPECT_DOUBLE_EQ(column_norms(a)(0), 5.0);
  EXPECT_EQ(column_norms(Mat::Zero(3, 2)), Vec::Zero(2));
}

TEST(NormalizeColumns, DiagonalAndZeroColumn) {
  Mat a(2, 2);
  a << 2, 0, 0, 3;
  const auto n = normalize_columns(a);
  EXPECT_EQ(n.matrix, Mat::Identity(2, 2));
  EXPECT_DOUBLE_EQ(n.scales(0), 2.0);
  EXPECT_DOUBLE_EQ(n.scales(1), 3.0);

  Mat z(3, 2);
  z << 1, 0, 2, 0, 2, 0;
  const auto m = normalize_columns(z);
  EXPECT_EQ(m.matrix.col(1), Vec::Zero(3));
  EXPECT_EQ(m.scales(1), 0.0);
  EXPECT_NEAR(m.scales(0), 3.0, 1e-15);
}

TEST(NormalizeColumns, IdempotentOnUnitColumns) {
  const Mat u = normalize_columns(Rng(3).gaussian_matrix(5, 4)).matrix;
  const auto again = normalize_columns(u);
  EXPECT_LE((again.matrix - u).norm(), 1e-15);
  EXPECT_LE((again.scales - Vec::Ones(4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NormalizeColumns, RandomColumnsBecomeUnit) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const Mat a = rng.gaussian_matrix(1 + rng.uniform_index(9), 1 + rng.uniform_index(9));
    const Vec norms = column_norms(normalize_columns(a).matrix);
    for (Eigen::Index i = 0; i < norms.size(); ++i) EXPECT_NEAR(norms(i), 1.0, 1e-12);
  }
}

TEST(GroupL21Norm, Values) {
  EXPECT_DOUBLE_EQ(group_l21_norm(Mat::Identity(2, 2)), 2.0);
  Mat a(2, 2);
  a << 3, 0, 4, 0;
  EXPECT_DOUBLE_EQ(group_l21_norm(a), 5.0);
  EXPECT_EQ(group_l21_norm(Mat::Zero(4, 3)), 0.0);
}

TEST(GroupL21Norm, ZeroOnlyForZeroMatrixAndHomogeneous) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    Mat a = Mat::Zero(4, 6);
    a(rng.uniform_index(4), rng.uniform_index(6)) = 1e-200;
    EXPECT_GT(group_l21_norm(a), 0.0);

    const Mat b = rng.gaussian_matrix(4, 6);
    const double c = 10.0 * rng.normal();
    EXPECT_NEAR(group_l21_norm(c * b), std::abs(c) * group_l21_norm(b),
                1e-12 * std::abs(c) * group_l21_norm(b));
  }
}

TEST(CanonicalSign, LargestEntryPositiveLowestIndexOnTies) {
  Vec u(3);
  u << 0.1, -0.9, 0.3;
  EXPECT_EQ(canonical_sign(u), -1.0);
  u << -0.5, 0.5, 0.0;
  EXPECT_EQ(canonical_sign(u), -1.0);
  EXPECT_EQ(canonical_sign(Vec::Zero(3)), 1.0);
}

TEST(RequireFinite, RejectsNanAndInf) {
  Mat a = Mat::Ones(2, 2);
  EXPECT_NO_THROW(require_finite(a, "a"));
  a(1, 0) = std::nan("");
  EXPECT_THROW(require_finite(a, "a"), InvalidArgument);
  a(1, 0) = INFINITY;
  EXPECT_FALSE(all_finite(a));
}

TEST(DictionaryModel, DeadCountAndReconstruction) {
  DictionaryModel m;
  m.D = Mat::Identity(2, 2);
  m.X = Mat::Ones(2, 3);
  m.dead = {false, true};
  EXPECT_EQ(m.dead_count(), 1u);
  EXPECT_EQ(m.atom_count(), 2u);
  EXPECT_EQ(m.reconstruction(), Mat::Ones(2, 3));
}

TEST(DeriveSeed, DistinctStreamsAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(derive_seed(42, s));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 1));
}

TEST(Rng, SameSeedSameDraws) {
  Rng a(9);
  Rng b(9);
  EXPECT_EQ(a.gaussian_matrix(3, 4), b.gaussian_matrix(3, 4));
  EXPECT_NEAR(Rng(1).unit_vector(7).norm(), 1.0, 1e-15);
}

TEST(Rng, SampleWithoutReplacementIsDistinctAndInRange) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const auto s = rng.sample_without_replacement(10, 4);
    ASSERT_EQ(s.size(), 4u);
    std::set<std::size_t> uniq(s.begin(), s.end());
    EXPECT_EQ(uniq.size(), 4u);
    EXPECT_LT(*std::max_element(s.begin(), s.end()), 10u);
  }
  EXPECT_EQ(rng.sample_without_replacement(5, 5).size(), 5u);
}

TEST(ParallelFor, VisitsEveryIndexOnceAtAnyThreadCount) {
  for (int threads : {1, 3, 8}) {
    set_thread_count(threads);
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  set_thread_count(1);
}

TEST(ParallelFor, NestedCallsAndExceptions) {
  set_thread_count(4);
  std::vector<int> out(16, 0);
  parallel_for(4, [&](std::size_t i) {
    parallel_for(4, [&](std::size_t j) { out[i * 4 + j] = static_cast<int>(i * 4 + j); });
  });
  for (int i = 0; i < 16; ++i) EXPECT_EQ(out[i], i);
  EXPECT_THROW(parallel_for(10,
                            [](std::size_t i) {
                              if (i == 7) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
  set_thread_count(1);
}

TEST(Matcsv, RoundTripIsBitExact) {
  Mat a = Rng(4).gaussian_matrix(3, 5);
  a(0, 0) = 1e-300;
  a(2, 4) = -123456789.125;
  std::stringstream ss;
  write_matcsv(ss, a);
  EXPECT_EQ(read_matcsv(ss), a);
}

TEST(Matcsv, FormatIsRowByRow) {
  Mat a(2, 2);
  a << 1, 2, 3, 4;
  std::stringstream ss;
  write_matcsv(ss, a);
  EXPECT_EQ(ss.str(), "2,2\n1,2\n3,4\n");
}

TEST(Matcsv, ParseErrorsCarryLineNumbers) {
  std::stringstream bad_header("2;2\n1,2\n3,4\n");
  EXPECT_THROW(read_matcsv(bad_header), ParseError);
  std::stringstream bad_value("2,2\n1,2\n3,x\n");
  try {
    read_matcsv(bad_value);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 3u);
  }
  std::stringstream short_rows("3,2\n1,2\n3,4\n");
  EXPECT_THROW(read_matcsv(short_rows), ParseError);
  EXPECT_THROW(read_matcsv(std::filesystem::path("/nonexistent/y.csv")), IoError);
}

}  // namespace
}  // namespace ropdl
