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
#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "ropdl/error.hpp"
#include "ropdl/experiments.hpp"
#include "ropdl/parallel.hpp"
#include "ropdl/random.hpp"

namespace ropdl {
namespace {

using nlohmann::json;

SynthConfig tiny_config() {
  SynthConfig c;
  c.M = 4;
  c.K = 6;
  c.S = 1;
  c.N = 24;
  c.trials = 3;
  c.seed = 42;
  c.rop.max_iter = 40;
  c.baseline_max_iter = 5;
  return c;
}

Mat orthonormal(Eigen::Index n, std::uint64_t seed) {
  const Eigen::HouseholderQR<Mat> qr(Rng(seed).gaussian_matrix(n, n));
  return qr.householderQ() * Mat::Identity(n, n);
}

TEST(Methods, ParseAndPrint) {
  EXPECT_EQ(parse_method("ksvd"), Method::kKsvd);
  EXPECT_EQ(to_string(Method::kMod), "mod");
  const auto list = parse_methods("rop,mod,rop");
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[1], Method::kMod);
  EXPECT_THROW(parse_method("svd"), InvalidArgument);
  EXPECT_THROW(parse_methods("rop,"), InvalidArgument);
}

TEST(GenDictionary, UnitColumnsAndSeeded) {
  const Mat d = gen_dictionary(7, 11, 3);
  ASSERT_EQ(d.rows(), 7);
  ASSERT_EQ(d.cols(), 11);
  for (Eigen::Index k = 0; k < 11; ++k) EXPECT_NEAR(d.col(k).norm(), 1.0, 1e-14);
  EXPECT_EQ(d, gen_dictionary(7, 11, 3));
  EXPECT_NE(d, gen_dictionary(7, 11, 4));
}

TEST(GenCoefficients, ExactSparsityPerColumn) {
  const Mat x = gen_coefficients(10, 200, 3, 5);
  for (Eigen::Index n = 0; n < x.cols(); ++n) EXPECT_EQ((x.col(n).array() != 0.0).count(), 3);
  EXPECT_EQ(x, gen_coefficients(10, 200, 3, 5));
  EXPECT_EQ(gen_coefficients(4, 3, 0, 1), Mat::Zero(4, 3));
  EXPECT_THROW(gen_coefficients(4, 3, 5, 1), InvalidArgument);
}

TEST(GenCoefficients, SupportsAreUniformOverAtoms) {
  const Eigen::Index k = 10;
  const Mat x = gen_coefficients(k, 3000, 3, 17);
  const Vec counts = (x.array() != 0.0).cast<double>().rowwise().sum();
  const double expected = 3000.0 * 3.0 / static_cast<double>(k);
  const double chi2 = (counts.array() - expected).square().sum() / expected;
  // 9 degrees of freedom; the 0.999 quantile is 27.88.
  EXPECT_LT(chi2, 27.88);
}

TEST(GenCoefficients, NonzeroValuesLookStandardNormal) {
  const Mat x = gen_coefficients(8, 4000, 2, 23);
  std::vector<double> v;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x.data()[i] != 0.0) v.push_back(x.data()[i]);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double var = 0.0;
  for (double a : v) var += (a - mean) * (a - mean);
  var /= v.size() - 1;
  EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(v.size()));
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(RecoveryError, IdentityIsZero) {
  const Mat d = gen_dictionary(8, 12, 1);
  EXPECT_NEAR(recovery_error(d, d), 0.0, 1e-12);
}

TEST(RecoveryError, PermutationAndSignFlipsAreZero) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const Mat d = gen_dictionary(8, 12, 100 + t);
    const auto perm = rng.sample_without_replacement(12, 12);
    Mat shuffled(8, 12);
    for (Eigen::Index k = 0; k < 12; ++k) {
      const double sign = rng.uniform_index(2) == 0 ? -1.0 : 1.0;
      shuffled.col(k) = sign * d.col(static_cast<Eigen::Index>(perm[k]));
    }
    EXPECT_NEAR(recovery_error(shuffled, d), 0.0, 1e-12);
  }
}

TEST(RecoveryError, OrthogonalComplementIsOne) {
  const Mat q = orthonormal(10, 3);
  EXPECT_NEAR(recovery_error(q.rightCols(5), q.leftCols(5)), 1.0, 1e-12);
}

TEST(RecoveryError, HalfCorrectIsAverage) {
  const Mat q = orthonormal(4, 4);
  Mat est = q.leftCols(2);
  est.col(1) = q.col(3);
  // One atom matched exactly, the other orthogonal to every unmatched atom.
  EXPECT_NEAR(recovery_error(est, q.leftCols(2)), 0.5, 1e-12);
}

TEST(RecoveryError, BoundedAndShapeChecked) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const double e = recovery_error(gen_dictionary(5, 9, rng.uniform_index(1000)),
                                    gen_dictionary(5, 9, 5000 + t));
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 1.0);
  }
  EXPECT_THROW(recovery_error(Mat::Identity(3, 3), Mat::Identity(3, 2)), InvalidArgument);
}

TEST(SynthConfig, ValidationNamesTheProblem) {
  SynthConfig c = tiny_config();
  c.S = 5;
  try {
    validate(c);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("S=5"), std::string::npos);
  }
  c = tiny_config();
  c.K = 4;
  EXPECT_THROW(validate(c), InvalidArgument);
  c = tiny_config();
  c.methods.clear();
  EXPECT_THROW(validate(c), InvalidArgument);
  c = tiny_config();
  c.rop.rho = -1.0;
  EXPECT_THROW(validate(c), InvalidArgument);
}

TEST(Benchmark, RecordsSummaryAndMeans) {
  const SynthConfig c = tiny_config();
  int sunk = 0;
  const BenchmarkReport r = run_benchmark(c, [&](const ExperimentRecord&) { ++sunk; });
  EXPECT_EQ(sunk, 3);
  ASSERT_EQ(r.records.size(), 3u);
  ASSERT_EQ(r.summary.size(), 3u);
  for (std::size_t m = 0; m < 3; ++m) {
    double total = 0.0;
    for (const auto& rec : r.records) {
      ASSERT_EQ(rec.outcomes.size(), 3u);
      EXPECT_EQ(rec.outcomes[m].method, c.methods[m]);
      ASSERT_TRUE(rec.outcomes[m].error.has_value());
      EXPECT_FALSE(rec.outcomes[m].seconds.has_value());
      total += *rec.outcomes[m].error;
    }
    EXPECT_EQ(r.summary[m].trials, 3);
    EXPECT_NEAR(r.summary[m].mean_error, total / 3.0, 1e-15);
  }
  EXPECT_EQ(r.records[1].trial_seed, derive_seed(42, 1));
}

TEST(Benchmark, TrialsAreIndependentOfTrialCountAndThreads) {
  SynthConfig c = tiny_config();
  set_thread_count(1);
  const BenchmarkReport one = run_benchmark(c);
  set_thread_count(3);
  const BenchmarkReport three = run_benchmark(c);
  set_thread_count(1);
  c.trials = 1;
  const BenchmarkReport first = run_benchmark(c);
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_EQ(*one.records[2].outcomes[m].error, *three.records[2].outcomes[m].error);
    EXPECT_EQ(*one.records[0].outcomes[m].error, *first.records[0].outcomes[m].error);
  }
}

TEST(Benchmark, JsonlAndCsvOutput) {
  const SynthConfig c = tiny_config();
  const BenchmarkReport r = run_benchmark(c);
  std::ostringstream jsonl;
  write_results_jsonl(jsonl, c, r);
  std::istringstream in(jsonl.str());
  std::string line;
  int records = 0;
  int summaries = 0;
  while (std::getline(in, line)) {
    const json j = json::parse(line);
    if (j.contains("summary")) {
      ++summaries;
      EXPECT_TRUE(j["mean_error"].is_number());
    } else {
      ++records;
      EXPECT_TRUE(j["seconds"].is_null());
      EXPECT_EQ(j["config"]["N"], 24);
      EXPECT_TRUE(j["error"].is_number());
    }
  }
  EXPECT_EQ(records, 9);
  EXPECT_EQ(summaries, 3);

  std::ostringstream again;
  write_results_jsonl(again, c, run_benchmark(c));
  EXPECT_EQ(jsonl.str(), again.str());

  std::ostringstream csv;
  write_summary_csv(csv, c, r);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "method,N,mean_error");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_EQ(json::parse(config_json(c))["M"], 4);
}

TEST(Benchmark, TimingIsRecordedOnlyWhenAsked) {
  SynthConfig c = tiny_config();
  c.trials = 1;
  c.methods = {Method::kMod};
  c.record_timing = true;
  const BenchmarkReport r = run_benchmark(c);
  ASSERT_TRUE(r.records[0].outcomes[0].seconds.has_value());
  EXPECT_GE(*r.records[0].outcomes[0].seconds, 0.0);
}

}  // namespace
}  // namespace ropdl
