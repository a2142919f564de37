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

// Synthetic dictionary-recovery benchmark: planted (D0, X0), Y = D0 X0,
// every method learns a dictionary from Y alone and is scored against D0.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ropdl/matrix.hpp"
#include "ropdl/rop_admm.hpp"

namespace ropdl {

enum class Method { kRop, kMod, kKsvd };

std::string to_string(Method method);
/// Accepts "rop", "mod", "ksvd". Throws InvalidArgument otherwise.
Method parse_method(std::string_view name);
/// Comma-separated list, e.g. "rop,ksvd,mod".
std::vector<Method> parse_methods(std::string_view list);

/// M x K Gaussian matrix with unit-norm columns.
Mat gen_dictionary(Eigen::Index rows, Eigen::Index atoms, std::uint64_t seed);

/// K x N; each column has exactly S nonzeros at a uniformly drawn S-subset
/// of [0, K), with standard Gaussian values.
Mat gen_coefficients(Eigen::Index atoms, Eigen::Index samples, int sparsity,
                     std::uint64_t seed);

/// Greedy-matched mean of (1 - |<d_hat_k, d0_{i_k}>|): for k = 0..K-1 in
/// order, i_k maximizes |<d_hat_k, d0_i>| over ground-truth atoms not yet
/// matched (lowest index on ties). Lies in [0, 1] for unit-norm columns.
/// Throws InvalidArgument on shape mismatch.
double recovery_error(const Mat& d_hat, const Mat& d0);

struct SynthConfig {
  int M = 16;
  int K = 32;
  int S = 3;
  int N = 200;
  int trials = 1;
  std::uint64_t seed = 0;
  std::vector<Method> methods{Method::kRop, Method::kKsvd, Method::kMod};
  /// K and seed are overridden per trial; the rest is used as given.
  RopOptions rop;
  int baseline_max_iter = 500;
  /// Off by default so result files are byte-reproducible.
  bool record_timing = false;
};

/// Throws InvalidArgument unless 1 <= S <= M < K, N >= 1, trials >= 1.
void validate(const SynthConfig& config);

struct MethodOutcome {
  Method method = Method::kRop;
  std::optional<double> error;  ///< empty when the method failed
  int iterations = 0;
  std::optional<double> seconds;
  /// ||Y - D X||_F / ||Y||_F of the learned model.
  double fit_residual = 0.0;
  std::string failure;
};

struct ExperimentRecord {
  int trial = 0;
  std::uint64_t trial_seed = 0;
  double y_norm = 0.0;
  std::vector<MethodOutcome> outcomes;
};

struct MethodSummary {
  Method method = Method::kRop;
  double mean_error = 0.0;
  int trials = 0;  ///< successful trials entering the mean
};

struct BenchmarkReport {
  std::vector<ExperimentRecord> records;
  std::vector<MethodSummary> summary;
};

/// One trial. Trial t draws everything from derive_seed(config.seed, t), so
/// trials can run in any order.
ExperimentRecord run_trial(const SynthConfig& config, int trial);

/// All trials (in parallel when threads > 1), records delivered to `sink`
/// in trial order, then the per-method means. A method that throws is
/// recorded with its message and excluded from the mean.
BenchmarkReport run_benchmark(
    const SynthConfig& config,
    const std::function<void(const ExperimentRecord&)>& sink = {});

std::vector<MethodSummary> summarize(const SynthConfig& config,
                                     const std::vector<ExperimentRecord>& records);

/// Resolved configuration as a single-line JSON object.
std::string config_json(const SynthConfig& config);

/// One line per (trial, method):
///   {"config":{...},"trial":t,"seed":s,"method":"rop","error":e,
///    "iterations":i,"seconds":null,"fit_residual":r,"y_norm":n}
/// then one summary line per method:
///   {"summary":true,"method":"rop","mean_error":e,"trials":n}
void write_results_jsonl(std::ostream& out, const SynthConfig& config,
                         const BenchmarkReport& report);

/// Header `method,N,mean_error`, one row per method.
void write_summary_csv(std::ostream& out, const SynthConfig& config,
                       const BenchmarkReport& report, bool header = true);

}  // namespace ropdl
