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

#include "ropdl/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "ropdl/baselines.hpp"
#include "ropdl/error.hpp"
#include "ropdl/matcsv.hpp"
#include "ropdl/parallel.hpp"
#include "ropdl/random.hpp"

namespace ropdl {
namespace {

using json = nlohmann::ordered_json;

enum SeedStream : std::uint64_t {
  kDictionaryStream = 1,
  kCoefficientStream = 2,
  kSolverStream = 3,
};

json config_object(const SynthConfig& c) {
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  return json{
      {"M", c.M},
      {"K", c.K},
      {"S", c.S},
      {"N", c.N},
      {"trials", c.trials},
      {"seed", c.seed},
      {"methods", methods},
      {"rho", c.rop.rho},
      {"penalty_scaling", to_string(c.rop.penalty_scaling)},
      {"max_iter", c.rop.max_iter},
      {"tol", c.rop.primal_tol},
      {"warmup_iters", c.rop.warmup_iters},
      {"warmup_factor", c.rop.warmup_factor},
      {"p_update", to_string(c.rop.p_update_mode)},
      {"baseline_max_iter", c.baseline_max_iter},
  };
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::kRop: return "rop";
    case Method::kMod: return "mod";
    case Method::kKsvd: return "ksvd";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "rop") return Method::kRop;
  if (name == "mod") return Method::kMod;
  if (name == "ksvd") return Method::kKsvd;
  throw InvalidArgument("unknown method '" + std::string(name) +
                        "' (valid: rop, mod, ksvd)");
}

std::vector<Method> parse_methods(std::string_view list) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto item = list.substr(start, comma - start);
    const Method m = parse_method(item);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Mat gen_dictionary(Eigen::Index rows, Eigen::Index atoms, std::uint64_t seed) {
  if (rows < 1 || atoms < 1) throw InvalidArgument("gen_dictionary: empty shape");
  Rng rng(seed);
  return normalize_columns(rng.gaussian_matrix(rows, atoms)).matrix;
}

Mat gen_coefficients(Eigen::Index atoms, Eigen::Index samples, int sparsity,
                     std::uint64_t seed) {
  if (atoms < 1 || samples < 1 || sparsity < 0 || sparsity > atoms) {
    throw InvalidArgument("gen_coefficients: need 0 <= S <= K and N >= 1");
  }
  Rng rng(seed);
  Mat x = Mat::Zero(atoms, samples);
  for (Eigen::Index n = 0; n < samples; ++n) {
    const auto support = rng.sample_without_replacement(
        static_cast<std::size_t>(atoms), static_cast<std::size_t>(sparsity));
    for (std::size_t idx : support) {
      x(static_cast<Eigen::Index>(idx), n) = rng.normal();
    }
  }
  return x;
}

double recovery_error(const Mat& d_hat, const Mat& d0) {
  if (d_hat.rows() != d0.rows() || d_hat.cols() != d0.cols() || d0.cols() == 0) {
    throw InvalidArgument("recovery_error: dictionaries must have the same shape");
  }
  const Mat corr = (d_hat.transpose() * d0).cwiseAbs();
  const auto k_count = d0.cols();
  std::vector<bool> taken(static_cast<std::size_t>(k_count), false);
  double total = 0.0;
  for (Eigen::Index k = 0; k < k_count; ++k) {
    Eigen::Index best = -1;
    double best_corr = -1.0;
    for (Eigen::Index i = 0; i < k_count; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (corr(k, i) > best_corr) {
        best_corr = corr(k, i);
        best = i;
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    total += std::clamp(1.0 - best_corr, 0.0, 1.0);
  }
  return total / static_cast<double>(k_count);
}

void validate(const SynthConfig& c) {
  if (c.S < 1 || c.S > c.M) {
    throw InvalidArgument("synth config: need 1 <= S <= M (S=" + std::to_string(c.S) +
                          ", M=" + std::to_string(c.M) + ")");
  }
  if (c.M >= c.K) {
    throw InvalidArgument("synth config: need an overcomplete dictionary, M < K (M=" +
                          std::to_string(c.M) + ", K=" + std::to_string(c.K) + ")");
  }
  if (c.N < 1) throw InvalidArgument("synth config: N must be >= 1");
  if (c.trials < 1) throw InvalidArgument("synth config: trials must be >= 1");
  if (c.methods.empty()) throw InvalidArgument("synth config: no methods selected");
  if (c.baseline_max_iter < 1) {
    throw InvalidArgument("synth config: baseline_max_iter must be >= 1");
  }
  RopOptions rop = c.rop;
  rop.atoms = c.K;
  validate(rop);
}

ExperimentRecord run_trial(const SynthConfig& config, int trial) {
  ExperimentRecord record;
  record.trial = trial;
  record.trial_seed = derive_seed(config.seed, static_cast<std::uint64_t>(trial));

  const Mat d0 = gen_dictionary(config.M, config.K,
                                derive_seed(record.trial_seed, kDictionaryStream));
  const Mat x0 = gen_coefficients(config.K, config.N, config.S,
                                  derive_seed(record.trial_seed, kCoefficientStream));
  const Mat y = d0 * x0;
  record.y_norm = y.norm();
  const std::uint64_t solver_seed = derive_seed(record.trial_seed, kSolverStream);

  for (Method method : config.methods) {
    MethodOutcome outcome;
    outcome.method = method;
    const auto start = std::chrono::steady_clock::now();
    try {
      Mat d_hat;
      Mat x_hat;
      if (method == Method::kRop) {
        RopOptions opts = config.rop;
        opts.atoms = config.K;
        opts.seed = solver_seed;
        RopResult r = run_rop(y, opts);
        outcome.iterations = r.iterations_run;
        d_hat = std::move(r.model.D);
        x_hat = std::move(r.model.X);
      } else {
        TwoStageOptions opts;
        opts.atoms = config.K;
        opts.sparsity = config.S;
        opts.max_outer_iter = config.baseline_max_iter;
        opts.seed = solver_seed;
        opts.method = method == Method::kMod ? DictionaryUpdate::kMod
                                             : DictionaryUpdate::kKsvd;
        TwoStageResult r = run_two_stage(y, opts);
        outcome.iterations = static_cast<int>(r.trace.size());
        d_hat = std::move(r.model.D);
        x_hat = std::move(r.model.X);
      }
      outcome.error = recovery_error(d_hat, d0);
      outcome.fit_residual = (y - d_hat * x_hat).norm() / record.y_norm;
    } catch (const std::exception& e) {
      outcome.failure = e.what();
    }
    if (config.record_timing) {
      outcome.seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    }
    record.outcomes.push_back(std::move(outcome));
  }
  return record;
}

std::vector<MethodSummary> summarize(const SynthConfig& config,
                                     const std::vector<ExperimentRecord>& records) {
  std::vector<MethodSummary> summary;
  for (Method method : config.methods) {
    MethodSummary s;
    s.method = method;
    double total = 0.0;
    for (const auto& record : records) {
      for (const auto& outcome : record.outcomes) {
        if (outcome.method == method && outcome.error) {
          total += *outcome.error;
          ++s.trials;
        }
      }
    }
    s.mean_error = s.trials > 0 ? total / s.trials
                                : std::numeric_limits<double>::quiet_NaN();
    summary.push_back(s);
  }
  return summary;
}

BenchmarkReport run_benchmark(
    const SynthConfig& config,
    const std::function<void(const ExperimentRecord&)>& sink) {
  validate(config);
  BenchmarkReport report;
  report.records.resize(static_cast<std::size_t>(config.trials));
  parallel_for(report.records.size(), [&](std::size_t t) {
    report.records[t] = run_trial(config, static_cast<int>(t));
  });
  if (sink) {
    for (const auto& record : report.records) sink(record);
  }
  report.summary = summarize(config, report.records);
  return report;
}

std::string config_json(const SynthConfig& config) {
  return config_object(config).dump();
}

void write_results_jsonl(std::ostream& out, const SynthConfig& config,
                         const BenchmarkReport& report) {
  const json cfg = config_object(config);
  for (const auto& record : report.records) {
    for (const auto& o : record.outcomes) {
      json line{
          {"config", cfg},
          {"trial", record.trial},
          {"seed", record.trial_seed},
          {"method", to_string(o.method)},
          {"error", optional_number(o.error)},
          {"iterations", o.iterations},
          {"seconds", optional_number(o.seconds)},
          {"fit_residual", o.fit_residual},
          {"y_norm", record.y_norm},
      };
      if (!o.failure.empty()) line["failed"] = o.failure;
      out << line.dump() << '\n';
    }
  }
  for (const auto& s : report.summary) {
    json line{
        {"summary", true},
        {"method", to_string(s.method)},
        {"mean_error", s.trials > 0 ? json(s.mean_error) : json(nullptr)},
        {"trials", s.trials},
    };
    out << line.dump() << '\n';
  }
}

void write_summary_csv(std::ostream& out, const SynthConfig& config,
                       const BenchmarkReport& report, bool header) {
  if (header) out << "method,N,mean_error\n";
  for (const auto& s : report.summary) {
    out << to_string(s.method) << ',' << config.N << ','
        << (s.trials > 0 ? format_real(s.mean_error) : std::string("nan")) << '\n';
  }
}

}  // namespace ropdl
