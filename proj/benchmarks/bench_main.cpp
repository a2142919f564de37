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

#include <benchmark/benchmark.h>

#include "ropdl/baselines.hpp"
#include "ropdl/experiments.hpp"
#include "ropdl/prox.hpp"
#include "ropdl/random.hpp"
#include "ropdl/rop_admm.hpp"

namespace {

using namespace ropdl;

void BM_GroupShrink(benchmark::State& state) {
  const Mat a = Rng(1).gaussian_matrix(state.range(0), 400);
  for (auto _ : state) benchmark::DoNotOptimize(group_shrink_columns(a, 0.5));
}
BENCHMARK(BM_GroupShrink)->Arg(16)->Arg(45);

void BM_RankOneProject(benchmark::State& state) {
  const Mat a = Rng(2).gaussian_matrix(state.range(0), 400);
  for (auto _ : state) benchmark::DoNotOptimize(rank_one_project(a));
}
BENCHMARK(BM_RankOneProject)->Arg(16)->Arg(45);

void BM_AdmmIteration(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Mat y = gen_dictionary(16, k, 3) * gen_coefficients(k, 400, 3, 4);
  RopOptions opts;
  opts.atoms = k;
  AdmmState s = init_state(y, opts);
  for (auto _ : state) {
    p_update(s, y);
    q_update(s);
    z_update(s);
    dual_update(s, y);
  }
}
BENCHMARK(BM_AdmmIteration)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_PUpdateCg(benchmark::State& state) {
  const Mat y = gen_dictionary(16, 8, 5) * gen_coefficients(8, 100, 2, 6);
  RopOptions opts;
  opts.atoms = 8;
  const AdmmState start = init_state(y, opts);
  for (auto _ : state) {
    AdmmState s = start;
    p_update(s, y, PUpdateMode::kCg);
  }
}
BENCHMARK(BM_PUpdateCg)->Unit(benchmark::kMillisecond);

void BM_SparseCode(benchmark::State& state) {
  const Mat d = gen_dictionary(16, 32, 7);
  const Mat y = d * gen_coefficients(32, 400, 3, 8);
  for (auto _ : state) benchmark::DoNotOptimize(sparse_code(d, y, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SparseCode)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_KsvdSweep(benchmark::State& state) {
  const Mat d0 = gen_dictionary(16, 32, 9);
  const Mat y = d0 * gen_coefficients(32, 400, 3, 10);
  const Mat start = gen_dictionary(16, 32, 11);
  for (auto _ : state) {
    Mat d = start;
    Mat x = sparse_code(d, y, 3).to_dense();
    ksvd_update(y, d, x);
  }
}
BENCHMARK(BM_KsvdSweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
