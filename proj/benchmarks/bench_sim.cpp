// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "blockdvfs/sim.hpp"

namespace {

using namespace blockdvfs;

void BM_Simulate(benchmark::State& state, PolicyKind kind) {
  const auto g = bench::fixture("vit_l16");
  GovernorPolicy policy;
  policy.kind = kind;
  const auto t0 = ThermalState::from_profile(bench::profile(), 25.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(g, bench::profile(), policy, {}, t0));
  }
}
BENCHMARK_CAPTURE(BM_Simulate, lookahead, PolicyKind::sparse_dvfs_lookahead);
BENCHMARK_CAPTURE(BM_Simulate, operator_serial, PolicyKind::operator_level_serial);
BENCHMARK_CAPTURE(BM_Simulate, reactive, PolicyKind::reactive_default);
BENCHMARK_CAPTURE(BM_Simulate, max_static, PolicyKind::max_static);

void BM_SustainedLoad(benchmark::State& state) {
  const auto g = bench::fixture("vit_b16");
  GovernorPolicy policy;
  SimOptions opts;
  opts.iterations = static_cast<std::size_t>(state.range(0));
  opts.throttle_limit = 60.0;
  const auto t0 = ThermalState::from_profile(bench::profile(), 25.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(g, bench::profile(), policy, {}, t0, opts));
  }
}
BENCHMARK(BM_SustainedLoad)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
