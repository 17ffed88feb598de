// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "blockdvfs/modeler.hpp"

namespace {

using namespace blockdvfs;

void BM_PredictExecTime(benchmark::State& state) {
  const auto g = bench::fixture("vit_b16");
  const auto f = bench::profile().max_triplet();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& op = g.operators()[i++ % g.size()];
    benchmark::DoNotOptimize(predict_exec_time(op, f, bench::profile()));
  }
}
BENCHMARK(BM_PredictExecTime);

void BM_PredictPower(benchmark::State& state) {
  const auto f = bench::profile().max_triplet();
  double s = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_power(f, 45.0, s, bench::profile()));
    s = s < 0.9 ? s + 0.1 : 0.0;
  }
}
BENCHMARK(BM_PredictPower);

// Exhaustive search over the full 400-point grid.
void BM_OptimalTriplet(benchmark::State& state) {
  const auto g = bench::fixture("resnet101");
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& op = g.operators()[i++ % g.size()];
    benchmark::DoNotOptimize(optimal_triplet(op, 25.0, bench::profile()));
  }
}
BENCHMARK(BM_OptimalTriplet);

}  // namespace

BENCHMARK_MAIN();
