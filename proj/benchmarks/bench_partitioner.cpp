// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "blockdvfs/partitioner.hpp"

namespace {

using namespace blockdvfs;

void BM_PartitionFixture(benchmark::State& state, const char* name) {
  const auto g = bench::fixture(name);
  for (auto _ : state) {
    benchmark::DoNotOptimize(partition(g, bench::profile(), {}, 25.0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK_CAPTURE(BM_PartitionFixture, resnet18, "resnet18");
BENCHMARK_CAPTURE(BM_PartitionFixture, vit_l16, "vit_l16");
BENCHMARK_CAPTURE(BM_PartitionFixture, resnet101, "resnet101");

void BM_PartitionRandom(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(partition(g, bench::profile(), {}, 25.0));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PartitionRandom)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_DpOracle(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dp_optimal_partition(g, bench::profile(), {}, 25.0));
  }
}
BENCHMARK(BM_DpOracle)->Arg(8)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
