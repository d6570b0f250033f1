#include <benchmark/benchmark.h>

#include "spatialq/engine.hpp"
#include "spatialq/workload.hpp"

using namespace spatialq;

namespace {

const Rect kBounds{0, 0, 1000, 1000};

EngineConfig bench_config(bool filter, bool scheduler) {
    EngineConfig cfg;
    cfg.n_partitions = 16;
    cfg.m_budget = 48;
    cfg.use_filter = filter;
    cfg.use_scheduler = scheduler;
    return cfg;
}

std::vector<RangeQuery> hotspot_queries(std::size_t n) {
    WorkloadSpec spec;
    spec.kind = WorkloadSpec::Kind::hotspot;
    spec.count = n;
    spec.centers = {{500, 500, 60, 0.8}, {500, 500, 700, 0.2}};
    spec.min_extent = 15;
    spec.max_extent = 30;
    spec.seed = 246;
    return gen_range_workload(spec, kBounds);
}

}  // namespace

static void BM_range_join(benchmark::State& state) {
    const auto data = gen_clustered_points(50000, kBounds, 8, 18.0, 135);
    const bool filter = state.range(0) != 0;
    const bool scheduler = state.range(1) != 0;
    const EngineConfig cfg = bench_config(filter, scheduler);
    const BuiltIndex index = build_index(data, cfg);
    const auto queries = hotspot_queries(2000);
    for (auto _ : state) {
        const auto out = range_join(index, queries, cfg);
        benchmark::DoNotOptimize(out.result.pairs.size());
    }
}
BENCHMARK(BM_range_join)
    ->Args({0, 0})
    ->Args({1, 0})
    ->Args({0, 1})
    ->Args({1, 1})
    ->ArgNames({"filter", "scheduler"});

static void BM_knn_join(benchmark::State& state) {
    const auto data = gen_clustered_points(50000, kBounds, 8, 18.0, 135);
    const EngineConfig cfg = bench_config(true, true);
    const BuiltIndex index = build_index(data, cfg);
    WorkloadSpec spec;
    spec.count = 1000;
    spec.seed = 468;
    const auto focals = gen_knn_workload(spec, kBounds);
    for (auto _ : state) {
        const auto out = knn_join(index, focals, static_cast<int>(state.range(0)), cfg);
        benchmark::DoNotOptimize(out.result.rows.size());
    }
}
BENCHMARK(BM_knn_join)->Arg(10)->Arg(50);

static void BM_build_index(benchmark::State& state) {
    const auto data =
        gen_uniform_points(static_cast<std::size_t>(state.range(0)), kBounds, 790);
    const EngineConfig cfg = bench_config(true, false);
    for (auto _ : state) {
        const BuiltIndex index = build_index(data, cfg);
        benchmark::DoNotOptimize(index.partitions.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_build_index)->Arg(50000)->Arg(200000);

BENCHMARK_MAIN();
