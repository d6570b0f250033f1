#include <benchmark/benchmark.h>

#include <random>

#include "spatialq/sfilter.hpp"
#include "spatialq/workload.hpp"

using namespace spatialq;

namespace {

const Rect kBounds{0, 0, 1024, 1024};

SFilter bench_filter(std::size_t points, int depth) {
    const auto pts = gen_clustered_points(points, kBounds, 8, 20.0, 999);
    Quadtree qt(pts, kBounds, 8, depth - 1);
    return SFilter::build_from_quadtree(qt, depth);
}

std::vector<Rect> bench_rects(std::size_t n) {
    WorkloadSpec spec;
    spec.count = n;
    spec.seed = 31337;
    spec.min_extent = 8;
    spec.max_extent = 40;
    std::vector<Rect> out;
    for (const auto& q : gen_range_workload(spec, kBounds)) out.push_back(q.rect);
    return out;
}

}  // namespace

static void BM_sfilter_build(benchmark::State& state) {
    const auto pts = gen_clustered_points(50000, kBounds, 8, 20.0, 999);
    const Quadtree qt(pts, kBounds, 8, static_cast<int>(state.range(0)) - 1);
    for (auto _ : state) {
        const SFilter sf = SFilter::build_from_quadtree(qt, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(sf.space_bits());
    }
}
BENCHMARK(BM_sfilter_build)->Arg(6)->Arg(8);

static void BM_sfilter_query(benchmark::State& state) {
    const SFilter sf = bench_filter(50000, 8);
    const auto rects = bench_rects(1024);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sf.query(rects[i++ % rects.size()]));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_sfilter_query);

// The filter's reason to exist: probing it instead of the quadtree.
static void BM_quadtree_probe_for_comparison(benchmark::State& state) {
    const auto pts = gen_clustered_points(50000, kBounds, 8, 20.0, 999);
    const Quadtree qt(pts, kBounds, 8, 7);
    const auto rects = bench_rects(1024);
    std::size_t i = 0;
    std::vector<const Point*> hits;
    SearchCounters c;
    for (auto _ : state) {
        hits.clear();
        qt.range_search(rects[i++ % rects.size()], hits, c);
        benchmark::DoNotOptimize(hits.empty());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_quadtree_probe_for_comparison);

static void BM_sfilter_insert_empty(benchmark::State& state) {
    const SFilter sf = bench_filter(20000, 7);
    std::mt19937_64 rng(4321);
    std::uniform_real_distribution<double> d(0, 1024 - 64);
    for (auto _ : state) {
        const double x = d(rng), y = d(rng);
        const SFilter next = sf.insert_empty({x, y, x + 32, y + 32});
        benchmark::DoNotOptimize(next.space_bits());
    }
}
BENCHMARK(BM_sfilter_insert_empty);

static void BM_sfilter_serialize_roundtrip(benchmark::State& state) {
    const SFilter sf = bench_filter(50000, 8);
    for (auto _ : state) {
        const auto bytes = sf.serialize();
        const SFilter back = SFilter::deserialize(bytes);
        benchmark::DoNotOptimize(back.space_bits());
    }
    state.SetBytesProcessed(state.iterations() *
                            static_cast<std::int64_t>(sf.serialize().size()));
}
BENCHMARK(BM_sfilter_serialize_roundtrip);
