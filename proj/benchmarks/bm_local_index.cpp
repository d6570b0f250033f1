#include <benchmark/benchmark.h>

#include "spatialq/hilbert.hpp"
#include "spatialq/joins.hpp"
#include "spatialq/quadtree.hpp"
#include "spatialq/workload.hpp"

using namespace spatialq;

namespace {

const Rect kBounds{0, 0, 1000, 1000};

std::vector<Point> bench_points(std::size_t n) { return gen_uniform_points(n, kBounds, 12345); }

std::vector<RangeQuery> bench_queries(std::size_t n) {
    WorkloadSpec spec;
    spec.count = n;
    spec.seed = 54321;
    spec.min_extent = 10;
    spec.max_extent = 25;
    return gen_range_workload(spec, kBounds);
}

}  // namespace

static void BM_quadtree_build(benchmark::State& state) {
    const auto pts = bench_points(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        Quadtree qt(pts, kBounds, 64, 16);
        benchmark::DoNotOptimize(qt.node_count());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_quadtree_build)->Arg(10000)->Arg(100000);

static void BM_quadtree_range_search(benchmark::State& state) {
    const auto pts = bench_points(100000);
    const Quadtree qt(pts, kBounds, 64, 16);
    const auto queries = bench_queries(256);
    std::size_t i = 0;
    std::vector<const Point*> hits;
    SearchCounters c;
    for (auto _ : state) {
        hits.clear();
        qt.range_search(queries[i++ % queries.size()].rect, hits, c);
        benchmark::DoNotOptimize(hits.size());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_quadtree_range_search);

static void BM_rtree_range_search(benchmark::State& state) {
    const RTree rt = RTree::from_points(bench_points(100000), 25);
    const auto queries = bench_queries(256);
    std::size_t i = 0;
    std::vector<const Point*> hits;
    SearchCounters c;
    for (auto _ : state) {
        hits.clear();
        rt.range_search(queries[i++ % queries.size()].rect, hits, c);
        benchmark::DoNotOptimize(hits.size());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_rtree_range_search);

static void BM_quadtree_knn(benchmark::State& state) {
    const auto pts = bench_points(100000);
    const Quadtree qt(pts, kBounds, 64, 16);
    const auto focals = gen_uniform_points(256, kBounds, 777);
    std::size_t i = 0;
    SearchCounters c;
    for (auto _ : state) {
        const auto res = qt.knn_search(focals[i++ % focals.size()],
                                       static_cast<int>(state.range(0)), c);
        benchmark::DoNotOptimize(res.neighbors.size());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_quadtree_knn)->Arg(10)->Arg(50);

static void BM_dual_tree_join(benchmark::State& state) {
    const RTree data = RTree::from_points(bench_points(50000), 25);
    const auto queries = bench_queries(1000);
    std::vector<Rect> rects;
    std::vector<std::uint64_t> ids;
    for (const auto& q : queries) {
        rects.push_back(q.rect);
        ids.push_back(q.id);
    }
    const RTree qt = RTree::from_rects(rects, ids, 25);
    for (auto _ : state) {
        const auto pairs = dual_tree_join(qt, data);
        benchmark::DoNotOptimize(pairs.size());
    }
}
BENCHMARK(BM_dual_tree_join);

static void BM_hilbert_key(benchmark::State& state) {
    const auto pts = bench_points(4096);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hilbert_key(pts[i++ % pts.size()], kBounds, 16));
    }
}
BENCHMARK(BM_hilbert_key);
