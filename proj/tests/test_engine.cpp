#include <doctest.h>

#include <algorithm>
#include <atomic>

#include "spatialq/engine.hpp"
#include "spatialq/workload.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace spatialq;

namespace {

EngineConfig base_config(int n, bool filter, bool scheduler) {
    EngineConfig cfg;
    cfg.n_partitions = n;
    cfg.m_budget = 2 * n;
    cfg.use_filter = filter;
    cfg.use_scheduler = scheduler;
    cfg.node_capacity = 32;
    cfg.filter_depth = 6;
    return cfg;
}

bool rows_match_oracle(const std::vector<KnnResult>& rows, const std::vector<KnnResult>& want) {
    if (rows.size() != want.size()) return false;
    auto sorted = [](std::vector<KnnResult> v) {
        std::sort(v.begin(), v.end(),
                  [](const KnnResult& a, const KnnResult& b) { return a.query_id < b.query_id; });
        return v;
    };
    const auto a = sorted(rows);
    const auto b = sorted(want);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].query_id != b[i].query_id) return false;
        if (a[i].neighbors.size() != b[i].neighbors.size()) return false;
        for (std::size_t j = 0; j < a[i].neighbors.size(); ++j)
            if (a[i].neighbors[j].point_id != b[i].neighbors[j].point_id) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("range join equals brute force in every configuration") {
    const Rect bounds{0, 0, 400, 400};
    const auto data = testgen::random_points(6000, bounds, 71);
    const auto queries = testgen::random_rects(400, bounds, 30, 72);
    const auto want = oracle::brute_range_join(data, queries);

    for (int n : {1, 4}) {
        for (bool filter : {false, true}) {
            for (bool scheduler : {false, true}) {
                CAPTURE(n);
                CAPTURE(filter);
                CAPTURE(scheduler);
                const EngineConfig cfg = base_config(n, filter, scheduler);
                const BuiltIndex index = build_index(data, cfg);
                auto outcome = range_join(index, queries, cfg);
                CHECK(oracle::sorted_pairs(std::move(outcome.result.pairs)) == want);
                CHECK(outcome.metrics.makespan > 0);
                CHECK(outcome.metrics.result_rows == want.size());
            }
        }
    }
}

TEST_CASE("knn join equals brute force in every configuration") {
    const Rect bounds{0, 0, 300, 300};
    const auto data = testgen::random_points(4000, bounds, 73);
    const auto focals = testgen::random_points(250, bounds, 74);

    for (int k : {1, 10}) {
        const auto want = oracle::brute_knn_join(data, focals, k);
        for (int n : {1, 4}) {
            for (bool filter : {false, true}) {
                for (bool scheduler : {false, true}) {
                    CAPTURE(k);
                    CAPTURE(n);
                    CAPTURE(filter);
                    CAPTURE(scheduler);
                    const EngineConfig cfg = base_config(n, filter, scheduler);
                    const BuiltIndex index = build_index(data, cfg);
                    const auto outcome = knn_join(index, focals, k, cfg);
                    CHECK(rows_match_oracle(outcome.result.rows, want));
                }
            }
        }
    }
}

TEST_CASE("two-round knn pulls cross-partition neighbors") {
    // Four crafted quadrant partitions. The focal point sits in the
    // lower-left region near its right edge; two neighbors are local,
    // the third lives across the boundary, so round two must visit it.
    std::vector<Rect> regions{{0, 0, 10, 10}, {10, 0, 20, 10}, {0, 10, 10, 20},
                              {10, 10, 20, 20}};
    std::vector<Point> data{
        {8.0, 5.0, 1, {}},   // o1: local, d=1.0
        {7.5, 5.0, 2, {}},   // o2: local, d=1.5
        {10.5, 5.0, 3, {}},  // o3: next region, d=1.5 -> beats o4
        {6.0, 5.0, 4, {}},   // o4: local, d=3.0
        {15, 15, 5, {}},     // far away
        {2, 18, 6, {}},
    };
    auto gi = GlobalIndex::from_regions(regions);
    auto parts = partition_data(data, gi, 4, 8, 4);
    for (const auto& p : parts) gi.set_filter(p.id, p.filter);

    BuiltIndex index;
    index.global = std::move(gi);
    index.partitions = std::move(parts);
    index.boundary = {0, 0, 20, 20};

    EngineConfig cfg = base_config(4, true, false);
    std::vector<Point> focal{{9.0, 5.0, 100, {}}};
    const auto outcome = knn_join(index, focal, 3, cfg);

    REQUIRE(outcome.result.rows.size() == 1);
    const auto& row = outcome.result.rows[0];
    REQUIRE(row.neighbors.size() == 3);
    CHECK(row.neighbors[0].point_id == 1);
    CHECK(row.neighbors[1].point_id == 2);  // d=1.5, id 2 beats id 3
    CHECK(row.neighbors[2].point_id == 3);
    // home partition 0 plus the round-2 visit to partition 1
    CHECK(outcome.metrics.shuffle_count >= 2);

    SUBCASE("all data in one partition needs a single round") {
        std::vector<Rect> one{{0, 0, 20, 20}};
        auto gi1 = GlobalIndex::from_regions(one);
        auto parts1 = partition_data(data, gi1, 4, 8, 4);
        for (const auto& p : parts1) gi1.set_filter(p.id, p.filter);
        BuiltIndex idx1{std::move(gi1), std::move(parts1), {0, 0, 20, 20}};
        const auto out1 = knn_join(idx1, focal, 3, base_config(1, true, false));
        CHECK(out1.metrics.shuffle_count == 1);  // no replication possible
        CHECK(rows_match_oracle(out1.result.rows, outcome.result.rows));
    }
}

TEST_CASE("toggling filter or scheduler changes metrics only") {
    const Rect bounds{0, 0, 500, 500};
    const auto data = gen_clustered_points(5000, bounds, 6, 12.0, 75);
    const auto queries = testgen::random_rects(600, bounds, 25, 76);

    const EngineConfig off = base_config(8, false, false);
    const BuiltIndex index = build_index(data, off);
    auto baseline = range_join(index, queries, off);
    const auto want = oracle::sorted_pairs(std::move(baseline.result.pairs));

    EngineConfig filter_on = off;
    filter_on.use_filter = true;
    auto with_filter = range_join(index, queries, filter_on);
    CHECK(oracle::sorted_pairs(std::move(with_filter.result.pairs)) == want);
    CHECK(with_filter.metrics.shuffle_count <= baseline.metrics.shuffle_count);
    CHECK(with_filter.metrics.filter_pruned > 0);

    EngineConfig sched_on = off;
    sched_on.use_scheduler = true;
    auto with_sched = range_join(index, queries, sched_on);
    CHECK(oracle::sorted_pairs(std::move(with_sched.result.pairs)) == want);
}

TEST_CASE("scheduler cuts the makespan on a hotspot workload") {
    const Rect bounds{0, 0, 1000, 1000};
    const auto data = testgen::random_points(20000, bounds, 77);

    WorkloadSpec spec;
    spec.kind = WorkloadSpec::Kind::hotspot;
    spec.count = 1500;
    spec.centers = {{500, 500, 60, 0.8}, {200, 800, 400, 0.2}};
    spec.min_extent = 15;
    spec.max_extent = 30;
    spec.seed = 78;
    const auto queries = gen_range_workload(spec, bounds);

    EngineConfig off = base_config(16, false, false);
    off.m_budget = 64;
    const BuiltIndex index = build_index(data, off);
    const auto base = range_join(index, queries, off);

    EngineConfig on = off;
    on.use_scheduler = true;
    const auto opt = range_join(index, queries, on);

    CHECK(opt.metrics.makespan < base.metrics.makespan);
    // outputs unchanged
    auto a = base.result.pairs;
    auto b = opt.result.pairs;
    CHECK(oracle::sorted_pairs(std::move(a)) == oracle::sorted_pairs(std::move(b)));
}

TEST_CASE("filter cuts shuffle on clustered data") {
    const Rect bounds{0, 0, 800, 800};
    const auto data = gen_clustered_points(8000, bounds, 5, 15.0, 79);
    const auto queries = testgen::random_rects(800, bounds, 20, 80);

    const EngineConfig off = base_config(16, false, false);
    const BuiltIndex index = build_index(data, off);
    EngineConfig on = off;
    on.use_filter = true;

    const auto base = range_join(index, queries, off);
    const auto filt = range_join(index, queries, on);
    CHECK(filt.metrics.shuffle_count < base.metrics.shuffle_count);

    const auto base_knn = knn_join(index, testgen::random_points(300, bounds, 81), 5, off);
    const auto filt_knn = knn_join(index, testgen::random_points(300, bounds, 81), 5, on);
    CHECK(filt_knn.metrics.shuffle_count <= base_knn.metrics.shuffle_count);
}

TEST_CASE("filter updates shrink the replayed workload's shuffle") {
    const Rect bounds{0, 0, 640, 640};
    const auto data = gen_clustered_points(4000, bounds, 4, 10.0, 82);
    // Aligned rect queries so certified-empty space replays false.
    std::mt19937_64 rng(83);
    std::vector<RangeQuery> queries;
    for (std::uint64_t i = 0; i < 400; ++i)
        queries.push_back({testgen::aligned_rect(bounds, 5, rng), i});

    EngineConfig cfg = base_config(8, true, false);
    cfg.filter_budget_bits = 1 << 20;  // roomy: no shrink interference
    const BuiltIndex index = build_index(data, cfg);

    const auto first = run_with_filter_update(index, queries, cfg);
    const auto second = run_with_filter_update(first.updated, queries, cfg);

    CHECK(second.metrics.shuffle_count <= first.metrics.shuffle_count);
    CHECK(second.metrics.filter_false_positives <= first.metrics.filter_false_positives);
    auto a = first.result.pairs;
    auto b = second.result.pairs;
    CHECK(oracle::sorted_pairs(std::move(a)) == oracle::sorted_pairs(std::move(b)));

    SUBCASE("no empty results leave the filters untouched") {
        // Tiny rects around data points, restricted to queries that stay
        // inside a single region so every routed visit finds the point.
        std::vector<RangeQuery> fat;
        for (std::uint64_t i = 0; i < 200 && fat.size() < 50; ++i) {
            const Point& p = data[i * 7];
            const Rect r{p.x - 0.5, p.y - 0.5, p.x + 0.5, p.y + 0.5};
            if (index.global.overlapping(r).size() == 1) fat.push_back({r, i});
        }
        REQUIRE(!fat.empty());
        const auto out = run_with_filter_update(index, fat, cfg);
        for (std::size_t i = 0; i < index.partitions.size(); ++i)
            CHECK(out.updated.partitions[i].filter == index.partitions[i].filter);
    }
    SUBCASE("adversarial empty workload respects the space budget") {
        EngineConfig tight = cfg;
        tight.filter_budget_bits = 0;  // default: twice the built size
        std::vector<RangeQuery> empties;
        std::mt19937_64 rng2(84);
        for (std::uint64_t i = 0; i < 300; ++i)
            empties.push_back({testgen::aligned_rect(bounds, 6, rng2), i});
        const auto out = run_with_filter_update(index, empties, tight);
        for (const auto& part : out.updated.partitions)
            CHECK(part.filter.space_bits() <= 2 * part.built_filter_bits);
    }
}

TEST_CASE("simulate_workers is schedule independent") {
    std::vector<int> tasks(64);
    for (int i = 0; i < 64; ++i) tasks[i] = i;

    auto square = [](const int& t, std::size_t) { return t * t; };
    const auto serial = simulate_workers(tasks, 1, square);
    const auto parallel = simulate_workers(tasks, 8, square);
    CHECK(serial == parallel);
    for (int i = 0; i < 64; ++i) CHECK(serial[static_cast<std::size_t>(i)] == i * i);

    SUBCASE("empty task list") {
        CHECK(simulate_workers(std::vector<int>{}, 4, square).empty());
    }
    SUBCASE("per-task tallies sum to the total regardless of schedule") {
        std::atomic<long> total{0};
        auto work = [&total](const int& t, std::size_t) {
            total.fetch_add(t);
            return t;
        };
        simulate_workers(tasks, 7, work);
        CHECK(total.load() == 63 * 64 / 2);
    }
    SUBCASE("a failing task aborts with its index") {
        auto faulty = [](const int& t, std::size_t) {
            if (t == 13) throw std::runtime_error("boom");
            return t;
        };
        CHECK_THROWS_AS(simulate_workers(tasks, 4, faulty), WorkerFailure);
        try {
            simulate_workers(tasks, 4, faulty);
        } catch (const WorkerFailure& e) {
            CHECK(e.task_index == 13);
        }
    }
}

TEST_CASE("metrics are identical across parallelism degrees") {
    const Rect bounds{0, 0, 400, 400};
    const auto data = gen_clustered_points(6000, bounds, 5, 14.0, 85);
    const auto queries = testgen::random_rects(500, bounds, 25, 86);
    const auto focals = testgen::random_points(200, bounds, 87);

    EngineConfig cfg = base_config(8, true, true);
    const BuiltIndex index = build_index(data, cfg);

    EngineConfig par = cfg;
    par.parallelism = 8;

    const auto a = range_join(index, queries, cfg);
    const auto b = range_join(index, queries, par);
    CHECK(a.metrics.shuffle_count == b.metrics.shuffle_count);
    CHECK(a.metrics.makespan == b.metrics.makespan);
    CHECK(a.metrics.merge_volume == b.metrics.merge_volume);
    CHECK(a.metrics.per_partition_ops == b.metrics.per_partition_ops);
    CHECK(a.result.pairs == b.result.pairs);

    const auto ka = knn_join(index, focals, 10, cfg);
    const auto kb = knn_join(index, focals, 10, par);
    CHECK(ka.metrics.per_partition_ops == kb.metrics.per_partition_ops);
    CHECK(ka.metrics.shuffle_count == kb.metrics.shuffle_count);
    CHECK(rows_match_oracle(ka.result.rows, kb.result.rows));
}
