#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "spatialq/cost.hpp"
#include "spatialq/global_index.hpp"
#include "spatialq/joins.hpp"
#include "spatialq/scheduler.hpp"

namespace spatialq {

/// Knobs for one simulated run. `m_budget` is the total partition count
/// the cluster may reach; the planner receives the spare slots beyond
/// n_partitions.
struct EngineConfig {
    int n_partitions = 4;
    int m_budget = 8;
    int node_capacity = 64;
    int max_depth = 16;
    int rtree_fanout = 25;
    bool use_filter = true;
    bool use_scheduler = true;
    int filter_depth = 8;
    std::uint64_t filter_budget_bits = 0;  // 0 -> twice each filter's built size
    int filter_split_limit = 0;            // 0 -> the filter's own depth
    CostModel cost;
    std::uint64_t sample_seed = 7;
    std::size_t sample_size = 0;  // 0 -> max(|D|/100, 10 * n_partitions)
    std::size_t query_sample_size = 512;
    int parallelism = 1;
};

/// Join output: `pairs` for range joins, `rows` for kNN joins. Data
/// partitions are disjoint, so pairs carry no duplicates.
struct JoinResult {
    std::vector<IdPair> pairs;
    std::vector<KnnResult> rows;
};

/// Operation-count metrics for one run. All tallies are integers so runs
/// are bit-identical across parallelism degrees.
struct Metrics {
    std::uint64_t shuffle_count = 0;     // query-to-partition assignments executed
    std::uint64_t makespan = 0;          // max per-partition operation count
    std::uint64_t merge_volume = 0;      // local result rows concatenated
    std::uint64_t filter_pruned = 0;     // assignments skipped by filters
    std::uint64_t filter_false_positives = 0;  // assignments passing a filter, empty result
    std::uint64_t filter_bits = 0;       // total bits across active filters
    std::uint64_t result_rows = 0;
    std::vector<std::uint64_t> per_partition_ops;

    double fp_rate() const {
        const std::uint64_t checked = shuffle_count;
        return checked == 0 ? 0.0
                            : static_cast<double>(filter_false_positives) /
                                  static_cast<double>(checked);
    }
};

/// Partitioned, indexed, filtered dataset ready to serve joins. Immutable
/// during a run; filter adaptation returns a new value.
struct BuiltIndex {
    GlobalIndex global;
    std::vector<Partition> partitions;
    Rect boundary{};
};

BuiltIndex build_index(std::vector<Point> data, const EngineConfig& cfg);

struct RangeJoinOutcome {
    JoinResult result;
    Metrics metrics;
};

/// Four-stage range join: route queries, split skew-flagged partitions
/// via the greedy plan (scheduler on), execute per (sub-)partition, and
/// concatenate. Toggling the filter or scheduler changes only metrics.
RangeJoinOutcome range_join(const BuiltIndex& index, std::span<const RangeQuery> queries,
                            const EngineConfig& cfg);

/// Two-round kNN join: local kNN in each focal point's home partition,
/// then radius-bounded candidate gathering from every other partition
/// whose region (and filter, when enabled) admits candidates.
RangeJoinOutcome knn_join(const BuiltIndex& index, std::span<const Point> focals, int k,
                          const EngineConfig& cfg);

struct FilterUpdateOutcome {
    JoinResult result;
    Metrics metrics;
    BuiltIndex updated;
};

/// Range join that additionally adapts each worker's filter: every query
/// with an empty local result is inserted as certified-empty space, the
/// filter shrinks when it outgrows its budget, and the reworked filters
/// are merged back into the global index of the returned copy.
FilterUpdateOutcome run_with_filter_update(const BuiltIndex& index,
                                           std::span<const RangeQuery> queries,
                                           const EngineConfig& cfg);

/// Failure of one simulated worker task; carries the index of the task
/// (the partition slot for engine-issued batches).
struct WorkerFailure : std::runtime_error {
    std::size_t task_index;
    WorkerFailure(std::size_t idx, const std::string& what)
        : std::runtime_error("task " + std::to_string(idx) + ": " + what), task_index(idx) {}
};

/// Runs one function per task with up to `parallelism` threads. Results
/// land in task order, so outputs and metric tallies are identical for
/// any parallelism degree; the first failing task (lowest index) aborts
/// the batch.
template <typename Task, typename Fn>
auto simulate_workers(const std::vector<Task>& tasks, int parallelism, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, const Task&, std::size_t>> {
    using Result = std::invoke_result_t<Fn&, const Task&, std::size_t>;
    std::vector<Result> results(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());

    if (parallelism < 1) parallelism = 1;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(parallelism), std::max<std::size_t>(tasks.size(), 1));

    std::atomic<std::size_t> next{0};
    auto body = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            try {
                results[i] = fn(tasks[i], i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                throw WorkerFailure(i, e.what());
            } catch (...) {
                throw WorkerFailure(i, "unknown error");
            }
        }
    }
    return results;
}

}  // namespace spatialq
