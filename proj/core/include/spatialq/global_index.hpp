#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "spatialq/quadtree.hpp"
#include "spatialq/rtree.hpp"
#include "spatialq/sfilter.hpp"

namespace spatialq {

/// Algorithm R. Returns a uniform n-subset (all items when fewer),
/// deterministic for a fixed seed; selected items keep stream order.
template <typename T>
std::vector<T> reservoir_sample(std::span<const T> items, std::size_t n, std::uint64_t seed) {
    std::vector<T> out;
    if (n == 0) return out;
    out.reserve(std::min(n, items.size()));
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> picked;  // positions, to keep stream order
    picked.reserve(std::min(n, items.size()));
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (picked.size() < n) {
            picked.push_back(i);
        } else {
            std::uniform_int_distribution<std::size_t> d(0, i);
            const std::size_t j = d(rng);
            if (j < n) picked[j] = i;
        }
    }
    std::sort(picked.begin(), picked.end());
    for (std::size_t i : picked) out.push_back(items[i]);
    return out;
}

/// Per-partition bookkeeping consumed by the cost model: sizes, region
/// area, the routed-query sample, and deterministic operation tallies.
struct Stat {
    std::uint32_t partition_id = 0;
    std::uint64_t data_count = 0;
    std::uint64_t query_count = 0;
    double area = 0.0;
    std::vector<RangeQuery> sampled_queries;
    std::uint64_t sampled_op_count = 0;  // visited+verified proxy for sampled cost mode
};

/// One data shard: its region, points, local quadtree, and spatial
/// filter. The quadtree is shared because partitions are copied when a
/// run returns an updated index.
struct Partition {
    std::uint32_t id = 0;
    Rect region{};
    std::vector<Point> data;
    std::shared_ptr<const Quadtree> local_index;
    SFilter filter;
    Stat stats;
    std::uint64_t built_filter_bits = 0;  // shrink budgets default to twice this
};

/// Routing tree over the N partition regions plus one embedded filter
/// per region. Regions tile the boundary; shared edges are resolved to
/// the lowest partition id so every point has exactly one home.
class GlobalIndex {
public:
    GlobalIndex() = default;

    /// Regions must tile the intended boundary; ids are assigned 0..N-1.
    static GlobalIndex from_regions(std::vector<Rect> regions, int rtree_fanout = 25);

    /// Partition ids whose regions overlap q, ascending.
    std::vector<std::uint32_t> overlapping(const Rect& q) const;

    /// Home partition of a point: lowest id whose region contains it.
    std::optional<std::uint32_t> try_home(double x, double y) const;

    /// Home partition, falling back to the region nearest to the point
    /// when it lies outside every region (ties to the lowest id).
    std::uint32_t home_or_nearest(double x, double y) const;

    std::size_t partition_count() const { return regions_.size(); }
    const std::vector<Rect>& regions() const { return regions_; }
    const Rect& region(std::uint32_t pid) const { return regions_.at(pid); }
    const SFilter& filter(std::uint32_t pid) const { return filters_.at(pid); }
    void set_filter(std::uint32_t pid, SFilter f) { filters_.at(pid) = std::move(f); }
    const RTree& routing_tree() const { return routing_; }
    const Rect& boundary() const { return boundary_; }

private:
    std::vector<Rect> regions_;
    std::vector<SFilter> filters_;
    RTree routing_;
    Rect boundary_{};
};

/// STR-style leaf forcing over the sample: exactly `n_partitions` regions
/// with near-equal sample counts, expanded outward to tile `boundary`.
/// Throws std::invalid_argument when the sample is empty or smaller than
/// n_partitions.
GlobalIndex build_global_index(std::span<const Point> sample, int n_partitions,
                               const Rect& boundary, int rtree_fanout = 25);

/// Assigns every point to its home partition and builds the local
/// quadtree and filter of each. Throws when a point is unroutable.
std::vector<Partition> partition_data(std::vector<Point> data, const GlobalIndex& gi,
                                      int node_capacity, int max_depth, int filter_depth);

struct RangeRouting {
    std::vector<std::vector<RangeQuery>> per_partition;
    std::uint64_t shuffle_count = 0;    // total (query, partition) assignments
    std::uint64_t pruned_by_filter = 0; // overlapping assignments skipped by filters
};

/// Replicates each query to every overlapping region; with `use_filter`,
/// regions whose filter answers false are skipped.
RangeRouting route_range_queries(std::span<const RangeQuery> queries, const GlobalIndex& gi,
                                 bool use_filter);

/// Round-1 kNN routing: each focal point goes to exactly one home.
std::vector<std::vector<Point>> route_knn_queries(std::span<const Point> focals,
                                                  const GlobalIndex& gi);

/// Wholesale replacement of per-partition filters collected from
/// workers. Throws std::out_of_range on an unknown partition id.
GlobalIndex merge_into_global(GlobalIndex global,
                              std::span<const std::pair<std::uint32_t, SFilter>> updated);

}  // namespace spatialq
