#include "spatialq/global_index.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace spatialq {

GlobalIndex GlobalIndex::from_regions(std::vector<Rect> regions, int rtree_fanout) {
    if (regions.empty()) throw std::invalid_argument("global index: no regions");
    GlobalIndex gi;
    gi.boundary_ = regions[0];
    for (const Rect& r : regions) gi.boundary_ = merged(gi.boundary_, r);
    std::vector<std::uint64_t> ids(regions.size());
    std::iota(ids.begin(), ids.end(), 0u);
    gi.routing_ = RTree::from_rects(regions, ids, rtree_fanout);
    gi.regions_ = std::move(regions);
    gi.filters_.resize(gi.regions_.size());
    return gi;
}

std::vector<std::uint32_t> GlobalIndex::overlapping(const Rect& q) const {
    std::vector<std::uint64_t> ids = routing_.search_ids(q);
    std::sort(ids.begin(), ids.end());
    return {ids.begin(), ids.end()};
}

std::optional<std::uint32_t> GlobalIndex::try_home(double x, double y) const {
    const Point p{x, y, 0, {}};
    std::optional<std::uint32_t> best;
    for (std::uint64_t id : routing_.search_ids(Rect::from_point(p))) {
        if (contains(regions_[id], p) && (!best || id < *best))
            best = static_cast<std::uint32_t>(id);
    }
    return best;
}

std::uint32_t GlobalIndex::home_or_nearest(double x, double y) const {
    if (auto home = try_home(x, y)) return *home;
    const Point p{x, y, 0, {}};
    std::uint32_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::uint32_t i = 0; i < regions_.size(); ++i) {
        const double d = min_dist(p, regions_[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

namespace {

// Cut `count` items into `parts` groups with the leftover spread over the
// leading groups; returns group boundaries (ends, cumulative).
std::vector<std::size_t> even_cuts(std::size_t count, std::size_t parts) {
    std::vector<std::size_t> ends(parts);
    const std::size_t base = count / parts;
    const std::size_t extra = count % parts;
    std::size_t acc = 0;
    for (std::size_t i = 0; i < parts; ++i) {
        acc += base + (i < extra ? 1 : 0);
        ends[i] = acc;
    }
    return ends;
}

}  // namespace

GlobalIndex build_global_index(std::span<const Point> sample, int n_partitions,
                               const Rect& boundary, int rtree_fanout) {
    if (n_partitions < 1) throw std::invalid_argument("global index: n_partitions must be >= 1");
    if (sample.empty()) throw std::invalid_argument("global index: empty sample");
    if (static_cast<std::size_t>(n_partitions) > sample.size())
        throw std::invalid_argument("global index: n_partitions exceeds sample size");
    if (!boundary.valid()) throw std::invalid_argument("global index: invalid boundary");

    const std::size_t n = static_cast<std::size_t>(n_partitions);
    std::vector<std::uint32_t> ords(sample.size());
    std::iota(ords.begin(), ords.end(), 0u);
    std::sort(ords.begin(), ords.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (sample[a].x != sample[b].x) return sample[a].x < sample[b].x;
        if (sample[a].y != sample[b].y) return sample[a].y < sample[b].y;
        return sample[a].id < sample[b].id;
    });

    // Distribute the n leaves over ceil(sqrt(n)) vertical slabs, then cut
    // each slab horizontally; cut coordinates come from the sample so
    // dense areas get narrow regions.
    const std::size_t slabs = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(n))));
    const std::vector<std::size_t> leaves_per_slab = even_cuts(n, slabs);

    std::vector<Rect> regions;
    regions.reserve(n);
    std::size_t prev_leaves = 0;
    std::size_t prev_points = 0;
    double slab_min_x = boundary.min_x;
    for (std::size_t s = 0; s < slabs; ++s) {
        const std::size_t slab_leaves = leaves_per_slab[s] - prev_leaves;
        const std::size_t leaves_after = n - leaves_per_slab[s];
        const std::size_t begin = prev_points;
        // Proportional share, clamped so this slab and all later ones keep
        // at least one point per leaf.
        std::size_t end = sample.size() * leaves_per_slab[s] / n;
        end = std::max(end, begin + slab_leaves);
        end = std::min(end, sample.size() - leaves_after);
        prev_leaves = leaves_per_slab[s];
        prev_points = end;

        const double slab_max_x =
            (s + 1 == slabs) ? boundary.max_x : sample[ords[end]].x;

        std::vector<std::uint32_t> slab_ords(ords.begin() + begin, ords.begin() + end);
        std::sort(slab_ords.begin(), slab_ords.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (sample[a].y != sample[b].y) return sample[a].y < sample[b].y;
            if (sample[a].x != sample[b].x) return sample[a].x < sample[b].x;
            return sample[a].id < sample[b].id;
        });

        const std::vector<std::size_t> cuts = even_cuts(slab_ords.size(), slab_leaves);
        double cell_min_y = boundary.min_y;
        for (std::size_t c = 0; c < slab_leaves; ++c) {
            const double cell_max_y = (c + 1 == slab_leaves)
                                          ? boundary.max_y
                                          : sample[slab_ords[cuts[c]]].y;
            regions.push_back({slab_min_x, cell_min_y, slab_max_x, cell_max_y});
            cell_min_y = cell_max_y;
        }
        slab_min_x = slab_max_x;
    }

    return GlobalIndex::from_regions(std::move(regions), rtree_fanout);
}

std::vector<Partition> partition_data(std::vector<Point> data, const GlobalIndex& gi,
                                      int node_capacity, int max_depth, int filter_depth) {
    const std::size_t n = gi.partition_count();
    std::vector<std::vector<Point>> buckets(n);
    for (Point& p : data) {
        const auto home = gi.try_home(p.x, p.y);
        if (!home)
            throw std::runtime_error("partition_data: point " + std::to_string(p.id) +
                                     " is not covered by any region");
        buckets[*home].push_back(std::move(p));
    }

    std::vector<Partition> parts(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        Partition& part = parts[i];
        part.id = i;
        part.region = gi.region(i);
        part.data = std::move(buckets[i]);
        part.local_index = std::make_shared<Quadtree>(part.data, part.region, node_capacity,
                                                      max_depth);
        part.filter = SFilter::build_from_quadtree(*part.local_index, filter_depth);
        part.stats.partition_id = i;
        part.stats.data_count = part.data.size();
        part.stats.area = part.region.area();
    }
    return parts;
}

RangeRouting route_range_queries(std::span<const RangeQuery> queries, const GlobalIndex& gi,
                                 bool use_filter) {
    RangeRouting routing;
    routing.per_partition.resize(gi.partition_count());
    for (const RangeQuery& q : queries) {
        for (std::uint32_t pid : gi.overlapping(q.rect)) {
            if (use_filter && !gi.filter(pid).query(q.rect)) {
                ++routing.pruned_by_filter;
                continue;
            }
            routing.per_partition[pid].push_back(q);
            ++routing.shuffle_count;
        }
    }
    return routing;
}

std::vector<std::vector<Point>> route_knn_queries(std::span<const Point> focals,
                                                  const GlobalIndex& gi) {
    std::vector<std::vector<Point>> per_partition(gi.partition_count());
    for (const Point& f : focals) per_partition[gi.home_or_nearest(f.x, f.y)].push_back(f);
    return per_partition;
}

GlobalIndex merge_into_global(GlobalIndex global,
                              std::span<const std::pair<std::uint32_t, SFilter>> updated) {
    for (const auto& [pid, filter] : updated) global.set_filter(pid, filter);
    return global;
}

}  // namespace spatialq
