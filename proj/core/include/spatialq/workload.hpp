#pragma once

#include <cstdint>
#include <vector>

#include "spatialq/local_index.hpp"

namespace spatialq {

struct HotspotCenter {
    double x = 0.0;
    double y = 0.0;
    double radius = 0.0;
    double weight = 0.0;
};

/// Seeded workload description. `uniform` draws query anchors anywhere in
/// the boundary; `hotspot` draws each anchor inside one of the weighted
/// circles (weights must sum to 1).
struct WorkloadSpec {
    enum class Kind { uniform, hotspot };
    Kind kind = Kind::uniform;
    std::size_t count = 0;
    std::vector<HotspotCenter> centers;
    double min_extent = 1.0;  // range query side lengths, uniform in [min, max]
    double max_extent = 1.0;
    int k = 10;  // carried along for knn workloads
    std::uint64_t seed = 0;

    void validate() const;
};

/// Range queries centered on the drawn anchors, clamped to the boundary.
std::vector<RangeQuery> gen_range_workload(const WorkloadSpec& spec, const Rect& boundary);

/// kNN focal points at the drawn anchors; ids start at 0.
std::vector<Point> gen_knn_workload(const WorkloadSpec& spec, const Rect& boundary);

// Synthetic datasets for benchmarks and tests.
std::vector<Point> gen_uniform_points(std::size_t count, const Rect& boundary,
                                      std::uint64_t seed);
/// Gaussian blobs around `clusters` seeded centers; leaves parts of the
/// boundary empty, which is what gives filters something to prune.
std::vector<Point> gen_clustered_points(std::size_t count, const Rect& boundary,
                                        int clusters, double spread, std::uint64_t seed);

}  // namespace spatialq
