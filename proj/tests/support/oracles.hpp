#pragma once

// Brute-force oracles. These stay independent of the index code paths
// they check: plain loops over the raw inputs.

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "spatialq/geometry.hpp"
#include "spatialq/local_index.hpp"

namespace spatialq::oracle {

inline std::vector<std::uint64_t> brute_range(std::span<const Point> points, const Rect& q) {
    std::vector<std::uint64_t> out;
    for (const Point& p : points)
        if (q.min_x <= p.x && p.x <= q.max_x && q.min_y <= p.y && p.y <= q.max_y)
            out.push_back(p.id);
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Neighbor> brute_knn(std::span<const Point> points, const Point& q, int k) {
    std::vector<Neighbor> all;
    all.reserve(points.size());
    for (const Point& p : points) all.push_back({p.id, dist(q, p)});
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.point_id < b.point_id;
    });
    if (all.size() > static_cast<std::size_t>(k)) all.resize(static_cast<std::size_t>(k));
    return all;
}

inline std::vector<std::pair<std::uint64_t, std::uint64_t>> brute_range_join(
    std::span<const Point> points, std::span<const RangeQuery> queries) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (const RangeQuery& q : queries)
        for (std::uint64_t pid : brute_range(points, q.rect)) out.emplace_back(q.id, pid);
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<KnnResult> brute_knn_join(std::span<const Point> points,
                                             std::span<const Point> queries, int k) {
    std::vector<KnnResult> out;
    out.reserve(queries.size());
    for (const Point& q : queries) out.push_back({q.id, brute_knn(points, q, k)});
    return out;
}

/// Naive per-bit counter for rank checks.
template <typename Bits>
std::uint64_t naive_ones(const Bits& bits, std::size_t from, std::size_t to_inclusive) {
    std::uint64_t n = 0;
    for (std::size_t i = from; i <= to_inclusive; ++i)
        if (bits[i]) ++n;
    return n;
}

inline std::vector<std::pair<std::uint64_t, std::uint64_t>> sorted_pairs(
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

}  // namespace spatialq::oracle
