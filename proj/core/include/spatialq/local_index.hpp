#pragma once

#include <cstdint>
#include <vector>

#include "spatialq/geometry.hpp"

namespace spatialq {

/// Deterministic operation tallies emitted by every search. They are the
/// engine's time proxy: the scheduler and the metrics layer consume them
/// instead of wall-clock measurements.
struct SearchCounters {
    std::uint64_t nodes_visited = 0;
    std::uint64_t points_checked = 0;

    std::uint64_t total() const { return nodes_visited + points_checked; }

    SearchCounters& operator+=(const SearchCounters& o) {
        nodes_visited += o.nodes_visited;
        points_checked += o.points_checked;
        return *this;
    }
};

struct Neighbor {
    std::uint64_t point_id = 0;
    double distance = 0.0;

    bool operator==(const Neighbor&) const = default;
};

/// kNN ties are broken by (distance, point_id) ascending so that every
/// result is unique for a given input.
inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.point_id < b.point_id;
}

/// One kNN row: the query's neighbors in non-decreasing (distance, id)
/// order, min(k, |D|) of them.
struct KnnResult {
    std::uint64_t query_id = 0;
    std::vector<Neighbor> neighbors;
};

/// A range query with a stable identifier carried through routing and
/// join output.
struct RangeQuery {
    Rect rect;
    std::uint64_t id = 0;
};

/// Per-partition search structure over an immutable point set. Searches
/// are const and safe to run concurrently once construction finishes.
class LocalIndex {
public:
    virtual ~LocalIndex() = default;

    /// Exactly the points p with contains(q, p), in deterministic order.
    virtual void range_search(const Rect& q, std::vector<const Point*>& out,
                              SearchCounters& counters) const = 0;

    /// The min(k, size()) nearest points to q. Throws std::invalid_argument
    /// when k < 1.
    virtual KnnResult knn_search(const Point& q, int k, SearchCounters& counters) const = 0;

    virtual std::size_t size() const = 0;
    virtual std::size_t node_count() const = 0;
    virtual const Rect& boundary() const = 0;

    std::vector<const Point*> range_search(const Rect& q) const {
        std::vector<const Point*> out;
        SearchCounters c;
        range_search(q, out, c);
        return out;
    }

    KnnResult knn_search(const Point& q, int k) const {
        SearchCounters c;
        return knn_search(q, k, c);
    }
};

}  // namespace spatialq
