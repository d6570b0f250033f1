#pragma once

#include <cstdint>
#include <vector>

#include "spatialq/local_index.hpp"

namespace spatialq {

/// Point quadtree with capacity-based splitting. A leaf holding more than
/// `node_capacity` points splits into four children (NW, NE, SE, SW)
/// unless it sits at `max_depth`; each point is assigned to exactly one
/// child by the half-open quadrant rule. Construction is deterministic
/// for a fixed input order.
class Quadtree final : public LocalIndex {
public:
    struct Node {
        Rect cell;
        int depth = 0;
        std::int32_t children[4] = {-1, -1, -1, -1};  // indices into nodes(); -1 when leaf
        std::vector<std::uint32_t> point_ords;        // leaf payload, ordinals into points()

        bool is_leaf() const { return children[0] < 0; }
    };

    /// Throws std::invalid_argument naming the offending point id when a
    /// point falls outside `boundary`.
    Quadtree(std::vector<Point> points, Rect boundary, int node_capacity, int max_depth);

    void range_search(const Rect& q, std::vector<const Point*>& out,
                      SearchCounters& counters) const override;
    KnnResult knn_search(const Point& q, int k, SearchCounters& counters) const override;

    std::size_t size() const override { return points_.size(); }
    std::size_t node_count() const override { return nodes_.size(); }
    const Rect& boundary() const override { return boundary_; }

    using LocalIndex::knn_search;
    using LocalIndex::range_search;

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Point>& points() const { return points_; }
    int node_capacity() const { return node_capacity_; }
    int max_depth() const { return max_depth_; }

    /// Depth of the deepest node plus one (a lone root leaf has depth 1).
    int levels() const;

private:
    void split(std::int32_t node_idx);

    std::vector<Point> points_;
    std::vector<Node> nodes_;
    Rect boundary_;
    int node_capacity_ = 64;
    int max_depth_ = 16;
};

}  // namespace spatialq
