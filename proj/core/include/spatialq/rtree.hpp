#pragma once

#include <cstdint>
#include <vector>

#include "spatialq/local_index.hpp"

namespace spatialq {

/// Sort-tile-recursive bulk-loaded R-tree. Entries are (mbr, id) pairs;
/// a tree built from points additionally owns the point records and then
/// satisfies the LocalIndex contract. Trees built from rects serve as
/// the query side of dual-tree joins and as the global routing tree.
class RTree final : public LocalIndex {
public:
    struct Node {
        Rect mbr;
        bool leaf = true;
        std::vector<std::int32_t> children;       // internal nodes
        std::vector<std::uint32_t> entry_ords;    // leaf nodes
    };

    RTree() = default;

    static RTree from_points(std::vector<Point> points, int fanout);
    static RTree from_rects(std::vector<Rect> rects, std::vector<std::uint64_t> ids, int fanout);

    void range_search(const Rect& q, std::vector<const Point*>& out,
                      SearchCounters& counters) const override;
    KnnResult knn_search(const Point& q, int k, SearchCounters& counters) const override;

    std::size_t size() const override { return entry_mbrs_.size(); }
    std::size_t node_count() const override { return nodes_.size(); }
    const Rect& boundary() const override { return boundary_; }

    using LocalIndex::knn_search;
    using LocalIndex::range_search;

    /// Entry ids whose mbrs overlap q (works for point and rect trees).
    std::vector<std::uint64_t> search_ids(const Rect& q) const;

    bool empty() const { return entry_mbrs_.empty(); }
    int height() const;
    std::int32_t root() const { return root_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Rect>& entry_mbrs() const { return entry_mbrs_; }
    const std::vector<std::uint64_t>& entry_ids() const { return entry_ids_; }
    const std::vector<Point>& points() const { return points_; }

private:
    void build(int fanout);

    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
    std::vector<Rect> entry_mbrs_;
    std::vector<std::uint64_t> entry_ids_;
    std::vector<Point> points_;  // empty for rect trees
    Rect boundary_{};
};

}  // namespace spatialq
