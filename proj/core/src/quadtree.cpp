#include "spatialq/quadtree.hpp"

#include <queue>
#include <stdexcept>
#include <string>

namespace spatialq {

Quadtree::Quadtree(std::vector<Point> points, Rect boundary, int node_capacity, int max_depth)
    : points_(std::move(points)),
      boundary_(boundary),
      node_capacity_(node_capacity < 1 ? 1 : node_capacity),
      max_depth_(max_depth < 0 ? 0 : max_depth) {
    if (!boundary_.valid()) throw std::invalid_argument("quadtree: invalid boundary");
    for (const Point& p : points_) {
        if (!contains(boundary_, p))
            throw std::invalid_argument("quadtree: point " + std::to_string(p.id) +
                                        " outside boundary");
    }

    Node root;
    root.cell = boundary_;
    root.depth = 0;
    root.point_ords.reserve(points_.size());
    for (std::uint32_t i = 0; i < points_.size(); ++i) root.point_ords.push_back(i);
    nodes_.push_back(std::move(root));

    // Iterative splitting; children are appended so parents keep stable
    // indices.
    std::queue<std::int32_t> pending;
    pending.push(0);
    while (!pending.empty()) {
        const std::int32_t idx = pending.front();
        pending.pop();
        Node& n = nodes_[idx];
        if (n.point_ords.size() <= static_cast<std::size_t>(node_capacity_) ||
            n.depth >= max_depth_)
            continue;
        split(idx);
        for (int q = 0; q < 4; ++q) pending.push(nodes_[idx].children[q]);
    }
}

void Quadtree::split(std::int32_t node_idx) {
    const Rect cell = nodes_[node_idx].cell;
    const int depth = nodes_[node_idx].depth;
    std::vector<std::uint32_t> ords = std::move(nodes_[node_idx].point_ords);
    nodes_[node_idx].point_ords.clear();

    std::int32_t base = static_cast<std::int32_t>(nodes_.size());
    for (int q = 0; q < 4; ++q) {
        Node child;
        child.cell = quadrant_rect(cell, q);
        child.depth = depth + 1;
        nodes_.push_back(std::move(child));
        nodes_[node_idx].children[q] = base + q;
    }
    for (std::uint32_t ord : ords) {
        const Point& p = points_[ord];
        const int q = quadrant_of(cell, p.x, p.y);
        nodes_[nodes_[node_idx].children[q]].point_ords.push_back(ord);
    }
}

void Quadtree::range_search(const Rect& q, std::vector<const Point*>& out,
                            SearchCounters& counters) const {
    if (nodes_.empty() || !overlaps(q, boundary_)) return;
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
        const Node& n = nodes_[stack.back()];
        stack.pop_back();
        ++counters.nodes_visited;
        if (n.is_leaf()) {
            for (std::uint32_t ord : n.point_ords) {
                ++counters.points_checked;
                if (contains(q, points_[ord])) out.push_back(&points_[ord]);
            }
            continue;
        }
        // Push in reverse so children are visited NW..SW.
        for (int c = 3; c >= 0; --c) {
            const std::int32_t child = n.children[c];
            if (overlaps(q, nodes_[child].cell)) stack.push_back(child);
        }
    }
}

KnnResult Quadtree::knn_search(const Point& q, int k, SearchCounters& counters) const {
    if (k < 1) throw std::invalid_argument("knn_search: k must be >= 1");
    KnnResult result;
    result.query_id = q.id;

    // Worst candidate on top so it can be evicted first.
    auto worse = [](const Neighbor& a, const Neighbor& b) { return neighbor_less(a, b); };
    std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(worse)> best(worse);

    struct Pending {
        double bound;
        std::int32_t node;
    };
    auto farther = [](const Pending& a, const Pending& b) {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.node > b.node;
    };
    std::priority_queue<Pending, std::vector<Pending>, decltype(farther)> frontier(farther);
    frontier.push({min_dist(q, boundary_), 0});

    const std::size_t want = static_cast<std::size_t>(k);
    while (!frontier.empty()) {
        const Pending top = frontier.top();
        frontier.pop();
        if (best.size() == want && top.bound > best.top().distance) break;
        const Node& n = nodes_[top.node];
        ++counters.nodes_visited;
        if (n.is_leaf()) {
            for (std::uint32_t ord : n.point_ords) {
                ++counters.points_checked;
                const Neighbor cand{points_[ord].id, dist(q, points_[ord])};
                if (best.size() < want) {
                    best.push(cand);
                } else if (neighbor_less(cand, best.top())) {
                    best.pop();
                    best.push(cand);
                }
            }
            continue;
        }
        for (int c = 0; c < 4; ++c) {
            const std::int32_t child = n.children[c];
            const double bound = min_dist(q, nodes_[child].cell);
            if (best.size() == want && bound > best.top().distance) continue;
            frontier.push({bound, child});
        }
    }

    result.neighbors.resize(best.size());
    for (std::size_t i = best.size(); i-- > 0;) {
        result.neighbors[i] = best.top();
        best.pop();
    }
    return result;
}

int Quadtree::levels() const {
    int deepest = 0;
    for (const Node& n : nodes_) deepest = std::max(deepest, n.depth);
    return deepest + 1;
}

}  // namespace spatialq
