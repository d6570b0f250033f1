#include "spatialq/rtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace spatialq {

namespace {

// Slice `ords` (already sorted by x-center) into vertical slabs of
// `slab_size`, sort each slab by y-center, then cut runs of `run` — the
// classic STR tiling.
std::vector<std::vector<std::uint32_t>> str_tile(std::vector<std::uint32_t> ords,
                                                 const std::vector<Rect>& mbrs,
                                                 std::size_t run) {
    const std::size_t n = ords.size();
    const std::size_t groups = (n + run - 1) / run;
    const std::size_t slabs = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(groups)))));
    const std::size_t groups_per_slab = (groups + slabs - 1) / slabs;

    auto by_x = [&](std::uint32_t a, std::uint32_t b) {
        const double ax = mbrs[a].center_x(), bx = mbrs[b].center_x();
        if (ax != bx) return ax < bx;
        return a < b;
    };
    auto by_y = [&](std::uint32_t a, std::uint32_t b) {
        const double ay = mbrs[a].center_y(), by = mbrs[b].center_y();
        if (ay != by) return ay < by;
        return a < b;
    };

    std::sort(ords.begin(), ords.end(), by_x);

    std::vector<std::vector<std::uint32_t>> out;
    const std::size_t slab_span = groups_per_slab * run;
    for (std::size_t s = 0; s < n; s += slab_span) {
        const std::size_t hi = std::min(n, s + slab_span);
        std::sort(ords.begin() + s, ords.begin() + hi, by_y);
        for (std::size_t i = s; i < hi; i += run) {
            const std::size_t j = std::min(hi, i + run);
            out.emplace_back(ords.begin() + i, ords.begin() + j);
        }
    }
    return out;
}

}  // namespace

RTree RTree::from_points(std::vector<Point> points, int fanout) {
    RTree t;
    t.points_ = std::move(points);
    t.entry_mbrs_.reserve(t.points_.size());
    t.entry_ids_.reserve(t.points_.size());
    for (const Point& p : t.points_) {
        t.entry_mbrs_.push_back(Rect::from_point(p));
        t.entry_ids_.push_back(p.id);
    }
    t.build(fanout);
    return t;
}

RTree RTree::from_rects(std::vector<Rect> rects, std::vector<std::uint64_t> ids, int fanout) {
    if (rects.size() != ids.size())
        throw std::invalid_argument("rtree: rects/ids size mismatch");
    RTree t;
    t.entry_mbrs_ = std::move(rects);
    t.entry_ids_ = std::move(ids);
    t.build(fanout);
    return t;
}

void RTree::build(int fanout) {
    if (fanout < 2) throw std::invalid_argument("rtree: fanout must be >= 2");
    if (entry_mbrs_.empty()) {
        root_ = -1;
        boundary_ = {};
        return;
    }

    boundary_ = entry_mbrs_[0];
    for (const Rect& r : entry_mbrs_) boundary_ = merged(boundary_, r);

    const std::size_t run = static_cast<std::size_t>(fanout);

    // Leaf level.
    std::vector<std::uint32_t> all(entry_mbrs_.size());
    std::iota(all.begin(), all.end(), 0u);
    std::vector<std::int32_t> level;
    for (auto& group : str_tile(std::move(all), entry_mbrs_, run)) {
        Node n;
        n.leaf = true;
        n.mbr = entry_mbrs_[group[0]];
        for (std::uint32_t ord : group) n.mbr = merged(n.mbr, entry_mbrs_[ord]);
        n.entry_ords = std::move(group);
        level.push_back(static_cast<std::int32_t>(nodes_.size()));
        nodes_.push_back(std::move(n));
    }

    // Upper levels until a single root remains.
    while (level.size() > 1) {
        std::vector<Rect> level_mbrs(level.size());
        for (std::size_t i = 0; i < level.size(); ++i) level_mbrs[i] = nodes_[level[i]].mbr;
        std::vector<std::uint32_t> ords(level.size());
        std::iota(ords.begin(), ords.end(), 0u);

        std::vector<std::int32_t> next;
        for (auto& group : str_tile(std::move(ords), level_mbrs, run)) {
            Node n;
            n.leaf = false;
            n.mbr = level_mbrs[group[0]];
            for (std::uint32_t g : group) {
                n.mbr = merged(n.mbr, level_mbrs[g]);
                n.children.push_back(level[g]);
            }
            next.push_back(static_cast<std::int32_t>(nodes_.size()));
            nodes_.push_back(std::move(n));
        }
        level = std::move(next);
    }
    root_ = level[0];
}

void RTree::range_search(const Rect& q, std::vector<const Point*>& out,
                         SearchCounters& counters) const {
    if (points_.empty() && !entry_mbrs_.empty())
        throw std::logic_error("rtree: range_search over points requires a point tree");
    if (root_ < 0) return;
    std::vector<std::int32_t> stack{root_};
    while (!stack.empty()) {
        const Node& n = nodes_[stack.back()];
        stack.pop_back();
        if (!overlaps(q, n.mbr)) continue;
        ++counters.nodes_visited;
        if (n.leaf) {
            for (std::uint32_t ord : n.entry_ords) {
                ++counters.points_checked;
                if (contains(q, points_[ord])) out.push_back(&points_[ord]);
            }
        } else {
            for (auto it = n.children.rbegin(); it != n.children.rend(); ++it)
                stack.push_back(*it);
        }
    }
}

std::vector<std::uint64_t> RTree::search_ids(const Rect& q) const {
    std::vector<std::uint64_t> out;
    if (root_ < 0) return out;
    std::vector<std::int32_t> stack{root_};
    while (!stack.empty()) {
        const Node& n = nodes_[stack.back()];
        stack.pop_back();
        if (!overlaps(q, n.mbr)) continue;
        if (n.leaf) {
            for (std::uint32_t ord : n.entry_ords)
                if (overlaps(q, entry_mbrs_[ord])) out.push_back(entry_ids_[ord]);
        } else {
            for (auto it = n.children.rbegin(); it != n.children.rend(); ++it)
                stack.push_back(*it);
        }
    }
    return out;
}

KnnResult RTree::knn_search(const Point& q, int k, SearchCounters& counters) const {
    if (k < 1) throw std::invalid_argument("knn_search: k must be >= 1");
    if (points_.empty() && !entry_mbrs_.empty())
        throw std::logic_error("rtree: knn_search requires a point tree");

    KnnResult result;
    result.query_id = q.id;
    if (root_ < 0) return result;

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
    frontier.push({min_dist(q, nodes_[root_].mbr), root_});

    const std::size_t want = static_cast<std::size_t>(k);
    while (!frontier.empty()) {
        const Pending top = frontier.top();
        frontier.pop();
        if (best.size() == want && top.bound > best.top().distance) break;
        const Node& n = nodes_[top.node];
        ++counters.nodes_visited;
        if (n.leaf) {
            for (std::uint32_t ord : n.entry_ords) {
                ++counters.points_checked;
                const Neighbor cand{points_[ord].id, dist(q, points_[ord])};
                if (best.size() < want) {
                    best.push(cand);
                } else if (neighbor_less(cand, best.top())) {
                    best.pop();
                    best.push(cand);
                }
            }
        } else {
            for (std::int32_t child : n.children) {
                const double bound = min_dist(q, nodes_[child].mbr);
                if (best.size() == want && bound > best.top().distance) continue;
                frontier.push({bound, child});
            }
        }
    }

    result.neighbors.resize(best.size());
    for (std::size_t i = best.size(); i-- > 0;) {
        result.neighbors[i] = best.top();
        best.pop();
    }
    return result;
}

int RTree::height() const {
    if (root_ < 0) return 0;
    int h = 1;
    std::int32_t n = root_;
    while (!nodes_[n].leaf) {
        n = nodes_[n].children[0];
        ++h;
    }
    return h;
}

}  // namespace spatialq
