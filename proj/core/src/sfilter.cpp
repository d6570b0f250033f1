#include "spatialq/sfilter.hpp"

#include <algorithm>
#include <cstring>
#include <deque>

namespace spatialq {

namespace {

// Descend predicate of the filter DFS: positive-length overlap per axis,
// closed overlap on degenerate query axes.
bool filter_overlap(const Rect& q, const Rect& cell) {
    if (q.min_x == q.max_x) {
        if (q.min_x < cell.min_x || q.min_x > cell.max_x) return false;
    } else if (std::min(q.max_x, cell.max_x) <= std::max(q.min_x, cell.min_x)) {
        return false;
    }
    if (q.min_y == q.max_y) {
        if (q.min_y < cell.min_y || q.min_y > cell.max_y) return false;
    } else if (std::min(q.max_y, cell.max_y) <= std::max(q.min_y, cell.min_y)) {
        return false;
    }
    return true;
}

}  // namespace

std::uint64_t SFilter::complete_tree_bits(int depth) {
    const std::uint64_t leaves = std::uint64_t{1} << (2 * (depth - 1));  // 4^(d-1)
    const std::uint64_t internals = (leaves - 1) / 3;
    return internals * 4 + leaves;
}

SFilter SFilter::build_from_quadtree(const Quadtree& qt, int depth) {
    if (depth < 2)
        throw std::invalid_argument("sfilter: depth must be >= 2 (root alone is degenerate)");

    // Mirror the quadtree structure, collapsing below the cap.
    std::vector<TreeNode> nodes;
    struct Item {
        std::int32_t qt_node;
        std::int32_t out_node;
        int level;
    };
    nodes.push_back(TreeNode{});
    nodes[0].internal = true;
    std::deque<Item> work;
    work.push_back({0, 0, 0});
    const auto& qnodes = qt.nodes();
    while (!work.empty()) {
        const Item it = work.front();
        work.pop_front();
        for (int c = 0; c < 4; ++c) {
            TreeNode child;
            std::int32_t qt_child = -1;
            if (it.qt_node >= 0 && !qnodes[it.qt_node].is_leaf())
                qt_child = qnodes[it.qt_node].children[c];
            const bool subdivided = qt_child >= 0 && !qnodes[qt_child].is_leaf();
            if (subdivided && it.level + 1 < depth - 1) {
                child.internal = true;
                nodes.push_back(child);
                const auto idx = static_cast<std::int32_t>(nodes.size() - 1);
                nodes[it.out_node].child[c] = idx;
                work.push_back({qt_child, idx, it.level + 1});
            } else {
                nodes.push_back(child);
                nodes[it.out_node].child[c] = static_cast<std::int32_t>(nodes.size() - 1);
            }
        }
    }

    // Occupancy over closed quadrant rects: a point on a shared edge
    // marks every touching leaf so closed-range queries stay sound.
    const Rect boundary = qt.boundary();
    for (const Point& p : qt.points()) {
        std::vector<std::pair<std::int32_t, Rect>> stack{{0, boundary}};
        while (!stack.empty()) {
            auto [idx, cell] = stack.back();
            stack.pop_back();
            for (int c = 0; c < 4; ++c) {
                const Rect qrect = quadrant_rect(cell, c);
                if (!contains(qrect, p)) continue;
                const std::int32_t child = nodes[idx].child[c];
                if (nodes[child].internal)
                    stack.push_back({child, qrect});
                else
                    nodes[child].occupied = true;
            }
        }
    }

    return encode(nodes, boundary);
}

SFilter SFilter::encode(const std::vector<TreeNode>& nodes, const Rect& boundary) {
    SFilter sf;
    sf.boundary_ = boundary;

    // BFS over internal nodes; leaf bits are appended as their 0-bits are
    // emitted, which keeps the rank addressing consistent.
    struct Item {
        std::int32_t node;
        int level;
    };
    std::deque<Item> queue;
    queue.push_back({0, 0});
    int deepest_internal = 0;
    while (!queue.empty()) {
        const Item it = queue.front();
        queue.pop_front();
        deepest_internal = std::max(deepest_internal, it.level);
        if (sf.offsets_.size() <= static_cast<std::size_t>(it.level))
            sf.offsets_.push_back(
                {sf.internal_.size(), sf.internal_.count_ones(0, sf.internal_.size())});
        for (int c = 0; c < 4; ++c) {
            const std::int32_t ci = nodes[it.node].child[c];
            const bool internal = nodes[ci].internal;
            sf.internal_.push_back(internal);
            if (internal)
                queue.push_back({ci, it.level + 1});
            else
                sf.leaf_.push_back(nodes[ci].occupied);
        }
    }
    sf.depth_ = deepest_internal + 2;  // leaves sit one level below the deepest internal
    return sf;
}

std::uint64_t SFilter::chi_prefix(std::uint64_t ax) const {
    // Locate the level owning ax's 4-bit group, then count only within it.
    const std::uint64_t group_start = ax & ~std::uint64_t{3};
    std::size_t lo = 0, hi = offsets_.size();
    while (lo + 1 < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (offsets_[mid].first_bit <= group_start)
            lo = mid;
        else
            hi = mid;
    }
    return offsets_[lo].ones_before + internal_.count_ones(offsets_[lo].first_bit, ax + 1);
}

std::uint64_t SFilter::rank_ones(std::uint64_t from, std::uint64_t to) const {
    if (from > to || to >= internal_.size())
        throw std::out_of_range("sfilter: rank range out of bounds");
    const std::uint64_t upto = chi_prefix(to);
    const std::uint64_t before = from == 0 ? 0 : internal_.count_ones(0, from);
    return upto - before;
}

std::uint64_t SFilter::rank_zeros(std::uint64_t from, std::uint64_t to) const {
    if (from > to || to >= internal_.size())
        throw std::out_of_range("sfilter: rank range out of bounds");
    return (to - from + 1) - rank_ones(from, to);
}

SFilter::ChildRef SFilter::child_address(std::uint64_t ax) const {
    if (ax >= internal_.size()) throw std::out_of_range("sfilter: bit address out of bounds");
    if (internal_[ax]) return {Seq::internal, 4 * chi_prefix(ax)};
    return {Seq::leaf, (ax + 1 - chi_prefix(ax)) - 1};
}

bool SFilter::query(const Rect& q) const {
    if (internal_.empty() || !overlaps(q, boundary_)) return false;
    struct Item {
        std::uint64_t group;
        Rect cell;
    };
    std::vector<Item> stack{{0, boundary_}};
    while (!stack.empty()) {
        const Item it = stack.back();
        stack.pop_back();
        for (int c = 0; c < 4; ++c) {
            const Rect cell = quadrant_rect(it.cell, c);
            if (!filter_overlap(q, cell)) continue;
            const std::uint64_t ax = it.group + c;
            const ChildRef ref = child_address(ax);
            if (ref.seq == Seq::internal) {
                stack.push_back({ref.addr, cell});
            } else if (leaf_[ref.addr]) {
                return true;
            }
        }
    }
    return false;
}

std::vector<SFilter::TreeNode> SFilter::decode() const {
    std::vector<TreeNode> nodes;
    if (internal_.empty()) return nodes;
    const std::size_t internal_count = internal_.size() / 4;
    const std::size_t leaf_count = leaf_.size();
    nodes.resize(internal_count + leaf_count);

    std::size_t next_internal = 1;  // BFS order: child groups appear in bit order
    std::size_t next_leaf = 0;
    nodes[0].internal = true;
    for (std::size_t g = 0; g < internal_count; ++g) {
        for (int c = 0; c < 4; ++c) {
            if (internal_[4 * g + c]) {
                nodes[g].child[c] = static_cast<std::int32_t>(next_internal);
                nodes[next_internal].internal = true;
                ++next_internal;
            } else {
                const std::size_t leaf_idx = internal_count + next_leaf;
                nodes[g].child[c] = static_cast<std::int32_t>(leaf_idx);
                nodes[leaf_idx].occupied = leaf_[next_leaf];
                ++next_leaf;
            }
        }
    }
    return nodes;
}

SFilter SFilter::insert_empty(const Rect& q, int split_limit) const {
    if (internal_.empty() || !overlaps(q, boundary_)) return *this;
    if (split_limit <= 0) split_limit = depth_;

    std::vector<TreeNode> nodes = decode();

    // Recursive marking; occupied leaves partially covered by q split
    // into four conservative (occupied) children while levels remain.
    struct Frame {
        std::int32_t node;
        Rect cell;
        int level;
    };
    std::vector<Frame> stack{{0, boundary_, 0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        for (int c = 0; c < 4; ++c) {
            const Rect cell = quadrant_rect(f.cell, c);
            if (!filter_overlap(q, cell)) continue;
            const std::int32_t ci = nodes[f.node].child[c];
            if (nodes[ci].internal) {
                stack.push_back({ci, cell, f.level + 1});
                continue;
            }
            if (contains(q, cell)) {
                nodes[ci].occupied = false;
                continue;
            }
            if (!nodes[ci].occupied) continue;
            // Child leaves would sit at level f.level + 2.
            if (f.level + 2 >= split_limit) continue;
            nodes[ci].internal = true;
            nodes[ci].occupied = false;
            for (int cc = 0; cc < 4; ++cc) {
                TreeNode leaf;
                leaf.occupied = true;
                nodes.push_back(leaf);
                nodes[ci].child[cc] = static_cast<std::int32_t>(nodes.size() - 1);
            }
            stack.push_back({ci, cell, f.level + 1});
        }
    }
    return encode(nodes, boundary_);
}

SFilter SFilter::shrink(std::uint64_t space_budget_bits) const {
    if (space_budget_bits < 8)
        throw std::invalid_argument("sfilter: budget below the minimal 8-bit filter");
    if (space_bits() <= space_budget_bits) return *this;

    std::vector<TreeNode> nodes = decode();

    // BFS ids are level-ordered, so walking internal ids backwards merges
    // deepest-last-first, matching the bottom-up rule.
    const std::size_t internal_count = internal_.size() / 4;
    std::uint64_t bits = space_bits();
    for (std::size_t g = internal_count; g-- > 1 && bits > space_budget_bits;) {
        TreeNode& n = nodes[g];
        bool all_leaf = true;
        bool any_occupied = false;
        for (int c = 0; c < 4; ++c) {
            const TreeNode& child = nodes[n.child[c]];
            if (child.internal) {
                all_leaf = false;
                break;
            }
            any_occupied = any_occupied || child.occupied;
        }
        if (!all_leaf) continue;  // merged in a later pass once children fold
        n.internal = false;
        n.occupied = any_occupied;
        n.child = {-1, -1, -1, -1};
        bits -= 7;  // 4 internal bits and 4 leaf bits go, 1 leaf bit arrives
    }

    // Repeat passes while still over budget; each pass folds one level.
    SFilter out = encode(nodes, boundary_);
    if (out.space_bits() > space_budget_bits) return out.shrink(space_budget_bits);
    return out;
}

std::vector<std::uint8_t> SFilter::serialize() const {
    std::vector<std::uint8_t> out;
    out.push_back(0x5F);
    out.push_back(0x01);
    out.push_back(static_cast<std::uint8_t>(depth_));

    auto put_double = [&out](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    };
    put_double(boundary_.min_x);
    put_double(boundary_.min_y);
    put_double(boundary_.max_x);
    put_double(boundary_.max_y);

    auto put_bits = [&out](const BitVec& bv) {
        const std::uint64_t n = bv.size();
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
        std::uint8_t acc = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            if (bv[i]) acc |= static_cast<std::uint8_t>(1u << (i % 8));
            if (i % 8 == 7) {
                out.push_back(acc);
                acc = 0;
            }
        }
        if (n % 8 != 0) out.push_back(acc);
    };
    put_bits(internal_);
    put_bits(leaf_);
    return out;
}

SFilter SFilter::deserialize(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
        if (bytes.size() - pos < n) throw DecodeError("sfilter: truncated input");
    };
    need(3);
    if (bytes[0] != 0x5F) throw DecodeError("sfilter: bad magic byte");
    if (bytes[1] != 0x01) throw DecodeError("sfilter: unsupported version");
    const int depth = bytes[2];
    if (depth < 2) throw DecodeError("sfilter: depth below 2");
    pos = 3;

    auto get_double = [&]() {
        need(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= std::uint64_t{bytes[pos + i]} << (8 * i);
        pos += 8;
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    };
    Rect boundary;
    boundary.min_x = get_double();
    boundary.min_y = get_double();
    boundary.max_x = get_double();
    boundary.max_y = get_double();
    if (!boundary.valid()) throw DecodeError("sfilter: invalid boundary");

    auto get_bits = [&]() {
        need(8);
        std::uint64_t n = 0;
        for (int i = 0; i < 8; ++i) n |= std::uint64_t{bytes[pos + i]} << (8 * i);
        pos += 8;
        const std::size_t nbytes = static_cast<std::size_t>((n + 7) / 8);
        need(nbytes);
        BitVec bv;
        for (std::uint64_t i = 0; i < n; ++i)
            bv.push_back((bytes[pos + i / 8] >> (i % 8)) & 1u);
        pos += nbytes;
        return bv;
    };
    BitVec internal = get_bits();
    BitVec leaf = get_bits();
    if (pos != bytes.size()) throw DecodeError("sfilter: trailing bytes");
    if (internal.empty() || internal.size() % 4 != 0)
        throw DecodeError("sfilter: internal sequence length not a multiple of 4");
    const std::uint64_t ones = internal.count_ones(0, internal.size());
    if (ones + 1 != internal.size() / 4)
        throw DecodeError("sfilter: internal code count mismatch");
    if (internal.size() - ones != leaf.size())
        throw DecodeError("sfilter: leaf count mismatch");

    // Rebuild the filter through decode/encode so depth offsets and the
    // depth byte are re-derived rather than trusted.
    SFilter tmp;
    tmp.internal_ = std::move(internal);
    tmp.leaf_ = std::move(leaf);
    tmp.boundary_ = boundary;
    tmp.depth_ = depth;
    SFilter out = encode(tmp.decode(), boundary);
    if (out.depth_ != depth) throw DecodeError("sfilter: depth byte mismatch");
    return out;
}

}  // namespace spatialq
