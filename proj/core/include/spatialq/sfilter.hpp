#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spatialq/bitvec.hpp"
#include "spatialq/geometry.hpp"
#include "spatialq/quadtree.hpp"

namespace spatialq {

struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-level precomputed pair: bit address of the first internal node at
/// that level and the number of 1-bits strictly before it.
struct DepthOffset {
    std::uint64_t first_bit = 0;
    std::uint64_t ones_before = 0;

    bool operator==(const DepthOffset&) const = default;
};

/// Succinct quadtree occupancy filter. Internal nodes are 4-bit codes in
/// BFS order (one bit per child, clockwise from the upper-left quadrant,
/// 1 = child internal, 0 = child leaf); leaves are single occupancy bits
/// ordered like the 0-bits of the internal sequence. Child addresses are
/// computed by rank, so the structure carries no pointers.
///
/// Occupancy is tracked against closed quadrant rects, and range queries
/// descend only into quadrants sharing positive-length overlap per axis
/// (degenerate query axes fall back to closed overlap). Under that rule
/// the filter never reports false for a range that contains a point, and
/// a range certified empty via insert_empty stays false when replayed,
/// provided it decomposes into whole quadrants within the split limit.
///
/// Values are immutable: insert_empty and shrink return new filters.
class SFilter {
public:
    enum class Seq : std::uint8_t { internal, leaf };

    struct ChildRef {
        Seq seq = Seq::internal;
        std::uint64_t addr = 0;

        bool operator==(const ChildRef&) const = default;
    };

    SFilter() = default;

    /// Mirrors the quadtree's subdivision structure capped at `depth`
    /// levels; subtrees below the cap collapse into occupancy leaves.
    /// Throws std::invalid_argument when depth < 2.
    static SFilter build_from_quadtree(const Quadtree& qt, int depth);

    /// chi: number of 1-bits in the internal sequence from bit `from` to
    /// bit `to` inclusive. Throws std::out_of_range on bad addresses.
    std::uint64_t rank_ones(std::uint64_t from, std::uint64_t to) const;
    /// tau: number of 0-bits, same range convention.
    std::uint64_t rank_zeros(std::uint64_t from, std::uint64_t to) const;

    /// Address of the child that bit `ax` refers to: internal children
    /// live at 4*chi(0, ax); leaf children at rank position
    /// tau(0, ax) - 1 of the leaf sequence.
    ChildRef child_address(std::uint64_t ax) const;

    /// True when some occupied quadrant overlaps q; false otherwise
    /// (including when q misses the boundary entirely). No false
    /// negatives; false positives where q touches an occupied quadrant
    /// that holds no matching point.
    bool query(const Rect& q) const;

    /// Marks quadrants fully covered by the empty-certified range q as
    /// unoccupied, recursively splitting partially covered occupied
    /// quadrants until nodes would exceed `split_limit` levels
    /// (0 = current depth). Never marks a partially covered quadrant.
    SFilter insert_empty(const Rect& q, int split_limit = 0) const;

    /// Bottom-up merge of the deepest internal nodes (last in BFS order
    /// first) until space_bits() fits the budget. A merged node becomes a
    /// leaf carrying the OR of its children's bits, so answers can only
    /// move from false to true. Throws std::invalid_argument when the
    /// budget cannot hold the minimal 8-bit filter.
    SFilter shrink(std::uint64_t space_budget_bits) const;

    std::uint64_t space_bits() const { return internal_.size() + leaf_.size(); }

    /// Wire format (little-endian): magic 0x5F, version, depth byte,
    /// boundary as 4 doubles, then each bit sequence as a u64 bit count
    /// followed by LSB-first bytes padded to a byte boundary.
    std::vector<std::uint8_t> serialize() const;
    static SFilter deserialize(const std::vector<std::uint8_t>& bytes);

    int depth() const { return depth_; }
    const Rect& boundary() const { return boundary_; }
    const BitVec& internal_bits() const { return internal_; }
    const BitVec& leaf_bits() const { return leaf_; }
    const std::vector<DepthOffset>& depth_offsets() const { return offsets_; }
    bool empty() const { return internal_.empty(); }

    bool operator==(const SFilter& other) const {
        return depth_ == other.depth_ && boundary_ == other.boundary_ &&
               internal_ == other.internal_ && leaf_ == other.leaf_;
    }

    /// Total bits of a complete filter of `depth` levels.
    static std::uint64_t complete_tree_bits(int depth);

    /// Explicit pointer-tree form used by the adaptive operations and by
    /// structural tests. Node 0 is the root; leaf nodes carry `occupied`.
    struct TreeNode {
        bool internal = false;
        bool occupied = false;
        std::array<std::int32_t, 4> child{-1, -1, -1, -1};
    };
    std::vector<TreeNode> decode() const;

private:
    static SFilter encode(const std::vector<TreeNode>& nodes, const Rect& boundary);
    std::uint64_t chi_prefix(std::uint64_t ax) const;  // ones in [0, ax]

    BitVec internal_;
    BitVec leaf_;
    int depth_ = 0;  // effective levels, leaves included
    Rect boundary_{};
    std::vector<DepthOffset> offsets_;
};

}  // namespace spatialq
