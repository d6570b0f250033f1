#include "spatialq/joins.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "spatialq/hilbert.hpp"

namespace spatialq {

std::vector<IdPair> nest_range_join(const LocalIndex& index,
                                    std::span<const RangeQuery> queries,
                                    SearchCounters* counters) {
    std::vector<IdPair> out;
    SearchCounters local;
    std::vector<const Point*> hits;
    for (const RangeQuery& q : queries) {
        hits.clear();
        index.range_search(q.rect, hits, local);
        for (const Point* p : hits) out.emplace_back(q.id, p->id);
    }
    if (counters) *counters += local;
    return out;
}

std::vector<IdPair> dual_tree_join(const RTree& query_tree, const RTree& data_tree,
                                   std::uint64_t* node_pair_visits) {
    std::vector<IdPair> out;
    std::uint64_t visits = 0;
    if (query_tree.root() >= 0 && data_tree.root() >= 0) {
        std::vector<std::pair<std::int32_t, std::int32_t>> stack;
        stack.emplace_back(query_tree.root(), data_tree.root());
        while (!stack.empty()) {
            const auto [qi, di] = stack.back();
            stack.pop_back();
            ++visits;
            const RTree::Node& qn = query_tree.nodes()[qi];
            const RTree::Node& dn = data_tree.nodes()[di];
            if (!overlaps(qn.mbr, dn.mbr)) continue;
            if (qn.leaf && dn.leaf) {
                for (std::uint32_t qe : qn.entry_ords) {
                    const Rect& qr = query_tree.entry_mbrs()[qe];
                    if (!overlaps(qr, dn.mbr)) continue;
                    for (std::uint32_t de : dn.entry_ords) {
                        if (overlaps(qr, data_tree.entry_mbrs()[de]))
                            out.emplace_back(query_tree.entry_ids()[qe],
                                             data_tree.entry_ids()[de]);
                    }
                }
            } else if (qn.leaf) {
                for (std::int32_t c : dn.children) stack.emplace_back(qi, c);
            } else if (dn.leaf) {
                for (std::int32_t c : qn.children) stack.emplace_back(c, di);
            } else {
                // Descend both sides at once to keep the pair count low.
                for (std::int32_t qc : qn.children)
                    for (std::int32_t dc : dn.children) stack.emplace_back(qc, dc);
            }
        }
    }
    if (node_pair_visits) *node_pair_visits = visits;
    return out;
}

std::vector<KnnResult> knn_join_nest(const LocalIndex& index, std::span<const Point> queries,
                                     int k, SearchCounters* counters) {
    std::vector<KnnResult> out;
    out.reserve(queries.size());
    SearchCounters local;
    for (const Point& q : queries) out.push_back(index.knn_search(q, k, local));
    if (counters) *counters += local;
    return out;
}

namespace {

struct Block {
    Rect mbr{};
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Sort ordinals by (hilbert key, id) and cut into runs of block_size.
std::vector<Block> hilbert_blocks(std::span<const Point> pts, const Rect& boundary,
                                  int order, std::size_t block_size,
                                  std::vector<std::uint32_t>& ords) {
    ords.resize(pts.size());
    std::iota(ords.begin(), ords.end(), 0u);
    std::vector<std::uint64_t> keys(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) keys[i] = hilbert_key(pts[i], boundary, order);
    std::sort(ords.begin(), ords.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (keys[a] != keys[b]) return keys[a] < keys[b];
        return pts[a].id < pts[b].id;
    });

    std::vector<Block> blocks;
    for (std::size_t i = 0; i < ords.size(); i += block_size) {
        Block b;
        b.begin = i;
        b.end = std::min(ords.size(), i + block_size);
        b.mbr = Rect::from_point(pts[ords[i]]);
        for (std::size_t j = i; j < b.end; ++j)
            b.mbr = merged(b.mbr, Rect::from_point(pts[ords[j]]));
        blocks.push_back(b);
    }
    return blocks;
}

}  // namespace

std::vector<KnnResult> knn_join_sfcurve(std::span<const Point> data,
                                        std::span<const Point> queries, int k, int curve_order,
                                        std::size_t block_size, SfcurveStats* stats) {
    if (k < 1) throw std::invalid_argument("knn_join_sfcurve: k must be >= 1");
    if (curve_order < 1) throw std::invalid_argument("knn_join_sfcurve: curve_order must be >= 1");
    if (block_size < 1) block_size = 1;

    std::vector<KnnResult> out(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) out[i].query_id = queries[i].id;
    if (queries.empty()) return out;

    Rect boundary = bounds_of(data);
    if (data.empty())
        boundary = bounds_of(queries);
    else
        for (const Point& q : queries) boundary = merged(boundary, Rect::from_point(q));

    std::vector<std::uint32_t> data_ords, query_ords;
    const auto data_blocks = hilbert_blocks(data, boundary, curve_order, block_size, data_ords);
    const auto query_blocks =
        hilbert_blocks(queries, boundary, curve_order, block_size, query_ords);

    SfcurveStats local;
    local.data_blocks = data_blocks.size();

    const std::size_t want = static_cast<std::size_t>(k);
    std::vector<std::vector<Neighbor>> heaps;  // max-heap per query in the active block
    for (const Block& qb : query_blocks) {
        const std::size_t nq = qb.end - qb.begin;
        heaps.assign(nq, {});

        // Visit data blocks nearest-first so the bound tightens early.
        std::vector<std::size_t> order(data_blocks.size());
        std::iota(order.begin(), order.end(), 0u);
        std::vector<double> lower(data_blocks.size());
        for (std::size_t b = 0; b < data_blocks.size(); ++b)
            lower[b] = min_dist(qb.mbr, data_blocks[b].mbr);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (lower[a] != lower[b]) return lower[a] < lower[b];
            return a < b;
        });

        auto block_bound = [&]() {
            // Worst kth distance over the block's queries; infinite until
            // every query has k candidates.
            double worst = 0.0;
            for (const auto& h : heaps) {
                if (h.size() < want) return std::numeric_limits<double>::infinity();
                worst = std::max(worst, h.front().distance);
            }
            return worst;
        };

        for (std::size_t oi = 0; oi < order.size(); ++oi) {
            const Block& db = data_blocks[order[oi]];
            if (lower[order[oi]] > block_bound()) {
                local.blocks_pruned += order.size() - oi;
                break;
            }
            ++local.blocks_scanned;
            for (std::size_t j = db.begin; j < db.end; ++j) {
                const Point& dp = data[data_ords[j]];
                for (std::size_t qi = 0; qi < nq; ++qi) {
                    const Point& qp = queries[query_ords[qb.begin + qi]];
                    const Neighbor cand{dp.id, dist(qp, dp)};
                    auto& h = heaps[qi];
                    if (h.size() < want) {
                        h.push_back(cand);
                        std::push_heap(h.begin(), h.end(), neighbor_less);
                    } else if (neighbor_less(cand, h.front())) {
                        std::pop_heap(h.begin(), h.end(), neighbor_less);
                        h.back() = cand;
                        std::push_heap(h.begin(), h.end(), neighbor_less);
                    }
                }
            }
        }

        for (std::size_t qi = 0; qi < nq; ++qi) {
            auto& h = heaps[qi];
            std::sort(h.begin(), h.end(), neighbor_less);
            out[query_ords[qb.begin + qi]].neighbors = std::move(h);
        }
    }

    if (stats) *stats = local;
    return out;
}

}  // namespace spatialq
