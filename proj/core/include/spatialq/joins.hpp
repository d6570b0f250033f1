#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "spatialq/local_index.hpp"
#include "spatialq/rtree.hpp"

namespace spatialq {

/// (query_id, point_id) output row of a range join.
using IdPair = std::pair<std::uint64_t, std::uint64_t>;

/// Indexed nested-loops range join: probes the index once per query and
/// pairs the query id with every match. Pair order follows query order.
std::vector<IdPair> nest_range_join(const LocalIndex& index,
                                    std::span<const RangeQuery> queries,
                                    SearchCounters* counters = nullptr);

/// Simultaneous depth-first traversal of a query-rect R-tree and a data
/// R-tree, pruning node pairs with disjoint MBRs. Produces the same pair
/// multiset as nest_range_join on the same inputs. `node_pair_visits`
/// counts examined node pairs.
std::vector<IdPair> dual_tree_join(const RTree& query_tree, const RTree& data_tree,
                                   std::uint64_t* node_pair_visits = nullptr);

/// Indexed nested-loops kNN join: one knn_search per focal point.
std::vector<KnnResult> knn_join_nest(const LocalIndex& index, std::span<const Point> queries,
                                     int k, SearchCounters* counters = nullptr);

struct SfcurveStats {
    std::uint64_t data_blocks = 0;
    std::uint64_t blocks_scanned = 0;
    std::uint64_t blocks_pruned = 0;
};

/// Block kNN join over Hilbert-ordered blocks. Queries and data are
/// sorted by hilbert_key and cut into runs of at most block_size; per
/// query block, data blocks are visited in min-dist order and pruned
/// once their min-dist exceeds the block's current worst kth distance.
/// Output equals knn_join_nest on the same inputs.
std::vector<KnnResult> knn_join_sfcurve(std::span<const Point> data,
                                        std::span<const Point> queries, int k, int curve_order,
                                        std::size_t block_size,
                                        SfcurveStats* stats = nullptr);

}  // namespace spatialq
