#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "spatialq/cost.hpp"
#include "spatialq/global_index.hpp"

namespace spatialq {

/// One accepted split: which partition, into how many pieces, the
/// realized sub stats (ids assigned by the planner), the accept-guard
/// value (E-hat of the split), and the projected plan total afterwards.
struct PlanStep {
    std::uint32_t target = 0;
    int m_prime = 0;
    std::vector<std::uint32_t> sub_ids;
    std::vector<SubStat> subs;
    double step_cost = 0.0;
    double plan_total_after = 0.0;
};

/// Ordered accepted steps plus the projected costs. `final_cost` follows
/// the split-partition accounting: each split contributes its E-hat
/// bundle, untouched partitions contribute E, and the merge term covers
/// untouched partitions' queries.
struct Plan {
    std::vector<PlanStep> steps;
    double initial_cost = 0.0;
    double final_cost = 0.0;
    int budget_left = 0;

    bool empty() const { return steps.empty(); }
};

/// Supplies realized sub stats for a candidate split. The planner hands
/// out the ids the subs will carry if the step is accepted so callers
/// can stage materialized sub partitions.
using SplitPreview = std::function<std::vector<SubStat>(const Stat& target, int m_prime,
                                                        std::uint32_t first_child_id)>;

/// Greedy skew mitigation: repeatedly take the costliest partition,
/// size its split with number_of_partitions, and accept the realized
/// split only while both the Algorithm-1 guard (step cost below the
/// previous accepted cost) and a strict plan-total decrease hold.
/// `budget` counts the spare partition slots and drops by m' per step;
/// accepted sub partitions re-enter the candidate set.
Plan greedy_plan(std::vector<Stat> stats, int budget, const CostModel& cm,
                 const SplitPreview& preview);

enum class SplitStrategy { data_driven, query_driven };

/// Materialized piece of a split partition: the branch cells it covers,
/// its points, and its measured query count.
struct SubPartitionSpec {
    std::vector<Rect> cells;
    std::vector<Point> points;
    std::uint64_t query_count = 0;
};

/// Splits a partition along its quadtree leaf cells, grouped in Hilbert
/// order. data_driven balances point counts; query_driven (the default
/// strategy upstream) balances measured query frequencies over the
/// cells. Falls back to point-level quantile strips when the tree has
/// fewer leaves than m'. Sub point multisets union to the target's data.
std::vector<SubPartitionSpec> repartition(const Partition& target, int m_prime,
                                          SplitStrategy strategy,
                                          std::span<const RangeQuery> queries);

}  // namespace spatialq
