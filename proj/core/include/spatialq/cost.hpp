#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spatialq/global_index.hpp"

namespace spatialq {

enum class CostMode { analytic, sampled };

/// Cost constants for the planner. Analytic mode reproduces the closed
/// forms (E = |D||Q| p_e and friends); sampled mode prices a partition by
/// deterministic operation counts measured on sampled data, scaled by
/// 1/alpha.
struct CostModel {
    double p_e = 0.2;    // per-visit search cost
    double p_m = 0.05;   // per-result merge cost
    double p_r = 0.01;   // per-point repartition (shuffle) cost
    double p_x = 0.02;   // per-point re-index cost
    double lambda = 10;  // average results per query
    double alpha = 0.1;  // sample ratio for sampled-mode estimates
    double theta = 2.0;  // skew flag: E > theta x median E
    CostMode mode = CostMode::analytic;
};

/// Reduced stat used for trial and realized splits.
struct SubStat {
    std::uint64_t data_count = 0;
    std::uint64_t query_count = 0;
    std::uint64_t sampled_op_count = 0;
};

/// E(D_i): local execution cost of one partition.
double local_cost(const Stat& stat, const CostModel& cm);
double local_cost(const SubStat& stat, const CostModel& cm);

/// rho(Q): cost of merging |Q| local result sets.
double merge_cost(std::uint64_t query_count, const CostModel& cm);

/// beta(D_i, m'): shuffling cost of splitting a partition m' ways.
double repartition_cost(std::uint64_t data_count, int m_prime, const CostModel& cm);

/// gamma(D_s): re-index cost of one new sub-partition.
double reindex_cost(std::uint64_t data_count, const CostModel& cm);

/// Total plan cost: max_i E(D_i) + rho(all queries).
double total_cost(std::span<const Stat> stats, const CostModel& cm);

/// Same value computed through the skew / non-skew regrouping; kept as a
/// separate evaluation route for the algebraic identity check.
double total_cost_grouped(std::span<const Stat> stats, const std::vector<bool>& skewed,
                          const CostModel& cm);

/// E-hat: projected cost of a split partition,
/// beta + max_s(gamma(D_s) + E(D_s)) + rho(target queries).
double split_cost(const Stat& target, std::span<const SubStat> subs, const CostModel& cm);

/// Smallest m' in [2, budget] whose even-split projection satisfies
/// max(Delta, E-hat) < E(target) + rho(all queries), where Delta is the
/// best the rest of the cluster can do without the target. nullopt when
/// no m' qualifies.
std::optional<int> number_of_partitions(std::span<const Stat> others, const Stat& target,
                                        int budget, const CostModel& cm);

/// Partitions whose local cost exceeds theta times the median.
std::vector<bool> flag_skewed(std::span<const Stat> stats, const CostModel& cm);

}  // namespace spatialq
