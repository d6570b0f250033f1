#include "spatialq/cost.hpp"

#include <algorithm>
#include <cmath>

namespace spatialq {

namespace {

double local_cost_impl(std::uint64_t data_count, std::uint64_t query_count,
                       std::uint64_t sampled_ops, const CostModel& cm) {
    if (query_count == 0 || data_count == 0) return 0.0;
    if (cm.mode == CostMode::sampled)
        return static_cast<double>(sampled_ops) / cm.alpha * cm.p_e;
    return static_cast<double>(data_count) * static_cast<double>(query_count) * cm.p_e;
}

}  // namespace

double local_cost(const Stat& stat, const CostModel& cm) {
    return local_cost_impl(stat.data_count, stat.query_count, stat.sampled_op_count, cm);
}

double local_cost(const SubStat& stat, const CostModel& cm) {
    return local_cost_impl(stat.data_count, stat.query_count, stat.sampled_op_count, cm);
}

double merge_cost(std::uint64_t query_count, const CostModel& cm) {
    return static_cast<double>(query_count) * cm.lambda * cm.p_m;
}

double repartition_cost(std::uint64_t data_count, int m_prime, const CostModel& cm) {
    return static_cast<double>(data_count) * static_cast<double>(m_prime) * cm.p_r;
}

double reindex_cost(std::uint64_t data_count, const CostModel& cm) {
    return static_cast<double>(data_count) * cm.p_x;
}

double total_cost(std::span<const Stat> stats, const CostModel& cm) {
    double worst = 0.0;
    std::uint64_t queries = 0;
    for (const Stat& s : stats) {
        worst = std::max(worst, local_cost(s, cm));
        queries += s.query_count;
    }
    if (queries == 0 && worst == 0.0) return 0.0;
    return worst + merge_cost(queries, cm);
}

double total_cost_grouped(std::span<const Stat> stats, const std::vector<bool>& skewed,
                          const CostModel& cm) {
    double worst_skew = 0.0;
    double worst_rest = 0.0;
    std::uint64_t queries = 0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const double e = local_cost(stats[i], cm);
        if (i < skewed.size() && skewed[i])
            worst_skew = std::max(worst_skew, e);
        else
            worst_rest = std::max(worst_rest, e);
        queries += stats[i].query_count;
    }
    const double worst = std::max(worst_skew, worst_rest);
    if (queries == 0 && worst == 0.0) return 0.0;
    return worst + merge_cost(queries, cm);
}

double split_cost(const Stat& target, std::span<const SubStat> subs, const CostModel& cm) {
    double worst = 0.0;
    for (const SubStat& s : subs)
        worst = std::max(worst, reindex_cost(s.data_count, cm) + local_cost(s, cm));
    return repartition_cost(target.data_count, static_cast<int>(subs.size()), cm) + worst +
           merge_cost(target.query_count, cm);
}

std::optional<int> number_of_partitions(std::span<const Stat> others, const Stat& target,
                                        int budget, const CostModel& cm) {
    if (budget < 2 || target.query_count == 0) return std::nullopt;

    double delta_e = 0.0;
    std::uint64_t other_queries = 0;
    std::uint64_t all_queries = target.query_count;
    for (const Stat& s : others) {
        delta_e = std::max(delta_e, local_cost(s, cm));
        other_queries += s.query_count;
        all_queries += s.query_count;
    }
    const double delta = delta_e + merge_cost(other_queries, cm);
    const double current = local_cost(target, cm) + merge_cost(all_queries, cm);
    if (delta >= current) return std::nullopt;

    for (int m = 2; m <= budget; ++m) {
        // Even trial split: queries and data divided m ways; sampled op
        // counts scale the same way.
        std::vector<SubStat> subs(static_cast<std::size_t>(m));
        for (auto& s : subs) {
            s.data_count = target.data_count / m;
            s.query_count = target.query_count / m;
            s.sampled_op_count = target.sampled_op_count / (static_cast<std::uint64_t>(m) *
                                                            static_cast<std::uint64_t>(m));
        }
        const double projected = split_cost(target, subs, cm);
        if (std::max(delta, projected) < current) return m;
    }
    return std::nullopt;
}

std::vector<bool> flag_skewed(std::span<const Stat> stats, const CostModel& cm) {
    std::vector<double> costs(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) costs[i] = local_cost(stats[i], cm);
    std::vector<double> sorted = costs;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
    std::vector<bool> flags(stats.size(), false);
    for (std::size_t i = 0; i < stats.size(); ++i)
        flags[i] = median > 0.0 ? costs[i] > cm.theta * median : costs[i] > 0.0;
    return flags;
}

}  // namespace spatialq
