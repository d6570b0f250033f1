#include "spatialq/scheduler.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "spatialq/hilbert.hpp"

namespace spatialq {

namespace {

// Forest node used for plan-total accounting. Intact nodes carry a stat;
// split nodes carry their one-time overheads and children.
struct ForestNode {
    Stat stat;
    bool split = false;
    double beta = 0.0;
    double rho = 0.0;
    std::vector<std::size_t> children;
};

double cost_of(const std::vector<ForestNode>& forest, std::size_t idx, const CostModel& cm) {
    const ForestNode& n = forest[idx];
    if (!n.split) return local_cost(n.stat, cm);
    double worst = 0.0;
    for (std::size_t c : n.children)
        worst = std::max(worst, reindex_cost(forest[c].stat.data_count, cm) +
                                    cost_of(forest, c, cm));
    return n.beta + worst + n.rho;
}

double plan_total(const std::vector<ForestNode>& forest, std::span<const std::size_t> roots,
                  const CostModel& cm) {
    double worst = 0.0;
    std::uint64_t untouched_queries = 0;
    for (std::size_t r : roots) {
        worst = std::max(worst, cost_of(forest, r, cm));
        if (!forest[r].split) untouched_queries += forest[r].stat.query_count;
    }
    return worst + merge_cost(untouched_queries, cm);
}

}  // namespace

Plan greedy_plan(std::vector<Stat> stats, int budget, const CostModel& cm,
                 const SplitPreview& preview) {
    Plan plan;
    plan.budget_left = budget;
    if (stats.empty()) return plan;

    std::vector<ForestNode> forest;
    std::vector<std::size_t> roots;
    std::vector<std::size_t> intact;  // candidate set, the heap's contents
    std::uint32_t next_id = 0;
    for (Stat& s : stats) {
        next_id = std::max(next_id, s.partition_id + 1);
        forest.push_back({std::move(s), false, 0.0, 0.0, {}});
        roots.push_back(forest.size() - 1);
        intact.push_back(forest.size() - 1);
    }

    plan.initial_cost = plan_total(forest, roots, cm);
    plan.final_cost = plan.initial_cost;
    double cost_o = plan.initial_cost;
    double total = plan.initial_cost;

    while (plan.budget_left >= 2 && !intact.empty()) {
        // Pop the costliest live partition (ties to the lowest id).
        std::size_t best = 0;
        double best_e = local_cost(forest[intact[0]].stat, cm);
        for (std::size_t i = 1; i < intact.size(); ++i) {
            const double e = local_cost(forest[intact[i]].stat, cm);
            if (e > best_e || (e == best_e && forest[intact[i]].stat.partition_id <
                                                  forest[intact[best]].stat.partition_id)) {
                best_e = e;
                best = i;
            }
        }
        if (best_e <= 0.0) break;
        const std::size_t target_idx = intact[best];

        std::vector<Stat> others;
        others.reserve(intact.size() - 1);
        for (std::size_t i = 0; i < intact.size(); ++i)
            if (i != best) others.push_back(forest[intact[i]].stat);

        const auto m = number_of_partitions(others, forest[target_idx].stat,
                                            plan.budget_left, cm);
        if (!m) break;

        std::vector<SubStat> subs = preview(forest[target_idx].stat, *m, next_id);
        if (static_cast<int>(subs.size()) != *m)
            throw std::logic_error("greedy_plan: preview returned wrong sub count");

        const double step_cost = split_cost(forest[target_idx].stat, subs, cm);
        if (step_cost >= cost_o) break;  // Algorithm-1 guard

        // Trial-apply; keep the step only if the plan total strictly drops.
        PlanStep step;
        step.target = forest[target_idx].stat.partition_id;
        step.m_prime = *m;
        forest[target_idx].split = true;
        forest[target_idx].beta =
            repartition_cost(forest[target_idx].stat.data_count, *m, cm);
        forest[target_idx].rho = merge_cost(forest[target_idx].stat.query_count, cm);
        for (const SubStat& sub : subs) {
            Stat s;
            s.partition_id = next_id++;
            s.data_count = sub.data_count;
            s.query_count = sub.query_count;
            s.sampled_op_count = sub.sampled_op_count;
            forest.push_back({std::move(s), false, 0.0, 0.0, {}});
            forest[target_idx].children.push_back(forest.size() - 1);
            step.sub_ids.push_back(forest.back().stat.partition_id);
        }
        const double new_total = plan_total(forest, roots, cm);
        if (new_total >= total) break;  // nothing after the loop reads the trial state

        step.subs = std::move(subs);
        step.step_cost = step_cost;
        step.plan_total_after = new_total;
        plan.steps.push_back(std::move(step));

        intact.erase(intact.begin() + static_cast<std::ptrdiff_t>(best));
        for (std::size_t c : forest[target_idx].children) intact.push_back(c);
        cost_o = step_cost;
        total = new_total;
        plan.final_cost = new_total;
        plan.budget_left -= *m;
    }
    return plan;
}

std::vector<SubPartitionSpec> repartition(const Partition& target, int m_prime,
                                          SplitStrategy strategy,
                                          std::span<const RangeQuery> queries) {
    if (m_prime < 2) throw std::invalid_argument("repartition: m_prime must be >= 2");
    if (strategy == SplitStrategy::query_driven && queries.empty() && !target.data.empty())
        strategy = SplitStrategy::data_driven;  // nothing measured to balance on

    const Quadtree& qt = *target.local_index;
    struct Cell {
        Rect rect;
        std::vector<std::uint32_t> ords;
        std::uint64_t weight = 0;
    };
    std::vector<Cell> cells;
    for (const auto& node : qt.nodes()) {
        if (!node.is_leaf()) continue;
        cells.push_back({node.cell, node.point_ords, 0});
    }

    const std::size_t m = static_cast<std::size_t>(m_prime);
    if (cells.size() < m) {
        // Not enough branches: quantile strips over the raw points.
        std::vector<const Point*> pts;
        pts.reserve(target.data.size());
        for (const Point& p : target.data) pts.push_back(&p);
        std::sort(pts.begin(), pts.end(), [](const Point* a, const Point* b) {
            if (a->x != b->x) return a->x < b->x;
            if (a->y != b->y) return a->y < b->y;
            return a->id < b->id;
        });

        std::vector<SubPartitionSpec> subs(m);
        const std::size_t base = pts.size() / m;
        const std::size_t extra = pts.size() % m;
        std::size_t pos = 0;
        double strip_min = target.region.min_x;
        for (std::size_t g = 0; g < m; ++g) {
            const std::size_t take = base + (g < extra ? 1 : 0);
            const std::size_t end = pos + take;
            const double strip_max =
                (g + 1 == m || end >= pts.size()) ? target.region.max_x : pts[end]->x;
            subs[g].cells.push_back(
                {strip_min, target.region.min_y, strip_max, target.region.max_y});
            for (std::size_t i = pos; i < end; ++i) subs[g].points.push_back(*pts[i]);
            strip_min = strip_max;
            pos = end;
        }
        for (const RangeQuery& q : queries) {
            for (std::size_t g = 0; g < m; ++g) {
                if (overlaps(q.rect, subs[g].cells[0])) {
                    ++subs[g].query_count;
                    break;
                }
            }
        }
        return subs;
    }

    // Order leaf cells along the Hilbert curve so groups stay spatially
    // coherent, then weight them.
    std::vector<std::size_t> order(cells.size());
    std::iota(order.begin(), order.end(), 0u);
    std::vector<std::uint64_t> keys(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Point center{cells[i].rect.center_x(), cells[i].rect.center_y(), 0, {}};
        keys[i] = hilbert_key(center, target.region, 10);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (keys[a] != keys[b]) return keys[a] < keys[b];
        return a < b;
    });

    if (strategy == SplitStrategy::query_driven) {
        for (const RangeQuery& q : queries)
            for (Cell& c : cells)
                if (overlaps(q.rect, c.rect)) ++c.weight;
        std::uint64_t total_w = 0;
        for (const Cell& c : cells) total_w += c.weight;
        if (total_w == 0) strategy = SplitStrategy::data_driven;
    }
    if (strategy == SplitStrategy::data_driven)
        for (Cell& c : cells) c.weight = c.ords.size();

    std::uint64_t total_w = 0;
    for (const Cell& c : cells) total_w += c.weight;

    // Contiguous cuts closest to the cumulative quantile targets, keeping
    // one cell for every remaining group.
    std::vector<SubPartitionSpec> subs(m);
    std::size_t group = 0;
    std::uint64_t cum = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Cell& c = cells[order[i]];
        SubPartitionSpec& sub = subs[group];
        sub.cells.push_back(c.rect);
        for (std::uint32_t ord : c.ords) sub.points.push_back(qt.points()[ord]);
        cum += c.weight;
        const std::size_t cells_left = order.size() - i - 1;
        const std::size_t groups_left = m - group - 1;
        if (groups_left == 0 || cells_left < groups_left) continue;
        if (cells_left == groups_left) {
            ++group;
            continue;
        }
        const double target =
            static_cast<double>(total_w) * static_cast<double>(group + 1) /
            static_cast<double>(m);
        const double here = static_cast<double>(cum);
        const double with_next = here + static_cast<double>(cells[order[i + 1]].weight);
        if (here >= target || (with_next > target && target - here <= with_next - target))
            ++group;
    }

    for (const RangeQuery& q : queries) {
        for (std::size_t g = 0; g < m; ++g) {
            bool hit = false;
            for (const Rect& cell : subs[g].cells)
                if (overlaps(q.rect, cell)) {
                    hit = true;
                    break;
                }
            if (hit) {
                ++subs[g].query_count;
                break;
            }
        }
    }
    return subs;
}

}  // namespace spatialq
