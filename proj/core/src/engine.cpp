#include "spatialq/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace spatialq {

namespace {

// One executable shard: an original partition or a sub-partition created
// by the plan. `cells` is the routing surface (the region for originals,
// the grouped branch cells for subs).
struct ExecUnit {
    std::uint32_t pid = 0;
    std::shared_ptr<const Quadtree> qt;
    SFilter filter;
    std::vector<Rect> cells;
    Rect mbr{};
    std::vector<RangeQuery> queries;
    std::vector<Point> focals;
};

bool unit_admits(const ExecUnit& u, const Rect& q, bool use_filter, std::uint64_t& pruned) {
    bool overlap = false;
    for (const Rect& cell : u.cells)
        if (overlaps(q, cell)) {
            overlap = true;
            break;
        }
    if (!overlap) return false;
    if (use_filter && !u.filter.query(q)) {
        ++pruned;
        return false;
    }
    return true;
}

std::uint64_t sampled_ops(const Quadtree& qt, std::span<const RangeQuery> queries,
                          double alpha, std::uint64_t seed) {
    // Deterministic cost probe: run the sampled queries over an
    // alpha-sample of the data and count operations.
    std::span<const Point> pts(qt.points());
    const std::size_t n =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                     alpha * static_cast<double>(pts.size()))));
    std::vector<Point> sample = reservoir_sample(pts, n, seed);
    if (sample.empty()) return 0;
    Quadtree probe(std::move(sample), qt.boundary(), qt.node_capacity(), qt.max_depth());
    SearchCounters c;
    std::vector<const Point*> hits;
    for (const RangeQuery& q : queries) {
        hits.clear();
        probe.range_search(q.rect, hits, c);
    }
    return c.total();
}

struct StagedSplit {
    std::vector<std::uint32_t> unit_ids;
    std::uint64_t pruned = 0;
};

// Plans against the live units and materializes every previewed split
// straight into `live`, so accepted steps (including re-splits of subs)
// apply without recomputation. unit_order decides what finally executes.
struct Planner {
    const EngineConfig& cfg;
    bool knn_mode;
    std::map<std::uint32_t, ExecUnit>& live;
    std::map<std::uint32_t, StagedSplit> staged;

    std::vector<SubStat> preview(const Stat& target, int m_prime, std::uint32_t first_id) {
        const ExecUnit& unit = live.at(target.partition_id);

        Partition part;
        part.id = target.partition_id;
        part.region = unit.qt->boundary();
        part.data = unit.qt->points();
        part.local_index = unit.qt;

        std::vector<RangeQuery> probe_queries = unit.queries;
        if (knn_mode) {
            probe_queries.clear();
            probe_queries.reserve(unit.focals.size());
            for (const Point& f : unit.focals)
                probe_queries.push_back({Rect::from_point(f), f.id});
        }
        const auto sampled = reservoir_sample(std::span<const RangeQuery>(probe_queries),
                                              cfg.query_sample_size,
                                              cfg.sample_seed + 0x9e3779b9u + target.partition_id);

        auto specs = repartition(part, m_prime, SplitStrategy::query_driven, sampled);

        StagedSplit split;
        std::vector<ExecUnit> units;
        std::vector<SubStat> stats;
        for (std::size_t g = 0; g < specs.size(); ++g) {
            SubPartitionSpec& spec = specs[g];
            ExecUnit sub;
            sub.pid = first_id + static_cast<std::uint32_t>(g);
            sub.cells = spec.cells;
            sub.mbr = spec.cells.front();
            for (const Rect& c : spec.cells) sub.mbr = merged(sub.mbr, c);
            sub.qt = std::make_shared<Quadtree>(std::move(spec.points), sub.mbr,
                                                cfg.node_capacity, cfg.max_depth);
            sub.filter = SFilter::build_from_quadtree(*sub.qt, cfg.filter_depth);

            SubStat st;
            st.data_count = sub.qt->size();
            split.unit_ids.push_back(sub.pid);
            units.push_back(std::move(sub));
            stats.push_back(st);
        }

        // Re-route the unit's workload onto the subs.
        if (knn_mode) {
            for (const Point& f : unit.focals) {
                // Containment first; focals outside every cell (clamped
                // homes) go to the nearest sub.
                std::size_t home = units.size();
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t g = 0; g < units.size() && home == units.size(); ++g)
                    for (const Rect& cell : units[g].cells)
                        if (contains(cell, f)) {
                            home = g;
                            break;
                        }
                if (home == units.size()) {
                    for (std::size_t g = 0; g < units.size(); ++g)
                        for (const Rect& cell : units[g].cells) {
                            const double d = min_dist(f, cell);
                            if (d < best) {
                                best = d;
                                home = g;
                            }
                        }
                }
                units[home].focals.push_back(f);
            }
            for (std::size_t g = 0; g < units.size(); ++g)
                stats[g].query_count = units[g].focals.size();
        } else {
            for (const RangeQuery& q : unit.queries) {
                for (std::size_t g = 0; g < units.size(); ++g) {
                    if (unit_admits(units[g], q.rect, cfg.use_filter, split.pruned))
                        units[g].queries.push_back(q);
                }
            }
            for (std::size_t g = 0; g < units.size(); ++g)
                stats[g].query_count = units[g].queries.size();
        }

        if (cfg.cost.mode == CostMode::sampled) {
            for (std::size_t g = 0; g < units.size(); ++g) {
                const ExecUnit& sub = units[g];
                std::vector<RangeQuery> qs = sub.queries;
                if (knn_mode)
                    for (const Point& f : sub.focals) qs.push_back({Rect::from_point(f), f.id});
                const auto sub_sample = reservoir_sample(
                    std::span<const RangeQuery>(qs), cfg.query_sample_size,
                    cfg.sample_seed + 0x9e3779b9u + sub.pid);
                stats[g].sampled_op_count =
                    sampled_ops(*sub.qt, sub_sample, cfg.cost.alpha, cfg.sample_seed + sub.pid);
            }
        }

        for (ExecUnit& sub : units) {
            const std::uint32_t pid = sub.pid;
            live.insert_or_assign(pid, std::move(sub));
        }
        staged[first_id] = std::move(split);
        return stats;
    }
};

// Builds the initial unit list, runs the planner when enabled, and
// returns the final unit set plus pre-execution routing metrics.
std::vector<ExecUnit> prepare_units(const BuiltIndex& index,
                                    std::span<const RangeQuery> queries,
                                    std::span<const Point> focals, bool knn_mode,
                                    const EngineConfig& cfg, Metrics& metrics) {
    std::map<std::uint32_t, ExecUnit> live;
    for (const Partition& p : index.partitions) {
        ExecUnit u;
        u.pid = p.id;
        u.qt = p.local_index;
        u.filter = p.filter;
        u.cells = {p.region};
        u.mbr = p.region;
        live.emplace(p.id, std::move(u));
    }

    if (knn_mode) {
        auto per_partition = route_knn_queries(focals, index.global);
        for (std::uint32_t pid = 0; pid < per_partition.size(); ++pid)
            live.at(pid).focals = std::move(per_partition[pid]);
    } else {
        auto routing = route_range_queries(queries, index.global, cfg.use_filter);
        metrics.filter_pruned += routing.pruned_by_filter;
        for (std::uint32_t pid = 0; pid < routing.per_partition.size(); ++pid)
            live.at(pid).queries = std::move(routing.per_partition[pid]);
    }

    std::vector<std::uint32_t> unit_order;
    for (const Partition& p : index.partitions) unit_order.push_back(p.id);

    if (cfg.use_scheduler && cfg.m_budget > cfg.n_partitions) {
        std::vector<Stat> stats;
        for (std::uint32_t pid : unit_order) {
            const ExecUnit& u = live.at(pid);
            Stat s = index.partitions[pid].stats;
            s.query_count = knn_mode ? u.focals.size() : u.queries.size();
            if (cfg.cost.mode == CostMode::sampled) {
                std::vector<RangeQuery> qs = u.queries;
                if (knn_mode)
                    for (const Point& f : u.focals) qs.push_back({Rect::from_point(f), f.id});
                const auto sampled = reservoir_sample(
                    std::span<const RangeQuery>(qs), cfg.query_sample_size,
                    cfg.sample_seed + 0x9e3779b9u + pid);
                s.sampled_op_count =
                    sampled_ops(*u.qt, sampled, cfg.cost.alpha, cfg.sample_seed + pid);
            }
            stats.push_back(std::move(s));
        }

        Planner planner{cfg, knn_mode, live, {}};
        const auto preview = [&planner](const Stat& t, int m, std::uint32_t first) {
            return planner.preview(t, m, first);
        };
        const Plan plan =
            greedy_plan(stats, cfg.m_budget - cfg.n_partitions, cfg.cost, preview);

        for (const PlanStep& step : plan.steps) {
            auto staged = planner.staged.find(step.sub_ids.front());
            if (staged == planner.staged.end())
                throw std::logic_error("engine: accepted step was never staged");
            metrics.filter_pruned += staged->second.pruned;
            unit_order.erase(std::remove(unit_order.begin(), unit_order.end(), step.target),
                             unit_order.end());
            live.erase(step.target);
            for (std::uint32_t pid : staged->second.unit_ids) unit_order.push_back(pid);
            planner.staged.erase(staged);
        }
    }

    std::vector<ExecUnit> units;
    units.reserve(unit_order.size());
    for (std::uint32_t pid : unit_order) units.push_back(std::move(live.at(pid)));
    return units;
}

void finish_metrics(Metrics& metrics, const std::vector<ExecUnit>& units) {
    metrics.makespan = 0;
    for (std::uint64_t ops : metrics.per_partition_ops)
        metrics.makespan = std::max(metrics.makespan, ops);
    metrics.filter_bits = 0;
    for (const ExecUnit& u : units) metrics.filter_bits += u.filter.space_bits();
}

}  // namespace

BuiltIndex build_index(std::vector<Point> data, const EngineConfig& cfg) {
    if (data.empty()) throw std::invalid_argument("build_index: no data");
    if (cfg.n_partitions < 1) throw std::invalid_argument("build_index: n_partitions < 1");
    if (cfg.m_budget < cfg.n_partitions)
        throw std::invalid_argument("build_index: m_budget below n_partitions");

    BuiltIndex built;
    built.boundary = bounds_of(data);

    std::size_t sample_size = cfg.sample_size;
    if (sample_size == 0)
        sample_size = std::max<std::size_t>(data.size() / 100,
                                            10 * static_cast<std::size_t>(cfg.n_partitions));
    sample_size = std::clamp<std::size_t>(sample_size,
                                          static_cast<std::size_t>(cfg.n_partitions),
                                          data.size());

    const auto sample =
        reservoir_sample(std::span<const Point>(data), sample_size, cfg.sample_seed);
    built.global =
        build_global_index(sample, cfg.n_partitions, built.boundary, cfg.rtree_fanout);
    built.partitions = partition_data(std::move(data), built.global, cfg.node_capacity,
                                      cfg.max_depth, cfg.filter_depth);
    for (Partition& p : built.partitions) {
        p.built_filter_bits = p.filter.space_bits();
        built.global.set_filter(p.id, p.filter);
    }
    return built;
}

RangeJoinOutcome range_join(const BuiltIndex& index, std::span<const RangeQuery> queries,
                            const EngineConfig& cfg) {
    RangeJoinOutcome out;
    Metrics& metrics = out.metrics;

    std::vector<ExecUnit> units = prepare_units(index, queries, {}, false, cfg, metrics);
    metrics.shuffle_count = 0;
    for (const ExecUnit& u : units) metrics.shuffle_count += u.queries.size();

    struct TaskResult {
        std::vector<IdPair> pairs;
        SearchCounters counters;
        std::uint64_t empty_visits = 0;
    };
    auto results = simulate_workers(units, cfg.parallelism,
                                    [&](const ExecUnit& u, std::size_t) {
        TaskResult r;
        std::vector<const Point*> hits;
        for (const RangeQuery& q : u.queries) {
            hits.clear();
            u.qt->range_search(q.rect, hits, r.counters);
            if (hits.empty()) ++r.empty_visits;
            for (const Point* p : hits) r.pairs.emplace_back(q.id, p->id);
        }
        return r;
    });

    metrics.per_partition_ops.resize(units.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
        metrics.per_partition_ops[i] = results[i].counters.total();
        metrics.merge_volume += results[i].pairs.size();
        if (cfg.use_filter) metrics.filter_false_positives += results[i].empty_visits;
        out.result.pairs.insert(out.result.pairs.end(), results[i].pairs.begin(),
                                results[i].pairs.end());
    }
    metrics.result_rows = out.result.pairs.size();
    finish_metrics(metrics, units);
    return out;
}

RangeJoinOutcome knn_join(const BuiltIndex& index, std::span<const Point> focals, int k,
                          const EngineConfig& cfg) {
    if (k < 1) throw std::invalid_argument("knn_join: k must be >= 1");
    RangeJoinOutcome out;
    Metrics& metrics = out.metrics;

    std::vector<ExecUnit> units = prepare_units(index, {}, focals, true, cfg, metrics);
    metrics.shuffle_count = 0;
    for (const ExecUnit& u : units) metrics.shuffle_count += u.focals.size();

    // Round 1: local kNN in every focal's home unit.
    struct RoundOne {
        std::vector<KnnResult> rows;
        std::vector<double> radii;
        SearchCounters counters;
    };
    auto round_one = simulate_workers(units, cfg.parallelism,
                                      [&](const ExecUnit& u, std::size_t) {
        RoundOne r;
        for (const Point& f : u.focals) {
            KnnResult row = u.qt->knn_search(f, k, r.counters);
            r.radii.push_back(row.neighbors.size() == static_cast<std::size_t>(k)
                                  ? row.neighbors.back().distance
                                  : std::numeric_limits<double>::infinity());
            r.rows.push_back(std::move(row));
        }
        return r;
    });

    // Round 2: replicate each focal to every other unit its radius
    // reaches (subject to the unit's filter), gathering candidates
    // within the radius.
    struct Probe {
        Point focal;
        double radius;
        std::size_t home;
        std::size_t row;
    };
    std::vector<std::vector<Probe>> probes(units.size());
    std::uint64_t replications = 0;
    for (std::size_t h = 0; h < units.size(); ++h) {
        for (std::size_t f = 0; f < units[h].focals.size(); ++f) {
            const Point& focal = units[h].focals[f];
            const double r = round_one[h].radii[f];
            const Rect circle_box{focal.x - r, focal.y - r, focal.x + r, focal.y + r};
            for (std::size_t u = 0; u < units.size(); ++u) {
                if (u == h) continue;
                if (min_dist(focal, units[u].mbr) > r) continue;
                if (cfg.use_filter && !units[u].filter.query(
                                          std::isinf(r) ? units[u].mbr : circle_box)) {
                    ++metrics.filter_pruned;
                    continue;
                }
                probes[u].push_back({focal, r, h, f});
                ++replications;
            }
        }
    }
    metrics.shuffle_count += replications;

    struct RoundTwo {
        std::vector<std::vector<Neighbor>> extras;
        SearchCounters counters;
        std::uint64_t empty_visits = 0;
    };
    std::vector<std::size_t> unit_ords(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) unit_ords[i] = i;
    auto round_two = simulate_workers(unit_ords, cfg.parallelism,
                                      [&](std::size_t uo, std::size_t) {
        RoundTwo r;
        const ExecUnit& u = units[uo];
        r.extras.resize(probes[uo].size());
        std::vector<const Point*> hits;
        for (std::size_t i = 0; i < probes[uo].size(); ++i) {
            const Probe& pr = probes[uo][i];
            hits.clear();
            const double rad = pr.radius;
            const Rect box = std::isinf(rad)
                                 ? u.mbr
                                 : Rect{pr.focal.x - rad, pr.focal.y - rad,
                                        pr.focal.x + rad, pr.focal.y + rad};
            u.qt->range_search(box, hits, r.counters);
            for (const Point* p : hits) {
                const double d = dist(pr.focal, *p);
                if (d <= rad) r.extras[i].push_back({p->id, d});
            }
            if (r.extras[i].empty()) ++r.empty_visits;
        }
        return r;
    });

    // Merge: per focal, home candidates plus gathered extras, exact top-k.
    std::vector<std::vector<Neighbor>> merged_rows;
    std::vector<std::uint64_t> row_ids;
    for (std::size_t h = 0; h < units.size(); ++h) {
        for (std::size_t f = 0; f < units[h].focals.size(); ++f) {
            row_ids.push_back(units[h].focals[f].id);
            merged_rows.push_back(std::move(round_one[h].rows[f].neighbors));
        }
    }
    // Row lookup: (home, row index) -> merged ordinal.
    std::vector<std::size_t> row_base(units.size(), 0);
    for (std::size_t h = 1; h < units.size(); ++h)
        row_base[h] = row_base[h - 1] + units[h - 1].focals.size();
    for (std::size_t uo = 0; uo < units.size(); ++uo) {
        for (std::size_t i = 0; i < probes[uo].size(); ++i) {
            const Probe& pr = probes[uo][i];
            auto& row = merged_rows[row_base[pr.home] + pr.row];
            const auto& extra = round_two[uo].extras[i];
            metrics.merge_volume += extra.size();
            row.insert(row.end(), extra.begin(), extra.end());
        }
    }

    metrics.per_partition_ops.resize(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        metrics.per_partition_ops[i] =
            round_one[i].counters.total() + round_two[i].counters.total();
        metrics.merge_volume += round_one[i].rows.size();
        if (cfg.use_filter) metrics.filter_false_positives += round_two[i].empty_visits;
    }

    out.result.rows.resize(merged_rows.size());
    for (std::size_t i = 0; i < merged_rows.size(); ++i) {
        auto& row = merged_rows[i];
        std::sort(row.begin(), row.end(), neighbor_less);
        if (row.size() > static_cast<std::size_t>(k)) row.resize(static_cast<std::size_t>(k));
        out.result.rows[i].query_id = row_ids[i];
        out.result.rows[i].neighbors = std::move(row);
    }
    // Deterministic row order regardless of unit layout.
    std::sort(out.result.rows.begin(), out.result.rows.end(),
              [](const KnnResult& a, const KnnResult& b) { return a.query_id < b.query_id; });
    metrics.result_rows = out.result.rows.size();
    finish_metrics(metrics, units);
    return out;
}

FilterUpdateOutcome run_with_filter_update(const BuiltIndex& index,
                                           std::span<const RangeQuery> queries,
                                           const EngineConfig& cfg) {
    if (!cfg.use_filter)
        throw std::invalid_argument("run_with_filter_update: filter must be enabled");

    FilterUpdateOutcome out;
    Metrics& metrics = out.metrics;

    auto routing = route_range_queries(queries, index.global, true);
    metrics.filter_pruned = routing.pruned_by_filter;
    metrics.shuffle_count = routing.shuffle_count;

    struct TaskResult {
        std::vector<IdPair> pairs;
        SearchCounters counters;
        std::uint64_t empty_visits = 0;
        SFilter filter;
        bool filter_changed = false;
    };
    auto results = simulate_workers(index.partitions, cfg.parallelism,
                                    [&](const Partition& part, std::size_t) {
        TaskResult r;
        r.filter = part.filter;
        const int split_limit =
            cfg.filter_split_limit > 0 ? cfg.filter_split_limit : r.filter.depth();
        const std::uint64_t budget = cfg.filter_budget_bits > 0
                                         ? cfg.filter_budget_bits
                                         : 2 * part.built_filter_bits;
        std::vector<const Point*> hits;
        for (const RangeQuery& q : routing.per_partition[part.id]) {
            hits.clear();
            part.local_index->range_search(q.rect, hits, r.counters);
            if (hits.empty()) {
                ++r.empty_visits;
                r.filter = r.filter.insert_empty(q.rect, split_limit);
                r.filter_changed = true;
                if (r.filter.space_bits() > budget) r.filter = r.filter.shrink(budget);
            }
            for (const Point* p : hits) r.pairs.emplace_back(q.id, p->id);
        }
        return r;
    });

    std::vector<std::pair<std::uint32_t, SFilter>> updates;
    metrics.per_partition_ops.resize(index.partitions.size());
    out.updated = index;
    for (std::size_t i = 0; i < results.size(); ++i) {
        metrics.per_partition_ops[i] = results[i].counters.total();
        metrics.merge_volume += results[i].pairs.size();
        metrics.filter_false_positives += results[i].empty_visits;
        out.result.pairs.insert(out.result.pairs.end(), results[i].pairs.begin(),
                                results[i].pairs.end());
        if (results[i].filter_changed) {
            updates.emplace_back(index.partitions[i].id, results[i].filter);
            out.updated.partitions[i].filter = results[i].filter;
        }
    }
    out.updated.global = merge_into_global(out.updated.global, updates);

    metrics.result_rows = out.result.pairs.size();
    metrics.makespan = 0;
    for (std::uint64_t ops : metrics.per_partition_ops)
        metrics.makespan = std::max(metrics.makespan, ops);
    metrics.filter_bits = 0;
    for (const Partition& p : out.updated.partitions)
        metrics.filter_bits += p.filter.space_bits();
    return out;
}

}  // namespace spatialq
