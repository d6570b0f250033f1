#include "spatialq/bench_runner.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "spatialq/io.hpp"
#include "spatialq/workload.hpp"

namespace spatialq {

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::vector<HotspotCenter> parse_hotspots(const std::string& text) {
    // "x,y,radius,weight;x,y,radius,weight;..."
    std::vector<HotspotCenter> out;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find(';', start);
        if (end == std::string::npos) end = text.size();
        const std::string part = text.substr(start, end - start);
        HotspotCenter c;
        if (std::sscanf(part.c_str(), "%lf,%lf,%lf,%lf", &c.x, &c.y, &c.radius, &c.weight) != 4)
            throw ConfigError("bench.queries.hotspot: expected x,y,radius,weight;... got '" +
                              part + "'");
        out.push_back(c);
        start = end + 1;
    }
    return out;
}

struct BenchInputs {
    std::vector<Point> data;
    std::vector<RangeQuery> range_queries;
    std::vector<Point> knn_queries;
};

BenchInputs load_inputs(const ConfigMap& cfg, bool want_range, bool want_knn) {
    BenchInputs in;
    if (cfg.has("bench.data")) {
        in.data = ingest_points(cfg.get_string("bench.data", "")).points;
    } else {
        const double extent = cfg.get_double("bench.synthetic.extent", 1000.0);
        const Rect boundary{0, 0, extent, extent};
        const auto count = static_cast<std::size_t>(cfg.get_int("bench.synthetic.points", 20000));
        const auto seed = static_cast<std::uint64_t>(cfg.get_int("bench.synthetic.seed", 1));
        const std::string kind = cfg.get_string("bench.synthetic.kind", "uniform");
        if (kind == "uniform") {
            in.data = gen_uniform_points(count, boundary, seed);
        } else if (kind == "clustered") {
            in.data = gen_clustered_points(
                count, boundary, static_cast<int>(cfg.get_int("bench.synthetic.clusters", 8)),
                cfg.get_double("bench.synthetic.spread", extent / 40.0), seed);
        } else {
            throw ConfigError("bench.synthetic.kind: expected uniform or clustered, got '" +
                              kind + "'");
        }
    }

    const Rect boundary = bounds_of(in.data);
    WorkloadSpec spec;
    spec.count = static_cast<std::size_t>(cfg.get_int("bench.queries.count", 1000));
    spec.seed = static_cast<std::uint64_t>(cfg.get_int("bench.queries.seed", 2));
    spec.min_extent = cfg.get_double("bench.queries.min_extent", boundary.width() / 100.0);
    spec.max_extent = cfg.get_double("bench.queries.max_extent", boundary.width() / 50.0);
    const std::string kind = cfg.get_string("bench.queries.kind", "uniform");
    if (kind == "hotspot") {
        spec.kind = WorkloadSpec::Kind::hotspot;
        spec.centers = parse_hotspots(cfg.get_string("bench.queries.hotspot", ""));
    } else if (kind != "uniform") {
        throw ConfigError("bench.queries.kind: expected uniform or hotspot, got '" + kind +
                          "'");
    }

    if (want_range) {
        if (cfg.has("bench.range_queries"))
            in.range_queries = ingest_range_queries(cfg.get_string("bench.range_queries", ""))
                                   .queries;
        else
            in.range_queries = gen_range_workload(spec, boundary);
    }
    if (want_knn) {
        if (cfg.has("bench.knn_queries"))
            in.knn_queries = ingest_knn_queries(cfg.get_string("bench.knn_queries", "")).points;
        else
            in.knn_queries = gen_knn_workload(spec, boundary);
    }
    return in;
}

std::string render_summary(const std::vector<BenchCell>& cells) {
    std::ostringstream out;
    out << "bench summary\n";
    out << "  cells: " << cells.size() << "\n";

    char line[256];
    std::snprintf(line, sizeof(line), "  %-10s %4s %6s %9s %12s %10s %12s %9s\n", "operator",
                  "N", "filter", "scheduler", "shuffle", "makespan", "merge_vol", "fp_rate");
    out << line;
    for (const BenchCell& c : cells) {
        std::snprintf(line, sizeof(line), "  %-10s %4d %6s %9s %12llu %10llu %12llu %9s\n",
                      c.op.c_str(), c.n_partitions, c.filter ? "on" : "off",
                      c.scheduler ? "on" : "off",
                      static_cast<unsigned long long>(c.metrics.shuffle_count),
                      static_cast<unsigned long long>(c.metrics.makespan),
                      static_cast<unsigned long long>(c.metrics.merge_volume),
                      fixed6(c.metrics.fp_rate()).c_str());
        out << line;
    }

    // Paired ratios: filter on/off with scheduler fixed, scheduler on/off
    // with filter fixed.
    out << "  ratios:\n";
    auto find_cell = [&](const std::string& op, int n, bool filter,
                         bool scheduler) -> const BenchCell* {
        for (const BenchCell& c : cells)
            if (c.op == op && c.n_partitions == n && c.filter == filter &&
                c.scheduler == scheduler)
                return &c;
        return nullptr;
    };
    for (const BenchCell& c : cells) {
        if (c.filter) {
            const BenchCell* base = find_cell(c.op, c.n_partitions, false, c.scheduler);
            if (base && base->metrics.shuffle_count > 0) {
                const double ratio = static_cast<double>(c.metrics.shuffle_count) /
                                     static_cast<double>(base->metrics.shuffle_count);
                std::snprintf(line, sizeof(line),
                              "    %s N=%d scheduler=%s: shuffle ratio (filter on/off) = %s\n",
                              c.op.c_str(), c.n_partitions, c.scheduler ? "on" : "off",
                              fixed6(ratio).c_str());
                out << line;
            }
        }
        if (c.scheduler) {
            const BenchCell* base = find_cell(c.op, c.n_partitions, c.filter, false);
            if (base && base->metrics.makespan > 0) {
                const double ratio = static_cast<double>(c.metrics.makespan) /
                                     static_cast<double>(base->metrics.makespan);
                std::snprintf(line, sizeof(line),
                              "    %s N=%d filter=%s: makespan ratio (scheduler on/off) = %s\n",
                              c.op.c_str(), c.n_partitions, c.filter ? "on" : "off",
                              fixed6(ratio).c_str());
                out << line;
            }
        }
    }
    return out.str();
}

}  // namespace

std::string metrics_csv_header() {
    return "operator,n_partitions,filter,scheduler,shuffle_count,makespan,merge_volume,"
           "fp_rate,filter_bits,result_pairs";
}

std::string metrics_csv_row(const BenchCell& c) {
    std::ostringstream out;
    out << c.op << ',' << c.n_partitions << ',' << (c.filter ? "on" : "off") << ','
        << (c.scheduler ? "on" : "off") << ',' << c.metrics.shuffle_count << ','
        << c.metrics.makespan << ',' << c.metrics.merge_volume << ','
        << fixed6(c.metrics.fp_rate()) << ',' << c.metrics.filter_bits << ','
        << c.metrics.result_rows;
    return out.str();
}

BenchReport run_bench(const ConfigMap& cfg) {
    const auto operators = cfg.get_list("bench.operators", {"range-join", "knn-join"});
    const auto n_list = cfg.get_list("bench.partitions", {"4"});
    const auto filter_list = cfg.get_list("bench.filter", {"off", "on"});
    const auto sched_list = cfg.get_list("bench.scheduler", {"off", "on"});
    const int k = static_cast<int>(cfg.get_int("bench.k", 10));
    const int parallelism = static_cast<int>(cfg.get_int("bench.parallelism", 1));

    for (const std::string& op : operators)
        if (op != "range-join" && op != "knn-join")
            throw ConfigError("bench.operators: unknown operator '" + op + "'");

    const bool want_range =
        std::find(operators.begin(), operators.end(), "range-join") != operators.end();
    const bool want_knn =
        std::find(operators.begin(), operators.end(), "knn-join") != operators.end();
    BenchInputs inputs = load_inputs(cfg, want_range, want_knn);

    BenchReport report;
    std::ostringstream csv;
    csv << metrics_csv_header() << '\n';

    for (const std::string& n_text : n_list) {
        EngineConfig ecfg = engine_config_from(cfg);
        ecfg.n_partitions = std::stoi(n_text);
        if (!cfg.has("engine.m_budget")) ecfg.m_budget = 2 * ecfg.n_partitions;
        ecfg.parallelism = parallelism;
        const BuiltIndex index = build_index(inputs.data, ecfg);

        for (const std::string& op : operators) {
            for (const std::string& f_text : filter_list) {
                for (const std::string& s_text : sched_list) {
                    EngineConfig run_cfg = ecfg;
                    run_cfg.use_filter = f_text == "on";
                    run_cfg.use_scheduler = s_text == "on";

                    BenchCell cell;
                    cell.op = op;
                    cell.n_partitions = ecfg.n_partitions;
                    cell.filter = run_cfg.use_filter;
                    cell.scheduler = run_cfg.use_scheduler;
                    if (op == "range-join")
                        cell.metrics =
                            range_join(index, inputs.range_queries, run_cfg).metrics;
                    else
                        cell.metrics = knn_join(index, inputs.knn_queries, k, run_cfg).metrics;
                    csv << metrics_csv_row(cell) << '\n';
                    report.cells.push_back(std::move(cell));
                }
            }
        }
    }

    report.metrics_csv = csv.str();
    report.summary = render_summary(report.cells);
    return report;
}

std::string summarize_metrics_csv(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    std::vector<BenchCell> cells;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            first = false;
            continue;  // header
        }
        if (line.empty()) continue;
        BenchCell c;
        char op[32], filter[8], scheduler[8];
        unsigned long long shuffle, makespan, merge, bits, rows;
        double fp;
        if (std::sscanf(line.c_str(), "%31[^,],%d,%7[^,],%7[^,],%llu,%llu,%llu,%lf,%llu,%llu",
                        op, &c.n_partitions, filter, scheduler, &shuffle, &makespan, &merge,
                        &fp, &bits, &rows) != 10)
            throw DataError("metrics csv: malformed row '" + line + "'");
        c.op = op;
        c.filter = std::string(filter) == "on";
        c.scheduler = std::string(scheduler) == "on";
        c.metrics.shuffle_count = shuffle;
        c.metrics.makespan = makespan;
        c.metrics.merge_volume = merge;
        c.metrics.filter_bits = bits;
        c.metrics.result_rows = rows;
        // fp_rate is derived; reconstruct the numerator for display only.
        c.metrics.filter_false_positives =
            static_cast<std::uint64_t>(fp * static_cast<double>(shuffle) + 0.5);
        cells.push_back(std::move(c));
    }
    return render_summary(cells);
}

}  // namespace spatialq
