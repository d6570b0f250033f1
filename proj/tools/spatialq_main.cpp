// spatialq command-line front end.
//
// Subcommands: ingest, gen-workload, index, range-join, knn-join, bench,
// report. Exit codes: 0 success, 1 usage/config error, 2 data error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "spatialq/bench_runner.hpp"
#include "spatialq/config.hpp"
#include "spatialq/io.hpp"
#include "spatialq/workload.hpp"

namespace {

using namespace spatialq;

constexpr const char* kConfigEnvVar = "SPATIALQ_CONFIG";

// Shared --config / --set handling: file first, then overrides.
struct ConfigArgs {
    std::string config_path;
    std::vector<std::string> overrides;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path,
                        "key=value config file (default: $SPATIALQ_CONFIG)");
        cmd->add_option("--set", overrides, "override one key, e.g. --set cost.p_e=0.3")
            ->take_all();
    }

    ConfigMap load() const {
        std::string path = config_path;
        if (path.empty()) {
            if (const char* env = std::getenv(kConfigEnvVar)) path = env;
        }
        ConfigMap cfg;
        if (!path.empty()) cfg = ConfigMap::from_file(path);
        for (const std::string& kv : overrides) {
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--set expects key=value, got '" + kv + "'");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        return cfg;
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_ingest(const std::string& input, const std::string& output) {
    const IngestResult result = ingest_points(input);
    if (result.skipped > 0)
        std::cerr << "warning: skipped " << result.skipped << " malformed line(s)\n";
    if (!output.empty()) write_points(output, result.points);
    std::cout << "ingested " << result.points.size() << " points\n";
    return 0;
}

struct WorkloadArgs {
    std::string type = "range";
    std::string kind = "uniform";
    std::size_t count = 1000;
    std::uint64_t seed = 0;
    double min_extent = 1.0;
    double max_extent = 1.0;
    int k = 10;
    std::string hotspot;
    std::vector<double> boundary{0, 0, 1000, 1000};
    std::string data_path;
    std::string output;
};

std::vector<HotspotCenter> parse_hotspot_arg(const std::string& text) {
    std::vector<HotspotCenter> out;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find(';', start);
        if (end == std::string::npos) end = text.size();
        HotspotCenter c;
        if (std::sscanf(text.substr(start, end - start).c_str(), "%lf,%lf,%lf,%lf", &c.x, &c.y,
                        &c.radius, &c.weight) != 4)
            throw ConfigError("--hotspot expects x,y,radius,weight;...");
        out.push_back(c);
        start = end + 1;
    }
    return out;
}

int cmd_gen_workload(const WorkloadArgs& args) {
    Rect boundary{args.boundary[0], args.boundary[1], args.boundary[2], args.boundary[3]};
    if (!args.data_path.empty()) boundary = bounds_of(ingest_points(args.data_path).points);

    WorkloadSpec spec;
    spec.count = args.count;
    spec.seed = args.seed;
    spec.min_extent = args.min_extent;
    spec.max_extent = std::max(args.max_extent, args.min_extent);
    spec.k = args.k;
    if (args.kind == "hotspot") {
        spec.kind = WorkloadSpec::Kind::hotspot;
        spec.centers = parse_hotspot_arg(args.hotspot);
    } else if (args.kind != "uniform") {
        throw ConfigError("--kind expects uniform or hotspot");
    }

    if (args.type == "range") {
        write_range_queries(args.output, gen_range_workload(spec, boundary));
    } else if (args.type == "knn") {
        write_points(args.output, gen_knn_workload(spec, boundary));
    } else {
        throw ConfigError("--type expects range or knn");
    }
    std::cout << "wrote " << args.count << " " << args.type << " queries to " << args.output
              << "\n";
    return 0;
}

int cmd_index(const ConfigArgs& cargs, const std::string& data_path,
              const std::string& filter_dir) {
    const ConfigMap cfg = cargs.load();
    const EngineConfig ecfg = engine_config_from(cfg);
    const BuiltIndex index = build_index(ingest_points(data_path).points, ecfg);

    std::cout << "partitions: " << index.partitions.size() << "\n";
    std::uint64_t total_points = 0, total_nodes = 0, total_filter_bits = 0;
    for (const Partition& p : index.partitions) {
        total_points += p.data.size();
        total_nodes += p.local_index->node_count();
        total_filter_bits += p.filter.space_bits();
    }
    std::cout << "points: " << total_points << "\n";
    std::cout << "quadtree nodes: " << total_nodes << "\n";
    std::cout << "filter bits: " << total_filter_bits << "\n";

    if (!filter_dir.empty()) {
        std::filesystem::create_directories(filter_dir);
        for (const Partition& p : index.partitions) {
            const auto bytes = p.filter.serialize();
            std::ofstream out(filter_dir + "/partition_" + std::to_string(p.id) + ".sf",
                              std::ios::binary);
            if (!out) throw DataError("cannot write filter file in " + filter_dir);
            out.write(reinterpret_cast<const char*>(bytes.data()),
                      static_cast<std::streamsize>(bytes.size()));
        }
        std::cout << "filters dumped to " << filter_dir << "\n";
    }
    return 0;
}

int cmd_range_join(const ConfigArgs& cargs, const std::string& data_path,
                   const std::string& query_path, const std::string& output,
                   const std::string& metrics_path) {
    const ConfigMap cfg = cargs.load();
    const EngineConfig ecfg = engine_config_from(cfg);
    const BuiltIndex index = build_index(ingest_points(data_path).points, ecfg);
    const auto queries = ingest_range_queries(query_path).queries;

    RangeJoinOutcome outcome = range_join(index, queries, ecfg);
    std::sort(outcome.result.pairs.begin(), outcome.result.pairs.end());
    if (!output.empty()) write_pairs(output, outcome.result.pairs);

    BenchCell cell{"range-join", ecfg.n_partitions, ecfg.use_filter, ecfg.use_scheduler,
                   outcome.metrics};
    const std::string csv = metrics_csv_header() + "\n" + metrics_csv_row(cell) + "\n";
    if (!metrics_path.empty()) write_text(metrics_path, csv);
    std::cout << "pairs: " << outcome.result.pairs.size()
              << " shuffle: " << outcome.metrics.shuffle_count
              << " makespan: " << outcome.metrics.makespan << "\n";
    return 0;
}

int cmd_knn_join(const ConfigArgs& cargs, const std::string& data_path,
                 const std::string& query_path, int k, const std::string& output,
                 const std::string& metrics_path) {
    const ConfigMap cfg = cargs.load();
    const EngineConfig ecfg = engine_config_from(cfg);
    const BuiltIndex index = build_index(ingest_points(data_path).points, ecfg);
    const auto queries = ingest_knn_queries(query_path).points;

    const RangeJoinOutcome outcome = knn_join(index, queries, k, ecfg);
    if (!output.empty()) write_knn_rows(output, outcome.result.rows);

    BenchCell cell{"knn-join", ecfg.n_partitions, ecfg.use_filter, ecfg.use_scheduler,
                   outcome.metrics};
    const std::string csv = metrics_csv_header() + "\n" + metrics_csv_row(cell) + "\n";
    if (!metrics_path.empty()) write_text(metrics_path, csv);
    std::cout << "rows: " << outcome.result.rows.size()
              << " shuffle: " << outcome.metrics.shuffle_count
              << " makespan: " << outcome.metrics.makespan << "\n";
    return 0;
}

int cmd_bench(const ConfigArgs& cargs) {
    const ConfigMap cfg = cargs.load();
    const BenchReport report = run_bench(cfg);
    const std::string metrics_path = cfg.get_string("bench.output.metrics", "metrics.csv");
    const std::string summary_path = cfg.get_string("bench.output.summary", "");
    write_text(metrics_path, report.metrics_csv);
    if (!summary_path.empty()) write_text(summary_path, report.summary);
    std::cout << report.summary;
    return 0;
}

int cmd_report(const std::string& metrics_path) {
    std::cout << summarize_metrics_csv(read_text(metrics_path));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skew-aware spatial range/kNN join engine over partitioned point data"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "parse and validate a point file");
    std::string ingest_in, ingest_out;
    ingest->add_option("--input", ingest_in, "input csv: id,x,y[,payload]")->required();
    ingest->add_option("--output", ingest_out, "write the cleaned points here");

    // gen-workload
    auto* gen = app.add_subcommand("gen-workload", "generate a seeded query workload");
    WorkloadArgs wargs;
    gen->add_option("--type", wargs.type, "range or knn");
    gen->add_option("--kind", wargs.kind, "uniform or hotspot");
    gen->add_option("--count", wargs.count, "number of queries");
    gen->add_option("--seed", wargs.seed, "rng seed");
    gen->add_option("--min-extent", wargs.min_extent, "min range query side");
    gen->add_option("--max-extent", wargs.max_extent, "max range query side");
    gen->add_option("--k", wargs.k, "k for knn workloads");
    gen->add_option("--hotspot", wargs.hotspot, "x,y,radius,weight;... (weights sum to 1)");
    gen->add_option("--boundary", wargs.boundary, "min_x min_y max_x max_y")->expected(4);
    gen->add_option("--data", wargs.data_path, "derive the boundary from this point file");
    gen->add_option("--output", wargs.output, "query file to write")->required();

    // index
    auto* index_cmd = app.add_subcommand("index", "build the partitioned index and report it");
    ConfigArgs index_cfg;
    index_cfg.attach(index_cmd);
    std::string index_data, index_filters;
    index_cmd->add_option("--data", index_data, "point file")->required();
    index_cmd->add_option("--dump-filters", index_filters,
                          "write each partition's serialized filter into this directory");

    // range-join
    auto* rj = app.add_subcommand("range-join", "run a spatial range join");
    ConfigArgs rj_cfg;
    rj_cfg.attach(rj);
    std::string rj_data, rj_queries, rj_out, rj_metrics;
    rj->add_option("--data", rj_data, "point file")->required();
    rj->add_option("--queries", rj_queries, "range query file")->required();
    rj->add_option("--output", rj_out, "pairs csv to write");
    rj->add_option("--metrics", rj_metrics, "metrics csv to write");

    // knn-join
    auto* kj = app.add_subcommand("knn-join", "run a kNN join");
    ConfigArgs kj_cfg;
    kj_cfg.attach(kj);
    std::string kj_data, kj_queries, kj_out, kj_metrics;
    int kj_k = 10;
    kj->add_option("--data", kj_data, "point file")->required();
    kj->add_option("--queries", kj_queries, "focal point file")->required();
    kj->add_option("--k", kj_k, "neighbors per focal point");
    kj->add_option("--output", kj_out, "knn rows csv to write");
    kj->add_option("--metrics", kj_metrics, "metrics csv to write");

    // bench
    auto* bench = app.add_subcommand("bench", "run the configured benchmark grid");
    ConfigArgs bench_cfg;
    bench_cfg.attach(bench);

    // report
    auto* report = app.add_subcommand("report", "summarize a metrics csv");
    std::string report_metrics;
    report->add_option("--metrics", report_metrics, "metrics csv produced by bench")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(ingest_in, ingest_out);
        if (gen->parsed()) return cmd_gen_workload(wargs);
        if (index_cmd->parsed()) return cmd_index(index_cfg, index_data, index_filters);
        if (rj->parsed()) return cmd_range_join(rj_cfg, rj_data, rj_queries, rj_out, rj_metrics);
        if (kj->parsed())
            return cmd_knn_join(kj_cfg, kj_data, kj_queries, kj_k, kj_out, kj_metrics);
        if (bench->parsed()) return cmd_bench(bench_cfg);
        if (report->parsed()) return cmd_report(report_metrics);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
