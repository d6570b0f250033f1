#include "spatialq/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

namespace spatialq {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

}  // namespace

const std::vector<std::string>& ConfigMap::known_keys() {
    static const std::vector<std::string> keys = {
        "engine.n_partitions", "engine.m_budget", "engine.parallelism",
        "engine.sample_size", "engine.query_sample_size", "engine.sample_seed",
        "index.node_capacity", "index.max_depth", "index.rtree_fanout",
        "filter.enabled", "filter.depth", "filter.budget_bits", "filter.split_limit",
        "scheduler.enabled",
        "cost.p_e", "cost.p_m", "cost.p_r", "cost.p_x", "cost.lambda", "cost.alpha",
        "cost.theta", "cost.mode",
        "bench.operators", "bench.partitions", "bench.filter", "bench.scheduler",
        "bench.k", "bench.parallelism",
        "bench.data", "bench.range_queries", "bench.knn_queries",
        "bench.synthetic.points", "bench.synthetic.kind", "bench.synthetic.clusters",
        "bench.synthetic.spread", "bench.synthetic.extent", "bench.synthetic.seed",
        "bench.queries.count", "bench.queries.kind", "bench.queries.min_extent",
        "bench.queries.max_extent", "bench.queries.hotspot", "bench.queries.seed",
        "bench.output.metrics", "bench.output.summary",
    };
    return keys;
}

ConfigMap ConfigMap::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    ConfigMap cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        cfg.set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    }
    return cfg;
}

void ConfigMap::set(const std::string& key, const std::string& value) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw ConfigError("unknown configuration key: " + key);
    values_[key] = value;
}

std::string ConfigMap::get_string(const std::string& key, const std::string& def) const {
    const auto it = values_.find(key);
    return it == values_.end() ? def : it->second;
}

bool ConfigMap::get_bool(const std::string& key, bool def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    const std::string& v = it->second;
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

std::int64_t ConfigMap::get_int(const std::string& key, std::int64_t def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    std::int64_t out = 0;
    const auto res =
        std::from_chars(it->second.data(), it->second.data() + it->second.size(), out);
    if (res.ec != std::errc{} || res.ptr != it->second.data() + it->second.size())
        throw ConfigError(key + ": expected an integer, got '" + it->second + "'");
    return out;
}

double ConfigMap::get_double(const std::string& key, double def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    double out = 0.0;
    const auto res =
        std::from_chars(it->second.data(), it->second.data() + it->second.size(), out);
    if (res.ec != std::errc{} || res.ptr != it->second.data() + it->second.size())
        throw ConfigError(key + ": expected a number, got '" + it->second + "'");
    return out;
}

std::vector<std::string> ConfigMap::get_list(const std::string& key,
                                             const std::vector<std::string>& def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    std::vector<std::string> out;
    std::size_t start = 0;
    const std::string& v = it->second;
    while (start <= v.size()) {
        const std::size_t comma = v.find(',', start);
        const std::string item =
            trim(comma == std::string::npos ? v.substr(start) : v.substr(start, comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

EngineConfig engine_config_from(const ConfigMap& cfg) {
    EngineConfig out;
    out.n_partitions = static_cast<int>(cfg.get_int("engine.n_partitions", out.n_partitions));
    out.m_budget = static_cast<int>(cfg.get_int("engine.m_budget", 2 * out.n_partitions));
    out.parallelism = static_cast<int>(cfg.get_int("engine.parallelism", out.parallelism));
    out.sample_size = static_cast<std::size_t>(cfg.get_int("engine.sample_size", 0));
    out.query_sample_size = static_cast<std::size_t>(
        cfg.get_int("engine.query_sample_size", static_cast<std::int64_t>(out.query_sample_size)));
    out.sample_seed =
        static_cast<std::uint64_t>(cfg.get_int("engine.sample_seed", static_cast<std::int64_t>(out.sample_seed)));
    out.node_capacity = static_cast<int>(cfg.get_int("index.node_capacity", out.node_capacity));
    out.max_depth = static_cast<int>(cfg.get_int("index.max_depth", out.max_depth));
    out.rtree_fanout = static_cast<int>(cfg.get_int("index.rtree_fanout", out.rtree_fanout));
    out.use_filter = cfg.get_bool("filter.enabled", out.use_filter);
    out.filter_depth = static_cast<int>(cfg.get_int("filter.depth", out.filter_depth));
    out.filter_budget_bits =
        static_cast<std::uint64_t>(cfg.get_int("filter.budget_bits", 0));
    out.filter_split_limit = static_cast<int>(cfg.get_int("filter.split_limit", 0));
    out.use_scheduler = cfg.get_bool("scheduler.enabled", out.use_scheduler);
    out.cost.p_e = cfg.get_double("cost.p_e", out.cost.p_e);
    out.cost.p_m = cfg.get_double("cost.p_m", out.cost.p_m);
    out.cost.p_r = cfg.get_double("cost.p_r", out.cost.p_r);
    out.cost.p_x = cfg.get_double("cost.p_x", out.cost.p_x);
    out.cost.lambda = cfg.get_double("cost.lambda", out.cost.lambda);
    out.cost.alpha = cfg.get_double("cost.alpha", out.cost.alpha);
    out.cost.theta = cfg.get_double("cost.theta", out.cost.theta);
    const std::string mode = cfg.get_string("cost.mode", "analytic");
    if (mode == "analytic")
        out.cost.mode = CostMode::analytic;
    else if (mode == "sampled")
        out.cost.mode = CostMode::sampled;
    else
        throw ConfigError("cost.mode: expected analytic or sampled, got '" + mode + "'");
    return out;
}

}  // namespace spatialq
