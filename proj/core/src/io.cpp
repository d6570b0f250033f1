#include "spatialq/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace spatialq {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    const auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc{}) return false;
    for (const char* p = res.ptr; p < e; ++p)
        if (*p != ' ' && *p != '\t') return false;
    return std::isfinite(out);
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    const auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc{}) return false;
    for (const char* p = res.ptr; p < e; ++p)
        if (*p != ' ' && *p != '\t') return false;
    return true;
}

std::vector<std::string> split_csv(const std::string& line, std::size_t max_fields) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (fields.size() + 1 < max_fields) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) break;
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    fields.push_back(line.substr(start));
    return fields;
}

bool skippable(const std::string& line) {
    for (char c : line)
        if (c != ' ' && c != '\t' && c != '\r') return c == '#';
    return true;  // blank
}

template <typename RowFn>
std::size_t read_rows(const std::string& path, RowFn&& row) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    std::size_t skipped = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (skippable(line)) continue;
        if (!row(line)) ++skipped;
    }
    return skipped;
}

void enforce_quality(const std::string& path, std::size_t good, std::size_t skipped) {
    if (good == 0) throw DataError(path + ": no valid rows");
    if (skipped * 10 > (good + skipped))
        throw DataError(path + ": more than 10% malformed rows (" +
                        std::to_string(skipped) + " of " + std::to_string(good + skipped) +
                        ")");
}

}  // namespace

IngestResult ingest_points(const std::string& path) {
    IngestResult out;
    out.skipped = read_rows(path, [&](const std::string& line) {
        const auto f = split_csv(line, 4);
        if (f.size() < 3) return false;
        Point p;
        if (!parse_u64(f[0], p.id) || !parse_double(f[1], p.x) || !parse_double(f[2], p.y))
            return false;
        if (f.size() == 4) p.payload = f[3];
        out.points.push_back(std::move(p));
        return true;
    });
    enforce_quality(path, out.points.size(), out.skipped);
    return out;
}

QueryIngestResult ingest_range_queries(const std::string& path) {
    QueryIngestResult out;
    out.skipped = read_rows(path, [&](const std::string& line) {
        const auto f = split_csv(line, 5);
        if (f.size() != 5) return false;
        RangeQuery q;
        if (!parse_u64(f[0], q.id) || !parse_double(f[1], q.rect.min_x) ||
            !parse_double(f[2], q.rect.min_y) || !parse_double(f[3], q.rect.max_x) ||
            !parse_double(f[4], q.rect.max_y))
            return false;
        if (!q.rect.valid()) return false;
        out.queries.push_back(q);
        return true;
    });
    enforce_quality(path, out.queries.size(), out.skipped);
    return out;
}

IngestResult ingest_knn_queries(const std::string& path) {
    IngestResult out;
    out.skipped = read_rows(path, [&](const std::string& line) {
        const auto f = split_csv(line, 3);
        if (f.size() != 3) return false;
        Point p;
        if (!parse_u64(f[0], p.id) || !parse_double(f[1], p.x) || !parse_double(f[2], p.y))
            return false;
        out.points.push_back(std::move(p));
        return true;
    });
    enforce_quality(path, out.points.size(), out.skipped);
    return out;
}

void write_points(const std::string& path, const std::vector<Point>& points) {
    std::ofstream outfile(path);
    if (!outfile) throw DataError("cannot write " + path);
    for (const Point& p : points) {
        outfile << p.id << ',' << format_double(p.x) << ',' << format_double(p.y);
        if (!p.payload.empty()) outfile << ',' << p.payload;
        outfile << '\n';
    }
}

void write_range_queries(const std::string& path, const std::vector<RangeQuery>& queries) {
    std::ofstream outfile(path);
    if (!outfile) throw DataError("cannot write " + path);
    for (const RangeQuery& q : queries)
        outfile << q.id << ',' << format_double(q.rect.min_x) << ','
                << format_double(q.rect.min_y) << ',' << format_double(q.rect.max_x) << ','
                << format_double(q.rect.max_y) << '\n';
}

void write_pairs(const std::string& path,
                 const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs) {
    std::ofstream outfile(path);
    if (!outfile) throw DataError("cannot write " + path);
    outfile << "query_id,point_id\n";
    for (const auto& [q, p] : pairs) outfile << q << ',' << p << '\n';
}

void write_knn_rows(const std::string& path, const std::vector<KnnResult>& rows) {
    std::ofstream outfile(path);
    if (!outfile) throw DataError("cannot write " + path);
    outfile << "query_id,rank,point_id,distance\n";
    for (const KnnResult& row : rows) {
        for (std::size_t i = 0; i < row.neighbors.size(); ++i)
            outfile << row.query_id << ',' << i + 1 << ',' << row.neighbors[i].point_id << ','
                    << format_double(row.neighbors[i].distance) << '\n';
    }
}

}  // namespace spatialq
