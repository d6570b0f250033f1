#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "spatialq/local_index.hpp"

namespace spatialq {

/// Unusable input: missing file, empty file, or too many bad rows.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IngestResult {
    std::vector<Point> points;
    std::size_t skipped = 0;  // malformed lines dropped with a warning
};

/// Reads "id,x,y[,payload]" lines; '#' starts a comment. Malformed lines
/// are counted and skipped. Throws DataError when the file is unreadable,
/// holds no valid point, or more than 10% of its rows are malformed.
IngestResult ingest_points(const std::string& path);

/// Range query file: "id,min_x,min_y,max_x,max_y", same comment and
/// malformed-line policy.
struct QueryIngestResult {
    std::vector<RangeQuery> queries;
    std::size_t skipped = 0;
};
QueryIngestResult ingest_range_queries(const std::string& path);

/// kNN query file: "id,x,y".
IngestResult ingest_knn_queries(const std::string& path);

void write_points(const std::string& path, const std::vector<Point>& points);
void write_range_queries(const std::string& path, const std::vector<RangeQuery>& queries);
void write_pairs(const std::string& path,
                 const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs);
void write_knn_rows(const std::string& path, const std::vector<KnnResult>& rows);

/// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

}  // namespace spatialq
