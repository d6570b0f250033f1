#pragma once

#include <string>
#include <vector>

#include "spatialq/config.hpp"

namespace spatialq {

/// One grid cell of a benchmark run.
struct BenchCell {
    std::string op;  // "range-join" or "knn-join"
    int n_partitions = 0;
    bool filter = false;
    bool scheduler = false;
    Metrics metrics;
};

struct BenchReport {
    std::vector<BenchCell> cells;
    std::string metrics_csv;
    std::string summary;
};

/// Executes the configured grid {operator x filter x scheduler x N} over
/// the configured (or synthesized) dataset and workload. Byte-identical
/// output for identical config and seeds, at any parallelism.
BenchReport run_bench(const ConfigMap& cfg);

/// Re-renders the human summary from a previously written metrics CSV.
std::string summarize_metrics_csv(const std::string& csv_text);

std::string metrics_csv_header();
std::string metrics_csv_row(const BenchCell& cell);

}  // namespace spatialq
