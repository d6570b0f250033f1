#include "spatialq/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace spatialq {

void WorkloadSpec::validate() const {
    if (count < 1) throw std::invalid_argument("workload: count must be >= 1");
    if (kind == Kind::hotspot) {
        if (centers.empty()) throw std::invalid_argument("workload: hotspot needs centers");
        double total = 0.0;
        for (const auto& c : centers) {
            if (c.weight < 0.0 || c.radius <= 0.0)
                throw std::invalid_argument("workload: bad hotspot center");
            total += c.weight;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("workload: hotspot weights must sum to 1");
    }
    if (min_extent < 0.0 || max_extent < min_extent)
        throw std::invalid_argument("workload: bad extent range");
}

namespace {

struct AnchorGen {
    const WorkloadSpec& spec;
    const Rect& boundary;
    std::mt19937_64 rng;

    AnchorGen(const WorkloadSpec& s, const Rect& b) : spec(s), boundary(b), rng(s.seed) {}

    std::pair<double, double> next() {
        if (spec.kind == WorkloadSpec::Kind::uniform) {
            std::uniform_real_distribution<double> dx(boundary.min_x, boundary.max_x);
            std::uniform_real_distribution<double> dy(boundary.min_y, boundary.max_y);
            const double x = dx(rng);
            const double y = dy(rng);
            return {x, y};
        }
        // Pick a center by weight, then a uniform point in its disk.
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        double roll = u01(rng);
        const HotspotCenter* chosen = &spec.centers.back();
        for (const auto& c : spec.centers) {
            if (roll < c.weight) {
                chosen = &c;
                break;
            }
            roll -= c.weight;
        }
        const double r = chosen->radius * std::sqrt(u01(rng));
        const double theta = 2.0 * std::numbers::pi * u01(rng);
        double x = chosen->x + r * std::cos(theta);
        double y = chosen->y + r * std::sin(theta);
        x = std::clamp(x, boundary.min_x, boundary.max_x);
        y = std::clamp(y, boundary.min_y, boundary.max_y);
        return {x, y};
    }
};

}  // namespace

std::vector<RangeQuery> gen_range_workload(const WorkloadSpec& spec, const Rect& boundary) {
    spec.validate();
    AnchorGen gen(spec, boundary);
    std::uniform_real_distribution<double> ext(spec.min_extent, spec.max_extent);
    std::vector<RangeQuery> out;
    out.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        const auto [cx, cy] = gen.next();
        const double w = ext(gen.rng) / 2.0;
        const double h = ext(gen.rng) / 2.0;
        Rect r{std::max(boundary.min_x, cx - w), std::max(boundary.min_y, cy - h),
               std::min(boundary.max_x, cx + w), std::min(boundary.max_y, cy + h)};
        out.push_back({r, static_cast<std::uint64_t>(i)});
    }
    return out;
}

std::vector<Point> gen_knn_workload(const WorkloadSpec& spec, const Rect& boundary) {
    spec.validate();
    AnchorGen gen(spec, boundary);
    std::vector<Point> out;
    out.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        const auto [x, y] = gen.next();
        out.push_back({x, y, static_cast<std::uint64_t>(i), {}});
    }
    return out;
}

std::vector<Point> gen_uniform_points(std::size_t count, const Rect& boundary,
                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dx(boundary.min_x, boundary.max_x);
    std::uniform_real_distribution<double> dy(boundary.min_y, boundary.max_y);
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = dx(rng);
        const double y = dy(rng);
        out.push_back({x, y, static_cast<std::uint64_t>(i), {}});
    }
    return out;
}

std::vector<Point> gen_clustered_points(std::size_t count, const Rect& boundary,
                                        int clusters, double spread, std::uint64_t seed) {
    if (clusters < 1) throw std::invalid_argument("gen_clustered_points: clusters < 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dx(boundary.min_x, boundary.max_x);
    std::uniform_real_distribution<double> dy(boundary.min_y, boundary.max_y);
    std::vector<std::pair<double, double>> centers;
    centers.reserve(clusters);
    for (int c = 0; c < clusters; ++c) centers.emplace_back(dx(rng), dy(rng));

    std::normal_distribution<double> noise(0.0, spread);
    std::uniform_int_distribution<int> pick(0, clusters - 1);
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto& [cx, cy] = centers[pick(rng)];
        const double x = std::clamp(cx + noise(rng), boundary.min_x, boundary.max_x);
        const double y = std::clamp(cy + noise(rng), boundary.min_y, boundary.max_y);
        out.push_back({x, y, static_cast<std::uint64_t>(i), {}});
    }
    return out;
}

}  // namespace spatialq
