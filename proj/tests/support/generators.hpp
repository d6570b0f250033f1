#pragma once

// Seeded random input builders shared by tests.

#include <random>
#include <vector>

#include "spatialq/geometry.hpp"
#include "spatialq/local_index.hpp"

namespace spatialq::testgen {

inline std::vector<Point> random_points(std::size_t n, const Rect& bounds, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dx(bounds.min_x, bounds.max_x);
    std::uniform_real_distribution<double> dy(bounds.min_y, bounds.max_y);
    std::vector<Point> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = dx(rng);
        const double y = dy(rng);
        pts.push_back({x, y, i, {}});
    }
    return pts;
}

inline std::vector<RangeQuery> random_rects(std::size_t n, const Rect& bounds, double max_side,
                                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dx(bounds.min_x, bounds.max_x);
    std::uniform_real_distribution<double> dy(bounds.min_y, bounds.max_y);
    std::uniform_real_distribution<double> side(0.0, max_side);
    std::vector<RangeQuery> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double cx = dx(rng);
        const double cy = dy(rng);
        const double w = side(rng) / 2;
        const double h = side(rng) / 2;
        out.push_back({{std::max(bounds.min_x, cx - w), std::max(bounds.min_y, cy - h),
                        std::min(bounds.max_x, cx + w), std::min(bounds.max_y, cy + h)},
                       i});
    }
    return out;
}

/// Rect aligned to the dyadic grid of `level` over `bounds` (cell count
/// per side = 2^level). Aligned rects decompose into whole filter
/// quadrants, which the adaptive-insert replay guarantee relies on.
inline Rect aligned_rect(const Rect& bounds, int level, std::mt19937_64& rng) {
    const std::uint64_t cells = std::uint64_t{1} << level;
    std::uniform_int_distribution<std::uint64_t> d(0, cells - 1);
    std::uint64_t x0 = d(rng), x1 = d(rng), y0 = d(rng), y1 = d(rng);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    const double wx = bounds.width() / static_cast<double>(cells);
    const double wy = bounds.height() / static_cast<double>(cells);
    return {bounds.min_x + static_cast<double>(x0) * wx,
            bounds.min_y + static_cast<double>(y0) * wy,
            bounds.min_x + static_cast<double>(x1 + 1) * wx,
            bounds.min_y + static_cast<double>(y1 + 1) * wy};
}

}  // namespace spatialq::testgen
