#include "spatialq/hilbert.hpp"

#include <stdexcept>

namespace spatialq {

std::uint64_t hilbert_cell_key(std::uint32_t cx, std::uint32_t cy, int order) {
    std::uint64_t d = 0;
    std::uint64_t x = cx, y = cy;
    for (std::uint64_t s = std::uint64_t{1} << (order - 1); s > 0; s >>= 1) {
        const std::uint64_t rx = (x & s) ? 1 : 0;
        const std::uint64_t ry = (y & s) ? 1 : 0;
        d += s * s * ((3 * rx) ^ ry);
        // Rotate the quadrant so the curve stays continuous.
        if (ry == 0) {
            if (rx == 1) {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::swap(x, y);
        }
    }
    return d;
}

std::uint64_t hilbert_key(const Point& p, const Rect& boundary, int order) {
    if (order < 1 || order > 31) throw std::invalid_argument("hilbert_key: order out of range");
    if (!contains(boundary, p))
        throw std::invalid_argument("hilbert_key: point outside boundary");

    const std::uint64_t cells = std::uint64_t{1} << order;
    auto to_cell = [cells](double v, double lo, double hi) -> std::uint32_t {
        if (hi <= lo) return 0;  // degenerate boundary collapses to one cell
        auto c = static_cast<std::int64_t>((v - lo) / (hi - lo) * static_cast<double>(cells));
        if (c < 0) c = 0;
        if (c >= static_cast<std::int64_t>(cells)) c = static_cast<std::int64_t>(cells) - 1;
        return static_cast<std::uint32_t>(c);
    };
    return hilbert_cell_key(to_cell(p.x, boundary.min_x, boundary.max_x),
                            to_cell(p.y, boundary.min_y, boundary.max_y), order);
}

}  // namespace spatialq
