#pragma once

#include <cstdint>

#include "spatialq/geometry.hpp"

namespace spatialq {

/// Hilbert index of p's cell on the 2^order x 2^order grid over
/// `boundary`. Cells are half-open except along the boundary's max
/// edges; the mapping is a bijection on cells. Throws
/// std::invalid_argument when p lies outside the boundary or order is
/// not in [1, 31].
std::uint64_t hilbert_key(const Point& p, const Rect& boundary, int order);

/// Hilbert index of the grid cell (cx, cy), 0 <= cx, cy < 2^order.
std::uint64_t hilbert_cell_key(std::uint32_t cx, std::uint32_t cy, int order);

}  // namespace spatialq
