#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>

namespace spatialq {

/// A 2-D point record. Coordinates are plane units (inputs are assumed
/// pre-projected, no geodesic math); `id` is unique within a dataset and
/// `payload` is carried through joins untouched.
struct Point {
    double x = 0.0;
    double y = 0.0;
    std::uint64_t id = 0;
    std::string payload;
};

/// Axis-aligned rectangle with closed boundaries on all four sides.
/// Used both as a query range and as a bounding box; degenerate rects
/// (zero width or height) are valid.
struct Rect {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    static Rect from_point(const Point& p) { return {p.x, p.y, p.x, p.y}; }

    bool valid() const {
        return min_x <= max_x && min_y <= max_y && std::isfinite(min_x) &&
               std::isfinite(min_y) && std::isfinite(max_x) && std::isfinite(max_y);
    }

    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    double area() const { return width() * height(); }

    double center_x() const { return min_x + (max_x - min_x) / 2.0; }
    double center_y() const { return min_y + (max_y - min_y) / 2.0; }

    bool operator==(const Rect&) const = default;
};

/// Closed-rectangle overlap: shared edges and corners count as overlap.
inline bool overlaps(const Rect& a, const Rect& b) {
    return a.min_x <= b.max_x && b.min_x <= a.max_x &&
           a.min_y <= b.max_y && b.min_y <= a.max_y;
}

/// Closed containment of a point in a rectangle.
inline bool contains(const Rect& r, const Point& p) {
    return r.min_x <= p.x && p.x <= r.max_x && r.min_y <= p.y && p.y <= r.max_y;
}

inline bool contains(const Rect& outer, const Rect& inner) {
    return outer.min_x <= inner.min_x && inner.max_x <= outer.max_x &&
           outer.min_y <= inner.min_y && inner.max_y <= outer.max_y;
}

inline double dist(const Point& p, const Point& q) {
    return std::hypot(p.x - q.x, p.y - q.y);
}

/// Minimum Euclidean distance from a point to a rectangle; zero when the
/// point lies inside or on the boundary.
inline double min_dist(const Point& p, const Rect& r) {
    double dx = 0.0;
    if (p.x < r.min_x)
        dx = r.min_x - p.x;
    else if (p.x > r.max_x)
        dx = p.x - r.max_x;
    double dy = 0.0;
    if (p.y < r.min_y)
        dy = r.min_y - p.y;
    else if (p.y > r.max_y)
        dy = p.y - r.max_y;
    return std::hypot(dx, dy);
}

/// Distance from a point to the farthest corner of a rectangle.
inline double max_dist(const Point& p, const Rect& r) {
    double dx = std::max(std::abs(p.x - r.min_x), std::abs(p.x - r.max_x));
    double dy = std::max(std::abs(p.y - r.min_y), std::abs(p.y - r.max_y));
    return std::hypot(dx, dy);
}

/// Minimum distance between two rectangles; zero when they overlap.
inline double min_dist(const Rect& a, const Rect& b) {
    double dx = 0.0;
    if (a.max_x < b.min_x)
        dx = b.min_x - a.max_x;
    else if (b.max_x < a.min_x)
        dx = a.min_x - b.max_x;
    double dy = 0.0;
    if (a.max_y < b.min_y)
        dy = b.min_y - a.max_y;
    else if (b.max_y < a.min_y)
        dy = a.min_y - b.max_y;
    return std::hypot(dx, dy);
}

inline Rect merged(const Rect& a, const Rect& b) {
    return {std::min(a.min_x, b.min_x), std::min(a.min_y, b.min_y),
            std::max(a.max_x, b.max_x), std::max(a.max_y, b.max_y)};
}

inline Rect bounds_of(std::span<const Point> points) {
    Rect r{0, 0, 0, 0};
    bool first = true;
    for (const Point& p : points) {
        if (first) {
            r = Rect::from_point(p);
            first = false;
        } else {
            r = merged(r, Rect::from_point(p));
        }
    }
    return r;
}

// Quadrant order is fixed everywhere in the engine: clockwise from the
// upper-left corner.
enum Quadrant : int { kNW = 0, kNE = 1, kSE = 2, kSW = 3 };

/// Closed rect of one quadrant of `r` (quadrants share the mid lines).
inline Rect quadrant_rect(const Rect& r, int quad) {
    const double mx = r.center_x();
    const double my = r.center_y();
    switch (quad) {
        case kNW: return {r.min_x, my, mx, r.max_y};
        case kNE: return {mx, my, r.max_x, r.max_y};
        case kSE: return {mx, r.min_y, r.max_x, my};
        default:  return {r.min_x, r.min_y, mx, my};
    }
}

/// Half-open quadrant assignment used when a point must land in exactly
/// one quadrant: west/south take coordinates strictly below the mid
/// lines, east/north take the rest.
inline int quadrant_of(const Rect& r, double x, double y) {
    const bool east = x >= r.center_x();
    const bool north = y >= r.center_y();
    if (north)
        return east ? kNE : kNW;
    return east ? kSE : kSW;
}

}  // namespace spatialq
