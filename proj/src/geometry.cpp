#include "bscp/geometry.hpp"

#include <cstddef>

namespace bscp {

double signed_area(std::span<const Point2> polygon) {
    const std::size_t n = polygon.size();
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = polygon[i];
        const Point2 b = polygon[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * twice;
}

double closed_length(std::span<const Point2> polygon) {
    const std::size_t n = polygon.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += distance(polygon[i], polygon[(i + 1) % n]);
    return total;
}

std::vector<double> cumulative_length(std::span<const Point2> polygon) {
    std::vector<double> out(polygon.size(), 0.0);
    for (std::size_t i = 1; i < polygon.size(); ++i)
        out[i] = out[i - 1] + distance(polygon[i - 1], polygon[i]);
    return out;
}

bool point_in_polygon(std::span<const Point2> polygon, Point2 p) {
    bool inside = false;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 a = polygon[i];
        const Point2 b = polygon[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

namespace {

double cross(Point2 o, Point2 a, Point2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
    const double d1 = cross(c, d, a);
    const double d2 = cross(c, d, b);
    const double d3 = cross(a, b, c);
    const double d4 = cross(a, b, d);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

bool self_intersects(std::span<const Point2> polygon) {
    const std::size_t n = polygon.size();
    if (n < 4) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = polygon[i];
        const Point2 b = polygon[(i + 1) % n];
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (segments_cross(a, b, polygon[j], polygon[(j + 1) % n])) return true;
        }
    }
    return false;
}

}  // namespace bscp
