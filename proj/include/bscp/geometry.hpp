#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace bscp {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
    friend bool operator==(Point2 a, Point2 b) = default;
};

struct PixelPos {
    int x = 0;
    int y = 0;

    friend bool operator==(PixelPos a, PixelPos b) = default;
    Point2 center() const { return {static_cast<double>(x), static_cast<double>(y)}; }
};

inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 lerp(Point2 a, Point2 b, double t) { return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; }

/// Axis-aligned box in continuous pixel coordinates.
struct BoundingBox {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
};

/// Shoelace area of a closed polygon; positive for anticlockwise order in (x, y).
double signed_area(std::span<const Point2> polygon);

/// Perimeter of a closed polygon (last vertex joins the first).
double closed_length(std::span<const Point2> polygon);

/// Cumulative arc length at each vertex of a closed polygon; back() + closing
/// segment equals closed_length().
std::vector<double> cumulative_length(std::span<const Point2> polygon);

/// Even-odd point-in-polygon test.
bool point_in_polygon(std::span<const Point2> polygon, Point2 p);

/// True if any two non-adjacent edges of the closed polygon intersect.
bool self_intersects(std::span<const Point2> polygon);

}  // namespace bscp
