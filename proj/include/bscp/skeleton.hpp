#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bscp/geometry.hpp"
#include "bscp/shape_io.hpp"

namespace bscp {

/// Euclidean distance from every foreground pixel centre to the nearest
/// boundary pixel centre. Boundary pixels (foreground with a 4-neighbour in
/// the background) hold 0, as does the background.
struct DistanceField {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int x, int y) const {
        return (x < 0 || y < 0 || x >= width || y >= height) ? 0.0 : values[static_cast<std::size_t>(y) * width + x];
    }
    double max() const;
};

DistanceField distance_transform(const BinaryMask& mask);

/// Thin, 8-connected medial skeleton with per-point inscribed-disc radius.
struct Skeleton {
    std::vector<PixelPos> points;
    std::vector<double> radius;
    std::vector<std::vector<int>> adjacency;

    std::size_t size() const { return points.size(); }
    double max_radius() const;
};

inline constexpr double kDefaultPruneRatio = 0.08;

/// Ridge pixels of the distance field (value >= 2 and not smaller than at
/// least 6 of the 8 neighbours) anchor a distance-ordered homotopic thinning
/// of the foreground; the remainder is thinned to one pixel width. End
/// branches are then removed, weakest first, while the largest depth by which
/// a foreground pixel would drop out of the union of the remaining discs stays
/// below prune_ratio * max radius. A skeleton without junctions only loses end
/// pixels whose discs add less than half a pixel.
///
/// Radii are the distance values, floored at 0.5 px for skeleton pixels that
/// sit on the boundary of one-pixel necks. Throws ShapeError when the
/// largest distance is below 2 px.
Skeleton extract_skeleton(const BinaryMask& mask, const DistanceField& field, double prune_ratio = kDefaultPruneRatio);

/// Pixels of the thinned skeleton before pruning; exposed for inspection.
std::vector<PixelPos> thin_skeleton(const BinaryMask& mask, const DistanceField& field);

/// Indices of the contour points nearest to each of the eight neighbours of
/// `p` (lowest index on ties), sorted and de-duplicated.
std::vector<int> generating_points(PixelPos p, const Contour& contour);

/// Contour with an object-thickness value per point.
struct AssociatedContour {
    Contour contour;
    std::vector<double> thickness;
    std::vector<bool> generating;      ///< point is a generating point of the skeleton
    std::vector<int> skeleton_index;   ///< skeleton point mapped to a generating point, else -1

    std::size_t size() const { return contour.size(); }
};

/// Generating points take the radius of their skeleton point (the largest
/// one when several skeleton points generate the same contour point).
/// Candidates farther than R(p) + sqrt(2) from their skeleton point p are not
/// tangent to its disc and are dropped. Every
/// other contour point copies the nearest generating point along the closed
/// contour, lower index on ties.
AssociatedContour associate_thickness(const Contour& contour, const Skeleton& skeleton);

/// Arc length of the shorter way between contour points i and j.
double contour_distance(std::span<const double> cumulative, double perimeter, std::size_t i, std::size_t j);

/// Skeleton pixels drawn at 255 over the foreground at 96.
void write_skeleton_overlay(const std::filesystem::path& path, const BinaryMask& mask, const Skeleton& skeleton);

/// `contour_index x y thickness flagged` rows.
void write_thickness_table(std::ostream& out, const AssociatedContour& contour);

}  // namespace bscp
