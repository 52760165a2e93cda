#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bscp/dataset.hpp"
#include "bscp/geometry.hpp"
#include "bscp/shape_io.hpp"

namespace bscp {

struct SynthOptions {
    std::uint64_t seed = 0;
    int per_class = 40;
    double size = 120.0;        ///< target extent of the longer side, pixels
    double perturbation = 0.1;  ///< relative jitter of control points and parameters
    bool random_rotation = true;
    double taper = 0.1;         ///< tapered ribbons run from (1 + taper) to (1 - taper) times the mean width
};

/// Pixels whose centre lies inside the polygon (even-odd), canonicalized.
BinaryMask rasterize_polygon(std::span<const Point2> polygon);

/// Outline of a ribbon of half-width `half_width[i]` around the open
/// centreline, flat ends, anticlockwise or clockwise depending on the bend.
std::vector<Point2> ribbon_outline(std::span<const Point2> centreline, std::span<const double> half_width);

/// Four classes: "ribbon" (bent, constant width), "wedge" (straight, width
/// growing linearly), "star" (four lobes) and "notched" (ellipse with a
/// V-shaped notch).
LabeledShapes synth_shapes(const SynthOptions& options);

/// Two classes of bent ribbons sharing their centrelines: "constant" width
/// and "tapered" (width falling linearly along the ribbon, same mean).
LabeledShapes synth_thickness(const SynthOptions& options);

}  // namespace bscp
