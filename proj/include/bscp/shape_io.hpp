#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "bscp/geometry.hpp"
#include "bscp/image_io.hpp"

namespace bscp {

/// Foreground/background raster of a single shape. Row-major, one byte per
/// pixel (0 or 1). Reads outside the raster return background.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height);
    BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return width_ == 0 || height_ == 0; }

    bool at(int x, int y) const {
        return x >= 0 && y >= 0 && x < width_ && y < height_ && bits_[index(x, y)] != 0;
    }
    void set(int x, int y, bool value) { bits_[index(x, y)] = value ? 1 : 0; }

    std::span<const std::uint8_t> bits() const { return bits_; }
    std::size_t foreground_count() const;

    /// Size of the raster the mask was decoded from (equal to width/height
    /// for masks built in memory).
    int source_width() const { return source_width_; }
    int source_height() const { return source_height_; }
    void set_source_size(int w, int h) {
        source_width_ = w;
        source_height_ = h;
    }

    friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.bits_ == b.bits_;
    }

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    int source_width_ = 0;
    int source_height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Closed polyline; consecutive points joined, last joins first.
struct Contour {
    std::vector<Point2> points;

    std::size_t size() const { return points.size(); }
    const Point2& operator[](std::size_t i) const { return points[i]; }
};

inline constexpr std::uint8_t kForegroundThreshold = 128;

/// Keeps the largest 8-connected foreground component, crops to its
/// bounding box and pads one background pixel on every side.
/// Throws ShapeError when the raster has no foreground.
BinaryMask canonicalize_mask(const BinaryMask& raw);

/// Thresholds (value >= 128 is foreground) and canonicalizes.
BinaryMask mask_from_gray(const GrayImage& image);

/// Decodes a PNG or P5 PGM and canonicalizes it.
BinaryMask load_mask(const std::filesystem::path& path);

/// Renders foreground as 255, background as 0.
GrayImage mask_to_gray(const BinaryMask& mask);

/// Background regions not connected to the raster border become foreground.
BinaryMask fill_holes(const BinaryMask& mask);

std::vector<Point2> foreground_points(const BinaryMask& mask);
BoundingBox foreground_bounds(const BinaryMask& mask);

/// Moore-neighbour trace of the outer boundary of the foreground, starting
/// at the topmost-leftmost foreground pixel. Consecutive pixels are
/// 8-neighbours; the pixel sequence is not closed explicitly.
std::vector<PixelPos> trace_boundary(const BinaryMask& mask);

/// Outer contour with positive signed area, lightly smoothed and resampled
/// to `num_points` points equally spaced in arc length. The first point is
/// the one of greatest x (then least y).
Contour trace_contour(const BinaryMask& mask, int num_points);

/// Arc-length resampling of a closed polyline, starting at points[start].
std::vector<Point2> resample_closed(std::span<const Point2> points, int count, std::size_t start = 0);

/// Orientation of the principal axis of a point cloud, in [-pi/2, pi/2).
/// Returns 0 for an isotropic cloud. Throws ShapeError for fewer than two
/// distinct points.
double pca_major_axis_angle(std::span<const Point2> points);

/// Nearest-neighbour rotation of the foreground by `angle` radians about its
/// centroid (positive angles turn +x towards +y). The output grid is
/// symmetric about the centroid so that mirrored inputs give mirrored
/// outputs. Result is canonicalized.
BinaryMask rotate_mask(const BinaryMask& mask, double angle);

BinaryMask flip_horizontal(const BinaryMask& mask);
BinaryMask flip_vertical(const BinaryMask& mask);
BinaryMask rotate_half_turn(const BinaryMask& mask);

/// Nearest-neighbour integer upscaling.
BinaryMask upscale(const BinaryMask& mask, int factor);

/// Pose chosen by normalize_shape. The rotation aligns the principal axis
/// with x; the two flips then make the third central moments of x and y
/// non-negative. Moments within a relative 1e-9 of zero count as zero and
/// never trigger a flip.
struct ShapePose {
    double angle = 0.0;
    bool flipped_x = false;
    bool flipped_y = false;
};

struct NormalizedShape {
    BinaryMask mask;
    ShapePose pose;
};

NormalizedShape normalize_pose(const BinaryMask& mask);
BinaryMask normalize_shape(const BinaryMask& mask);

/// Third central moments (sum over foreground pixels) of x and y.
Point2 third_central_moments(const BinaryMask& mask);

}  // namespace bscp
