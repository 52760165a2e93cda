#include "bscp/shape_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

#include "bscp/error.hpp"

namespace bscp {
namespace {

// Clockwise on screen (y grows downwards), starting west.
constexpr std::array<PixelPos, 8> kMoore = {{{-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};

int direction_of(PixelPos offset) {
    for (int d = 0; d < 8; ++d)
        if (kMoore[d] == offset) return d;
    throw std::logic_error("offset is not an 8-neighbour");
}

struct Moments {
    double count = 0.0;
    Point2 mean;
};

Moments centroid(const BinaryMask& mask) {
    double sx = 0.0, sy = 0.0, n = 0.0;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) {
                sx += x;
                sy += y;
                n += 1.0;
            }
    if (n == 0.0) throw ShapeError("mask has no foreground");
    return {n, {sx / n, sy / n}};
}

std::vector<Point2> smooth_closed(std::span<const Point2> points, double sigma) {
    const int n = static_cast<int>(points.size());
    const int radius = std::min(static_cast<int>(std::ceil(3.0 * sigma)), (n - 1) / 2);
    std::vector<double> kernel(2 * radius + 1);
    double total = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
        total += kernel[k + radius];
    }
    for (auto& w : kernel) w /= total;
    std::vector<Point2> out(points.size());
    for (int i = 0; i < n; ++i) {
        Point2 acc;
        for (int k = -radius; k <= radius; ++k) {
            const Point2 p = points[((i + k) % n + n) % n];
            acc = acc + kernel[k + radius] * p;
        }
        out[i] = acc;
    }
    return out;
}

}  // namespace

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height), source_width_(width), source_height_(height),
      bits_(static_cast<std::size_t>(width) * height, 0) {
    if (width < 0 || height < 0) throw ShapeError("negative mask dimensions");
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), source_width_(width), source_height_(height), bits_(std::move(bits)) {
    if (width < 0 || height < 0 || bits_.size() != static_cast<std::size_t>(width) * height)
        throw ShapeError("mask bit count does not match its dimensions");
    for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::foreground_count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask canonicalize_mask(const BinaryMask& raw) {
    const int w = raw.width();
    const int h = raw.height();
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    int best_label = -1;
    std::size_t best_size = 0;
    int next_label = 0;
    std::vector<PixelPos> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!raw.at(x, y) || label[static_cast<std::size_t>(y) * w + x] >= 0) continue;
            const int id = next_label++;
            std::size_t size = 0;
            stack.push_back({x, y});
            label[static_cast<std::size_t>(y) * w + x] = id;
            while (!stack.empty()) {
                const PixelPos p = stack.back();
                stack.pop_back();
                ++size;
                for (const PixelPos d : kMoore) {
                    const int nx = p.x + d.x, ny = p.y + d.y;
                    if (!raw.at(nx, ny)) continue;
                    auto& l = label[static_cast<std::size_t>(ny) * w + nx];
                    if (l >= 0) continue;
                    l = id;
                    stack.push_back({nx, ny});
                }
            }
            if (size > best_size) {
                best_size = size;
                best_label = id;
            }
        }
    }
    if (best_label < 0) throw ShapeError("mask has no foreground");

    int min_x = w, min_y = h, max_x = -1, max_y = -1;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (label[static_cast<std::size_t>(y) * w + x] == best_label) {
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            }
    BinaryMask out(max_x - min_x + 3, max_y - min_y + 3);
    for (int y = min_y; y <= max_y; ++y)
        for (int x = min_x; x <= max_x; ++x)
            if (label[static_cast<std::size_t>(y) * w + x] == best_label) out.set(x - min_x + 1, y - min_y + 1, true);
    out.set_source_size(raw.source_width(), raw.source_height());
    return out;
}

BinaryMask mask_from_gray(const GrayImage& image) {
    std::vector<std::uint8_t> bits(image.pixels.size());
    std::transform(image.pixels.begin(), image.pixels.end(), bits.begin(),
                   [](std::uint8_t v) { return static_cast<std::uint8_t>(v >= kForegroundThreshold); });
    return canonicalize_mask(BinaryMask(image.width, image.height, std::move(bits)));
}

BinaryMask load_mask(const std::filesystem::path& path) {
    try {
        return mask_from_gray(read_gray_image(path));
    } catch (const ShapeError& e) {
        throw ShapeError(path.string() + ": " + e.what());
    }
}

GrayImage mask_to_gray(const BinaryMask& mask) {
    GrayImage img{mask.width(), mask.height(), {}};
    img.pixels.reserve(mask.bits().size());
    for (auto b : mask.bits()) img.pixels.push_back(b ? 255 : 0);
    return img;
}

BinaryMask fill_holes(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::uint8_t> outside(static_cast<std::size_t>(w) * h, 0);
    std::vector<PixelPos> stack;
    auto seed = [&](int x, int y) {
        const auto i = static_cast<std::size_t>(y) * w + x;
        if (!mask.at(x, y) && !outside[i]) {
            outside[i] = 1;
            stack.push_back({x, y});
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }
    constexpr std::array<PixelPos, 4> four = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
    while (!stack.empty()) {
        const PixelPos p = stack.back();
        stack.pop_back();
        for (const PixelPos d : four) {
            const int nx = p.x + d.x, ny = p.y + d.y;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            seed(nx, ny);
        }
    }
    BinaryMask out = mask;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (!outside[static_cast<std::size_t>(y) * w + x]) out.set(x, y, true);
    return out;
}

std::vector<Point2> foreground_points(const BinaryMask& mask) {
    std::vector<Point2> pts;
    pts.reserve(mask.foreground_count());
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) pts.push_back({static_cast<double>(x), static_cast<double>(y)});
    return pts;
}

BoundingBox foreground_bounds(const BinaryMask& mask) {
    int min_x = mask.width(), min_y = mask.height(), max_x = -1, max_y = -1;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) {
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            }
    if (max_x < 0) throw ShapeError("mask has no foreground");
    // Pixel (x, y) covers [x - 0.5, x + 0.5] x [y - 0.5, y + 0.5].
    return {min_x - 0.5, min_y - 0.5, max_x + 0.5, max_y + 0.5};
}

std::vector<PixelPos> trace_boundary(const BinaryMask& mask) {
    PixelPos start{-1, -1};
    for (int y = 0; y < mask.height() && start.x < 0; ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) {
                start = {x, y};
                break;
            }
    if (start.x < 0) throw ShapeError("mask has no foreground");

    std::vector<PixelPos> out{start};
    PixelPos current = start;
    int back = 0;  // west of the first pixel is background by raster order
    PixelPos first_step{-1, -1};
    const std::size_t limit = 4 * mask.foreground_count() + 16;
    while (out.size() <= limit) {
        int found = -1;
        for (int k = 1; k <= 8; ++k) {
            const int d = (back + k) % 8;
            if (mask.at(current.x + kMoore[d].x, current.y + kMoore[d].y)) {
                found = d;
                break;
            }
        }
        if (found < 0) return out;  // isolated pixel

        const PixelPos next{current.x + kMoore[found].x, current.y + kMoore[found].y};
        if (current == start) {
            if (first_step.x < 0) {
                first_step = next;
            } else if (next == first_step) {
                break;
            }
        }
        const int prev_dir = (found + 7) % 8;
        const PixelPos backtrack{current.x + kMoore[prev_dir].x, current.y + kMoore[prev_dir].y};
        back = direction_of({backtrack.x - next.x, backtrack.y - next.y});
        current = next;
        out.push_back(current);
    }
    if (out.size() > 1 && out.back() == start) out.pop_back();
    return out;
}

std::vector<Point2> resample_closed(std::span<const Point2> points, int count, std::size_t start) {
    const std::size_t n = points.size();
    if (n == 0 || count <= 0) return {};
    std::vector<Point2> ordered(n);
    for (std::size_t i = 0; i < n; ++i) ordered[i] = points[(start + i) % n];
    const double total = closed_length(ordered);
    std::vector<Point2> out;
    out.reserve(count);
    if (total <= 0.0) {
        out.assign(count, ordered[0]);
        return out;
    }
    const double step = total / count;
    std::size_t seg = 0;
    double seg_start = 0.0;
    double seg_len = distance(ordered[0], ordered[1 % n]);
    for (int k = 0; k < count; ++k) {
        const double target = k * step;
        while (seg + 1 < n && seg_start + seg_len < target) {
            seg_start += seg_len;
            ++seg;
            seg_len = distance(ordered[seg], ordered[(seg + 1) % n]);
        }
        const double t = seg_len > 0.0 ? std::clamp((target - seg_start) / seg_len, 0.0, 1.0) : 0.0;
        out.push_back(lerp(ordered[seg], ordered[(seg + 1) % n], t));
    }
    return out;
}

Contour trace_contour(const BinaryMask& mask, int num_points) {
    if (num_points < 3) throw ShapeError("contour needs at least 3 points");
    const auto pixels = trace_boundary(mask);
    if (pixels.size() < 8) throw ShapeError("degenerate shape: fewer than 8 boundary pixels");
    std::vector<Point2> pts;
    pts.reserve(pixels.size());
    for (const auto& p : pixels) pts.push_back(p.center());
    if (signed_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());

    const auto smooth = smooth_closed(pts, 1.0);
    std::size_t start = 0;
    for (std::size_t i = 1; i < smooth.size(); ++i) {
        const Point2 a = smooth[i];
        const Point2 b = smooth[start];
        if (a.x > b.x || (a.x == b.x && a.y < b.y)) start = i;
    }
    return Contour{resample_closed(smooth, num_points, start)};
}

double pca_major_axis_angle(std::span<const Point2> points) {
    if (points.size() < 2) throw ShapeError("principal axis needs at least two points");
    if (std::all_of(points.begin(), points.end(), [&](Point2 p) { return p == points[0]; }))
        throw ShapeError("principal axis needs at least two distinct points");
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        const double dx = p.x - mx, dy = p.y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    sxx /= n - 1.0;
    syy /= n - 1.0;
    sxy /= n - 1.0;
    const double spread = std::hypot(sxx - syy, 2.0 * sxy);  // lambda1 - lambda2
    if (spread <= 1e-9 * (sxx + syy)) return 0.0;
    double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    if (angle >= std::numbers::pi / 2) angle -= std::numbers::pi;
    return angle;
}

BinaryMask rotate_mask(const BinaryMask& mask, double angle) {
    const Point2 c = centroid(mask).mean;
    const double cs = std::cos(angle), sn = std::sin(angle);
    double ext_x = 0.0, ext_y = 0.0;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) {
                const double dx = x - c.x, dy = y - c.y;
                ext_x = std::max(ext_x, std::abs(cs * dx - sn * dy));
                ext_y = std::max(ext_y, std::abs(sn * dx + cs * dy));
            }
    const int hx = static_cast<int>(std::ceil(ext_x)) + 2;
    const int hy = static_cast<int>(std::ceil(ext_y)) + 2;
    BinaryMask out(2 * hx + 1, 2 * hy + 1);
    for (int j = 0; j < out.height(); ++j) {
        const double v = j - hy;
        for (int i = 0; i < out.width(); ++i) {
            const double u = i - hx;
            // inverse rotation back into the source frame
            const double sx = c.x + cs * u + sn * v;
            const double sy = c.y - sn * u + cs * v;
            if (mask.at(static_cast<int>(std::floor(sx + 0.5)), static_cast<int>(std::floor(sy + 0.5))))
                out.set(i, j, true);
        }
    }
    out.set_source_size(mask.source_width(), mask.source_height());
    return canonicalize_mask(out);
}

BinaryMask flip_horizontal(const BinaryMask& mask) {
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) out.set(mask.width() - 1 - x, y, mask.at(x, y));
    out.set_source_size(mask.source_width(), mask.source_height());
    return out;
}

BinaryMask flip_vertical(const BinaryMask& mask) {
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) out.set(x, mask.height() - 1 - y, mask.at(x, y));
    out.set_source_size(mask.source_width(), mask.source_height());
    return out;
}

BinaryMask rotate_half_turn(const BinaryMask& mask) { return flip_vertical(flip_horizontal(mask)); }

BinaryMask upscale(const BinaryMask& mask, int factor) {
    if (factor < 1) throw ShapeError("upscale factor must be positive");
    BinaryMask out(mask.width() * factor, mask.height() * factor);
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x) out.set(x, y, mask.at(x / factor, y / factor));
    return canonicalize_mask(out);
}

Point2 third_central_moments(const BinaryMask& mask) {
    const Point2 c = centroid(mask).mean;
    double mx = 0.0, my = 0.0;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) {
                const double dx = x - c.x, dy = y - c.y;
                mx += dx * dx * dx;
                my += dy * dy * dy;
            }
    return {mx, my};
}

NormalizedShape normalize_pose(const BinaryMask& mask) {
    NormalizedShape result;
    result.pose.angle = pca_major_axis_angle(foreground_points(mask));
    BinaryMask rotated = rotate_mask(mask, -result.pose.angle);

    // Tie tolerance relative to n * sigma^3 of the respective axis.
    const auto [count, mean] = centroid(rotated);
    double vx = 0.0, vy = 0.0;
    for (int y = 0; y < rotated.height(); ++y)
        for (int x = 0; x < rotated.width(); ++x)
            if (rotated.at(x, y)) {
                vx += (x - mean.x) * (x - mean.x);
                vy += (y - mean.y) * (y - mean.y);
            }
    const double tol_x = 1e-9 * count * std::pow(vx / count, 1.5);
    const double tol_y = 1e-9 * count * std::pow(vy / count, 1.5);
    const Point2 m3 = third_central_moments(rotated);
    if (m3.x < -tol_x) {
        rotated = flip_horizontal(rotated);
        result.pose.flipped_x = true;
    }
    if (m3.y < -tol_y) {
        rotated = flip_vertical(rotated);
        result.pose.flipped_y = true;
    }
    result.mask = std::move(rotated);
    return result;
}

BinaryMask normalize_shape(const BinaryMask& mask) { return normalize_pose(mask).mask; }

}  // namespace bscp
