#include "bscp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "bscp/error.hpp"

namespace bscp {
namespace {

constexpr double kPi = std::numbers::pi;

class Jitter {
public:
    Jitter(std::uint64_t seed, double amount) : rng_(seed), amount_(amount) {}

    /// Factor in [1 - amount, 1 + amount].
    double factor() { return 1.0 + amount_ * unit(); }
    /// Offset in [-amount, amount] times `scale`.
    double offset(double scale) { return amount_ * scale * unit(); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

private:
    double unit() { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng_); }

    std::mt19937_64 rng_;
    double amount_;
};

// Periodic smooth interpolation of `values` placed at equal angles.
double periodic_interp(std::span<const double> values, double theta) {
    const auto n = static_cast<double>(values.size());
    double t = theta / (2.0 * kPi) * n;
    t -= n * std::floor(t / n);
    const auto i = static_cast<std::size_t>(t) % values.size();
    const double f = t - std::floor(t);
    const double w = 0.5 - 0.5 * std::cos(kPi * f);
    return values[i] * (1.0 - w) + values[(i + 1) % values.size()] * w;
}

// Centreline of total length 1 whose curvature is interpolated linearly
// between the control values at equal arc-length steps.
std::vector<Point2> bent_centreline(std::span<const double> curvature, int samples) {
    std::vector<Point2> out{{0.0, 0.0}};
    double heading = 0.0;
    const double ds = 1.0 / (samples - 1);
    const auto segments = static_cast<double>(curvature.size() - 1);
    for (int i = 1; i < samples; ++i) {
        const double s = (i - 0.5) * ds * segments;
        const auto k = std::min(static_cast<std::size_t>(s), curvature.size() - 2);
        const double f = s - static_cast<double>(k);
        heading += ((1.0 - f) * curvature[k] + f * curvature[k + 1]) * ds;
        out.push_back(out.back() + Point2{ds * std::cos(heading), ds * std::sin(heading)});
    }
    return out;
}

std::vector<Point2> place(std::span<const Point2> polygon, double size, double angle) {
    double min_x = polygon[0].x, max_x = polygon[0].x, min_y = polygon[0].y, max_y = polygon[0].y;
    for (const auto& p : polygon) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double scale = size / std::max(max_x - min_x, max_y - min_y);
    const Point2 centre{0.5 * (min_x + max_x), 0.5 * (min_y + max_y)};
    const double c = std::cos(angle), s = std::sin(angle);
    std::vector<Point2> out;
    out.reserve(polygon.size());
    for (const auto& p : polygon) {
        const auto q = scale * (p - centre);
        out.push_back({c * q.x - s * q.y, s * q.x + c * q.y});
    }
    return out;
}

std::vector<Point2> ribbon(Jitter& j) {
    std::vector<double> curvature(4);
    const double bend = 2.2 * j.factor();
    for (auto& k : curvature) k = bend * j.factor();
    const auto line = bent_centreline(curvature, 120);
    const std::vector<double> width(line.size(), 0.07 * j.factor());
    return ribbon_outline(line, width);
}

std::vector<Point2> wedge(Jitter& j) {
    const double half = 0.16 * j.factor();
    return {{j.offset(0.2), j.offset(0.2)}, {1.0 + j.offset(0.2), -half + j.offset(0.2)},
            {1.0 + j.offset(0.2), half + j.offset(0.2)}};
}

std::vector<Point2> star(Jitter& j) {
    std::vector<double> radius(8);
    for (std::size_t k = 0; k < radius.size(); ++k) radius[k] = (k % 2 == 0 ? 1.0 : 0.45) * j.factor();
    const double phase = j.offset(kPi / 8.0);
    std::vector<Point2> out;
    constexpr int n = 240;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * i / n;
        const double r = periodic_interp(radius, t - phase);
        out.push_back({r * std::cos(t), r * std::sin(t)});
    }
    return out;
}

std::vector<Point2> notched(Jitter& j) {
    const double a = 1.0 * j.factor();
    const double b = 0.6 * j.factor();
    const double centre = kPi / 2.0 + j.offset(0.6);
    const double half = 0.22 * j.factor();
    const double depth = 0.45 * j.factor();
    std::vector<Point2> out;
    constexpr int n = 240;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * i / n;
        double d = std::remainder(t - centre, 2.0 * kPi);
        double scale = 1.0;
        if (std::abs(d) < half) scale = 1.0 - depth * (1.0 - std::abs(d) / half);
        out.push_back({scale * a * std::cos(t), scale * b * std::sin(t)});
    }
    return out;
}

void add_shape(LabeledShapes& shapes, std::span<const Point2> outline, Jitter& j, const SynthOptions& options,
               int label, int index) {
    const double angle = options.random_rotation ? j.uniform(0.0, 2.0 * kPi) : 0.0;
    const auto placed = place(outline, options.size * j.factor(), angle);
    char name[64];
    std::snprintf(name, sizeof name, "%s-%03d", shapes.classes[label].c_str(), index);
    shapes.add(rasterize_polygon(placed), label, name);
}

}  // namespace

BinaryMask rasterize_polygon(std::span<const Point2> polygon) {
    if (polygon.size() < 3) throw ShapeError("polygon needs at least three vertices");
    double min_x = polygon[0].x, max_x = polygon[0].x, min_y = polygon[0].y, max_y = polygon[0].y;
    for (const auto& p : polygon) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const int x0 = static_cast<int>(std::floor(min_x)) - 2;
    const int y0 = static_cast<int>(std::floor(min_y)) - 2;
    const int w = static_cast<int>(std::ceil(max_x)) + 3 - x0;
    const int h = static_cast<int>(std::ceil(max_y)) + 3 - y0;
    BinaryMask mask(w, h);
    std::vector<double> crossings;
    for (int y = 0; y < h; ++y) {
        // Scanline fill with the even-odd rule; half-open edges avoid double counting vertices.
        const double cy = y0 + y;
        crossings.clear();
        for (std::size_t i = 0, k = polygon.size() - 1; i < polygon.size(); k = i++) {
            const auto& a = polygon[k];
            const auto& b = polygon[i];
            if ((a.y > cy) != (b.y > cy)) crossings.push_back(a.x + (cy - a.y) / (b.y - a.y) * (b.x - a.x));
        }
        std::sort(crossings.begin(), crossings.end());
        for (std::size_t c = 0; c + 1 < crossings.size(); c += 2) {
            const int from = static_cast<int>(std::ceil(crossings[c] - x0));
            const int to = static_cast<int>(std::ceil(crossings[c + 1] - x0));
            for (int x = std::max(from, 0); x < std::min(to, w); ++x) mask.set(x, y, true);
        }
    }
    return canonicalize_mask(mask);
}

std::vector<Point2> ribbon_outline(std::span<const Point2> centreline, std::span<const double> half_width) {
    const auto n = centreline.size();
    if (n < 2 || half_width.size() != n) throw ShapeError("ribbon needs matching centreline and widths");
    std::vector<Point2> left, right;
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = centreline[i == 0 ? 0 : i - 1];
        const auto b = centreline[i == n - 1 ? n - 1 : i + 1];
        const auto t = b - a;
        const double len = norm(t);
        const Point2 normal{-t.y / len, t.x / len};
        left.push_back(centreline[i] + half_width[i] * normal);
        right.push_back(centreline[i] - half_width[i] * normal);
    }
    std::vector<Point2> out(right.begin(), right.end());
    out.insert(out.end(), left.rbegin(), left.rend());
    return out;
}

LabeledShapes synth_shapes(const SynthOptions& options) {
    LabeledShapes shapes;
    shapes.classes = {"ribbon", "wedge", "star", "notched"};
    Jitter j(options.seed, options.perturbation);
    for (int label = 0; label < 4; ++label) {
        for (int i = 0; i < options.per_class; ++i) {
            std::vector<Point2> outline;
            switch (label) {
                case 0: outline = ribbon(j); break;
                case 1: outline = wedge(j); break;
                case 2: outline = star(j); break;
                default: outline = notched(j); break;
            }
            add_shape(shapes, outline, j, options, label, i);
        }
    }
    return shapes;
}

LabeledShapes synth_thickness(const SynthOptions& options) {
    LabeledShapes shapes;
    shapes.classes = {"constant", "tapered"};
    Jitter j(options.seed, options.perturbation);
    std::vector<std::vector<Point2>> lines;
    std::vector<double> widths;
    for (int i = 0; i < options.per_class; ++i) {
        std::vector<double> curvature(4);
        const double bend = 2.0 * j.factor();
        for (auto& k : curvature) k = bend * j.factor();
        lines.push_back(bent_centreline(curvature, 120));
        widths.push_back(0.08 * j.factor());
    }
    for (int label = 0; label < 2; ++label) {
        for (int i = 0; i < options.per_class; ++i) {
            const auto& line = lines[i];
            std::vector<double> w(line.size());
            for (std::size_t k = 0; k < line.size(); ++k) {
                const double s = static_cast<double>(k) / (line.size() - 1);
                w[k] = label == 0 ? widths[i] : widths[i] * (1.0 + options.taper * (1.0 - 2.0 * s));
            }
            add_shape(shapes, ribbon_outline(line, w), j, options, label, i);
        }
    }
    return shapes;
}

}  // namespace bscp
