#include "bscp/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include "bscp/error.hpp"

namespace bscp {
namespace {

constexpr double kInnerRadius = 0.125;
constexpr double kOuterRadius = 2.5;
constexpr double kSameThickness = 0.1;
constexpr double kThicknessSpan = 0.5;

void require_positive(int value, const char* name) {
    if (value <= 0) throw ConfigError(std::string(name) + " must be positive");
}

}  // namespace

void DescriptorConfig::validate() const {
    require_positive(critical_points, "T");
    require_positive(sample_points, "n_s");
    require_positive(reference_points, "n_r");
    require_positive(distance_bins, "N_d");
    require_positive(orientation_bins, "N_o");
    require_positive(thickness_bins, "N_td");
    if (critical_points < 3) throw ConfigError("T must be at least 3");
    if (sample_points < 2) throw ConfigError("n_s must be at least 2");
    if (reference_points > sample_points) throw ConfigError("n_r cannot exceed n_s");
    if (thickness_bins % 2 == 0) throw ConfigError("N_td must be odd");
}

BinGeometry BinGeometry::from(const DescriptorConfig& config) {
    config.validate();
    BinGeometry g;
    g.orientation_bins = config.orientation_bins;
    const int nd = config.distance_bins;
    g.distance_edges.resize(nd + 1);
    for (int k = 0; k <= nd; ++k)
        g.distance_edges[k] = kInnerRadius * std::pow(kOuterRadius / kInnerRadius, static_cast<double>(k) / nd);
    g.distance_edges.back() = kOuterRadius;

    const int half = config.thickness_bins / 2;
    std::vector<double> positive;
    for (int i = 0; i < half; ++i) {
        const double t = half == 1 ? 0.0 : static_cast<double>(i) / (half - 1);
        positive.push_back(kSameThickness * std::pow(kThicknessSpan / kSameThickness, t));
    }
    const double inf = std::numeric_limits<double>::infinity();
    g.thickness_edges.push_back(-inf);
    for (auto it = positive.rbegin(); it != positive.rend(); ++it) g.thickness_edges.push_back(-*it);
    for (double e : positive) g.thickness_edges.push_back(e);
    g.thickness_edges.push_back(inf);
    return g;
}

int BinGeometry::distance_bin(double d) const {
    if (!(d > 0.0) || d > distance_edges.back()) return -1;
    const auto inner_begin = distance_edges.begin() + 1;
    const auto inner_end = distance_edges.end() - 1;
    return static_cast<int>(std::upper_bound(inner_begin, inner_end, d) - inner_begin);
}

int BinGeometry::orientation_bin(double angle) const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double a = std::fmod(angle, two_pi);
    if (a < 0.0) a += two_pi;
    const int bin = static_cast<int>(a / (two_pi / orientation_bins));
    return bin >= orientation_bins ? 0 : bin;
}

int BinGeometry::thickness_bin(double log_ratio) const {
    const auto inner_begin = thickness_edges.begin() + 1;
    const auto inner_end = thickness_edges.end() - 1;
    return static_cast<int>(std::upper_bound(inner_begin, inner_end, log_ratio) - inner_begin);
}

std::uint64_t BinGeometry::fingerprint() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const void* data, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    };
    const auto nd = static_cast<std::uint32_t>(distance_edges.size());
    const auto no = static_cast<std::uint32_t>(orientation_bins);
    const auto nt = static_cast<std::uint32_t>(thickness_edges.size());
    mix(&nd, sizeof nd);
    mix(distance_edges.data(), distance_edges.size() * sizeof(double));
    mix(&no, sizeof no);
    mix(&nt, sizeof nt);
    mix(thickness_edges.data(), thickness_edges.size() * sizeof(double));
    return h;
}

double dce_relevance(Point2 prev, Point2 v, Point2 next, double perimeter) {
    const Point2 a = v - prev;
    const Point2 b = next - v;
    const double l1 = norm(a) / perimeter;
    const double l2 = norm(b) / perimeter;
    if (l1 + l2 <= 0.0 || l1 == 0.0 || l2 == 0.0) return 0.0;
    const double turn = std::abs(std::atan2(a.x * b.y - a.y * b.x, a.x * b.x + a.y * b.y));
    return turn * l1 * l2 / (l1 + l2);
}

std::vector<int> dce_removal_order(std::span<const Point2> polygon, int keep) {
    const int n = static_cast<int>(polygon.size());
    if (keep < 3) throw ShapeError("DCE must keep at least 3 vertices");
    if (keep > n) throw ShapeError("DCE cannot keep more vertices than the contour has");
    const double perimeter = closed_length(polygon);
    if (perimeter <= 0.0) throw ShapeError("DCE on a contour of zero length");

    std::vector<int> prev(n), next(n);
    for (int i = 0; i < n; ++i) {
        prev[i] = (i + n - 1) % n;
        next[i] = (i + 1) % n;
    }
    std::vector<double> relevance(n);
    std::set<std::pair<double, int>> queue;
    for (int i = 0; i < n; ++i) {
        relevance[i] = dce_relevance(polygon[prev[i]], polygon[i], polygon[next[i]], perimeter);
        queue.emplace(relevance[i], i);
    }
    auto refresh = [&](int i) {
        queue.erase({relevance[i], i});
        relevance[i] = dce_relevance(polygon[prev[i]], polygon[i], polygon[next[i]], perimeter);
        queue.emplace(relevance[i], i);
    };

    std::vector<int> removed;
    removed.reserve(n - keep);
    for (int alive = n; alive > keep; --alive) {
        const int v = queue.begin()->second;
        queue.erase(queue.begin());
        removed.push_back(v);
        const int p = prev[v], q = next[v];
        next[p] = q;
        prev[q] = p;
        refresh(p);
        refresh(q);
    }
    return removed;
}

CriticalPointSet dce_critical_points(const Contour& contour, int count) {
    const auto removed = dce_removal_order(contour.points, count);
    std::vector<bool> gone(contour.size(), false);
    for (int r : removed) gone[r] = true;
    CriticalPointSet out;
    for (std::size_t i = 0; i < contour.size(); ++i)
        if (!gone[i]) out.indices.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> reference_slots(int sample_points, int reference_points) {
    if (reference_points == 1) return {(sample_points - 1) / 2};
    std::vector<int> slots(reference_points);
    const double step = static_cast<double>(sample_points - 1) / (reference_points - 1);
    for (int k = 0; k < reference_points; ++k) {
        const int mirror = reference_points - 1 - k;
        if (k <= mirror) {
            slots[k] = static_cast<int>(std::floor(k * step + 0.5));
        } else {
            slots[k] = sample_points - 1 - slots[mirror];
        }
    }
    return slots;
}

ContourPart make_part(const AssociatedContour& contour, int start_index, int end_index, const DescriptorConfig& config) {
    const int n = static_cast<int>(contour.size());
    if (start_index == end_index) throw ShapeError("contour part needs distinct endpoints");
    std::vector<Point2> pts;
    std::vector<double> thick;
    for (int i = start_index;; i = (i + 1) % n) {
        pts.push_back(contour.contour[i]);
        thick.push_back(contour.thickness[i]);
        if (i == end_index) break;
    }
    const auto cumulative = cumulative_length(pts);
    const double length = cumulative.back();

    auto point_at = [&](double s) {
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
        std::size_t seg = it == cumulative.begin() ? 0 : static_cast<std::size_t>(it - cumulative.begin()) - 1;
        if (seg + 1 >= pts.size()) return PartSample{pts.back(), thick.back()};
        const double len = cumulative[seg + 1] - cumulative[seg];
        const double t = len > 0.0 ? (s - cumulative[seg]) / len : 0.0;
        return PartSample{lerp(pts[seg], pts[seg + 1], t), thick[seg] + t * (thick[seg + 1] - thick[seg])};
    };

    ContourPart part;
    part.start_index = start_index;
    part.end_index = end_index;
    const int ns = config.sample_points;
    part.samples.reserve(ns);
    for (int k = 0; k < ns; ++k) part.samples.push_back(point_at(length * k / (ns - 1)));
    part.samples.back() = PartSample{pts.back(), thick.back()};
    part.median_position = point_at(0.5 * length).position;

    double mean_thickness = 0.0;
    for (const auto& s : part.samples) mean_thickness += s.thickness;
    mean_thickness /= ns;
    if (!(mean_thickness > 0.0)) throw ShapeError("contour part has no positive thickness");
    for (auto& s : part.samples) s.thickness /= mean_thickness;

    double total = 0.0;
    for (int a = 0; a < ns; ++a)
        for (int b = a + 1; b < ns; ++b) total += distance(part.samples[a].position, part.samples[b].position);
    part.mean_distance = total / (0.5 * ns * (ns - 1));
    if (!(part.mean_distance > 0.0)) throw ShapeError("contour part collapses to a point");

    part.reference_slots = reference_slots(ns, config.reference_points);
    return part;
}

std::vector<ContourPart> enumerate_parts(const AssociatedContour& contour, const CriticalPointSet& critical,
                                         const DescriptorConfig& config) {
    const int t = static_cast<int>(critical.size());
    std::vector<ContourPart> parts;
    parts.reserve(static_cast<std::size_t>(t) * (t - 1));
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j) {
            if (i == j) continue;
            auto part = make_part(contour, critical.indices[i], critical.indices[j], config);
            part.first = i;
            part.second = j;
            parts.push_back(std::move(part));
        }
    return parts;
}

ContourPart mirror_part(const ContourPart& part) {
    ContourPart m = part;
    const double axis = part.median_position.x;
    std::reverse(m.samples.begin(), m.samples.end());
    for (auto& s : m.samples) s.position.x = 2.0 * axis - s.position.x;
    const int last = static_cast<int>(part.samples.size()) - 1;
    const int nr = static_cast<int>(part.reference_slots.size());
    for (int k = 0; k < nr; ++k) m.reference_slots[k] = last - part.reference_slots[nr - 1 - k];
    return m;
}

std::vector<double> ssc_histogram(const ContourPart& part, int reference, const BinGeometry& bins) {
    std::vector<double> hist(bins.bins(), 0.0);
    const int slot = part.reference_slots.at(reference);
    const PartSample& r = part.samples[slot];
    const double log_r = std::log(r.thickness);
    for (std::size_t i = 0; i < part.samples.size(); ++i) {
        if (static_cast<int>(i) == slot) continue;
        const PartSample& q = part.samples[i];
        const double dx = q.position.x - r.position.x;
        const double dy = q.position.y - r.position.y;
        const double d = std::hypot(dx, dy);
        if (d == 0.0) continue;
        const int db = bins.distance_bin(d / part.mean_distance);
        if (db < 0) continue;
        const int ob = bins.orientation_bin(std::atan2(dy, dx));
        const int tb = bins.thickness_bin(std::log(q.thickness) - log_r);
        hist[bins.flat_index(db, ob, tb)] += 1.0;
    }
    return hist;
}

std::vector<float> part_descriptor(const ContourPart& part, const BinGeometry& bins) {
    std::vector<float> out;
    out.reserve(part.reference_slots.size() * bins.bins());
    for (std::size_t r = 0; r < part.reference_slots.size(); ++r) {
        const auto hist = ssc_histogram(part, static_cast<int>(r), bins);
        double sq = 0.0;
        for (double v : hist) sq += v * v;
        const double scale = sq > 0.0 ? 1.0 / std::sqrt(sq) : 0.0;
        for (double v : hist) out.push_back(static_cast<float>(v * scale));
    }
    return out;
}

}  // namespace bscp
