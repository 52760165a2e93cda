#include "bscp/skeleton.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <tuple>

#include "bscp/error.hpp"

namespace bscp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Uncovered depth (px) a trimmed end pixel of a bare skeleton path may add.
constexpr double kBareSlack = 0.5;

// Largest excess of |p - q| over R(p) for a generating point q of p: one diagonal step.
constexpr double kTangencySlack = std::numbers::sqrt2;

// Ring of the 3x3 neighbourhood, clockwise from west (y down).
constexpr std::array<PixelPos, 8> kRing = {{{-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};

// Squared distance transform of a sampled function (lower envelope of
// parabolas). Infinite samples contribute no parabola.
void squared_edt_1d(std::span<const double> f, std::span<double> out, std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    v.assign(n, 0);
    z.assign(n + 1, 0.0);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kInf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        double s = 0.0;
        while (true) {
            const int p = v[k];
            s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
            if (s > z[k]) break;
            --k;  // z[0] is -inf, so k stays >= 0
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    if (k < 0) {
        std::fill(out.begin(), out.end(), kInf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const double d = q - v[j];
        out[q] = d * d + f[v[j]];
    }
}

bool is_boundary(const BinaryMask& mask, int x, int y) {
    return mask.at(x, y) && (!mask.at(x - 1, y) || !mask.at(x + 1, y) || !mask.at(x, y - 1) || !mask.at(x, y + 1));
}

// Simple-point table for (8, 4) digital topology, indexed by the ring bits.
std::array<bool, 256> build_simple_table() {
    std::array<bool, 256> table{};
    for (int config = 0; config < 256; ++config) {
        auto fg = [&](int i) { return (config >> i) & 1; };
        auto count_components = [&](bool foreground, bool eight) {
            std::array<bool, 8> seen{};
            int components = 0;
            for (int s = 0; s < 8; ++s) {
                if (seen[s] || fg(s) != foreground) continue;
                // background components only count when they touch a 4-neighbour of the centre
                bool touches = foreground;
                std::array<int, 8> stack{};
                int top = 0;
                stack[top++] = s;
                seen[s] = true;
                while (top > 0) {
                    const int c = stack[--top];
                    if (kRing[c].x == 0 || kRing[c].y == 0) touches = true;
                    for (int t = 0; t < 8; ++t) {
                        if (seen[t] || fg(t) != foreground) continue;
                        const int dx = std::abs(kRing[c].x - kRing[t].x);
                        const int dy = std::abs(kRing[c].y - kRing[t].y);
                        const bool adjacent = eight ? (dx <= 1 && dy <= 1) : (dx + dy == 1);
                        if (!adjacent) continue;
                        seen[t] = true;
                        stack[top++] = t;
                    }
                }
                if (touches) ++components;
            }
            return components;
        };
        table[config] = count_components(true, true) == 1 && count_components(false, false) == 1;
    }
    return table;
}

const std::array<bool, 256>& simple_table() {
    static const std::array<bool, 256> table = build_simple_table();
    return table;
}

struct Grid {
    int width;
    int height;
    std::vector<std::uint8_t> on;

    bool at(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height && on[static_cast<std::size_t>(y) * width + x];
    }
    void clear(int x, int y) { on[static_cast<std::size_t>(y) * width + x] = 0; }

    int ring_bits(int x, int y) const {
        int bits = 0;
        for (int i = 0; i < 8; ++i)
            if (at(x + kRing[i].x, y + kRing[i].y)) bits |= 1 << i;
        return bits;
    }
    int neighbour_count(int x, int y) const { return std::popcount(static_cast<unsigned>(ring_bits(x, y))); }
    bool simple(int x, int y) const { return simple_table()[ring_bits(x, y)]; }
};

bool is_ridge(const DistanceField& field, int x, int y) {
    const double v = field.at(x, y);
    if (v < 2.0) return false;
    int dominated = 0;
    for (const auto& d : kRing)
        if (v >= field.at(x + d.x, y + d.y)) ++dominated;
    return dominated >= 6;
}

struct Branch {
    std::vector<PixelPos> pixels;  // from the endpoint inwards
    bool reaches_junction = false;
    PixelPos junction;
};

Branch trace_branch(const Grid& grid, PixelPos end) {
    Branch b;
    b.pixels.push_back(end);
    PixelPos prev = end;
    PixelPos cur{-1, -1};
    for (const auto& d : kRing)
        if (grid.at(end.x + d.x, end.y + d.y)) {
            cur = {end.x + d.x, end.y + d.y};
            break;
        }
    const std::size_t limit = grid.on.size();
    while (b.pixels.size() <= limit) {
        const int degree = grid.neighbour_count(cur.x, cur.y);
        if (degree >= 3) {
            b.reaches_junction = true;
            b.junction = cur;
            return b;
        }
        b.pixels.push_back(cur);
        if (degree <= 1) return b;  // other end of a bare path
        PixelPos next{-1, -1};
        for (const auto& d : kRing) {
            const PixelPos n{cur.x + d.x, cur.y + d.y};
            if (grid.at(n.x, n.y) && !(n == prev)) {
                next = n;
                break;
            }
        }
        prev = cur;
        cur = next;
    }
    return b;
}

double radius_at(const DistanceField& field, PixelPos p) { return std::max(field.at(p.x, p.y), 0.5); }

// Per foreground pixel, the best disc margin R(s) - |x - s| over the current
// skeleton and the skeleton pixel achieving it. Negative margins mean the
// pixel lies outside every disc.
class Reconstruction {
public:
    Reconstruction(const BinaryMask& mask, const DistanceField& field, Grid& grid)
        : field_(field), grid_(grid), owner_(grid.on.size(), -1), margin_(grid.on.size(), -kInf) {
        for (int y = 0; y < grid.height; ++y)
            for (int x = 0; x < grid.width; ++x)
                if (mask.at(x, y)) pixels_.push_back(static_cast<int>(index(x, y)));
        for (int y = 0; y < grid.height; ++y)
            for (int x = 0; x < grid.width; ++x)
                if (grid.at(x, y)) members_.push_back({x, y});
        excluded_.assign(grid.on.size(), 0);
        for (int i : pixels_) refresh(i);
    }

    // Largest growth of the uncovered depth of any pixel if `removed` left
    // the skeleton. Stops early once the growth exceeds `limit`.
    double contribution(std::span<const PixelPos> removed, double limit) {
        mark(removed, 1);
        double worst = 0.0;
        for (int i : pixels_) {
            if (owner_[i] < 0 || !excluded_[owner_[i]]) continue;
            const double before = std::max(0.0, -margin_[i]);
            const double after = std::max(0.0, -best_margin(i, -(before + worst)).first);
            worst = std::max(worst, after - before);
            if (worst > limit) break;
        }
        mark(removed, 0);
        return worst;
    }

    void remove(std::span<const PixelPos> removed) {
        mark(removed, 1);
        for (const auto& p : removed) grid_.clear(p.x, p.y);
        std::erase_if(members_, [&](PixelPos q) { return excluded_[index(q.x, q.y)] != 0; });
        for (int i : pixels_)
            if (owner_[i] >= 0 && excluded_[owner_[i]]) refresh(i);
        mark(removed, 0);
    }

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * grid_.width + x; }

    void mark(std::span<const PixelPos> pixels, std::uint8_t value) {
        for (const auto& p : pixels) excluded_[index(p.x, p.y)] = value;
    }

    // Best margin at pixel i over non-excluded members; returns as soon as a
    // margin reaches `enough`.
    std::pair<double, int> best_margin(int i, double enough) const {
        const int x = i % grid_.width, y = i / grid_.width;
        double best = -kInf;
        int owner = -1;
        for (const auto& s : members_) {
            const auto j = index(s.x, s.y);
            if (excluded_[j]) continue;
            const double m = radius_at(field_, s) - std::hypot(double(x - s.x), double(y - s.y));
            if (m > best) {
                best = m;
                owner = static_cast<int>(j);
                if (best >= enough) break;
            }
        }
        return {best, owner};
    }

    void refresh(int i) {
        const auto [m, o] = best_margin(i, kInf);
        margin_[i] = m;
        owner_[i] = o;
    }

    static double radius_at(const DistanceField& field, PixelPos p) { return std::max(field.at(p.x, p.y), 0.5); }

    const DistanceField& field_;
    Grid& grid_;
    std::vector<int> pixels_;
    std::vector<PixelPos> members_;
    std::vector<int> owner_;
    std::vector<double> margin_;
    std::vector<std::uint8_t> excluded_;
};

}  // namespace

double DistanceField::max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }

double Skeleton::max_radius() const { return radius.empty() ? 0.0 : *std::max_element(radius.begin(), radius.end()); }

DistanceField distance_transform(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    DistanceField field{w, h, std::vector<double>(static_cast<std::size_t>(w) * h, kInf)};
    bool any_source = false;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (is_boundary(mask, x, y)) {
                field.values[static_cast<std::size_t>(y) * w + x] = 0.0;
                any_source = true;
            }
    if (!any_source) {
        std::fill(field.values.begin(), field.values.end(), 0.0);
        return field;
    }

    std::vector<int> v;
    std::vector<double> z;
    std::vector<double> column(h), column_out(h);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) column[y] = field.values[static_cast<std::size_t>(y) * w + x];
        squared_edt_1d(column, column_out, v, z);
        for (int y = 0; y < h; ++y) field.values[static_cast<std::size_t>(y) * w + x] = column_out[y];
    }
    std::vector<double> row_out(w);
    for (int y = 0; y < h; ++y) {
        std::span<double> row(field.values.data() + static_cast<std::size_t>(y) * w, w);
        squared_edt_1d(row, row_out, v, z);
        for (int x = 0; x < w; ++x) row[x] = mask.at(x, y) ? std::sqrt(row_out[x]) : 0.0;
    }
    return field;
}

std::vector<PixelPos> thin_skeleton(const BinaryMask& mask, const DistanceField& field) {
    Grid grid{mask.width(), mask.height(), std::vector<std::uint8_t>(mask.bits().begin(), mask.bits().end())};
    std::vector<std::uint8_t> anchor(grid.on.size(), 0);
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x)
            if (grid.at(x, y) && is_ridge(field, x, y)) anchor[static_cast<std::size_t>(y) * grid.width + x] = 1;

    // Phase 1: erode non-anchor simple points in increasing distance order.
    using Item = std::tuple<double, int, int>;  // distance, y, x
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x)
            if (grid.at(x, y)) queue.emplace(field.at(x, y), y, x);
    while (!queue.empty()) {
        const auto [d, y, x] = queue.top();
        queue.pop();
        const auto i = static_cast<std::size_t>(y) * grid.width + x;
        if (!grid.on[i] || anchor[i] || !grid.simple(x, y)) continue;
        grid.clear(x, y);
        for (const auto& r : kRing) {
            const int nx = x + r.x, ny = y + r.y;
            if (grid.at(nx, ny) && !anchor[static_cast<std::size_t>(ny) * grid.width + nx])
                queue.emplace(field.at(nx, ny), ny, nx);
        }
    }

    // Phase 2: thin the anchored set to unit width. Pixels with at most two
    // neighbours stay, so line ends do not unravel.
    std::vector<Item> order;
    bool changed = true;
    while (changed) {
        changed = false;
        order.clear();
        for (int y = 0; y < grid.height; ++y)
            for (int x = 0; x < grid.width; ++x)
                if (grid.at(x, y)) order.emplace_back(field.at(x, y), y, x);
        std::sort(order.begin(), order.end());
        for (const auto& [d, y, x] : order) {
            if (grid.neighbour_count(x, y) >= 3 && grid.simple(x, y)) {
                grid.clear(x, y);
                changed = true;
            }
        }
    }

    std::vector<PixelPos> out;
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x)
            if (grid.at(x, y)) out.push_back({x, y});
    return out;
}

Skeleton extract_skeleton(const BinaryMask& mask, const DistanceField& field, double prune_ratio) {
    if (field.width != mask.width() || field.height != mask.height())
        throw ShapeError("distance field does not match the mask");
    const double max_dt = field.max();
    if (max_dt < 2.0) throw ShapeError("foreground too thin for a skeleton (max distance < 2 px)");

    Grid grid{mask.width(), mask.height(), std::vector<std::uint8_t>(mask.bits().size(), 0)};
    for (const auto& p : thin_skeleton(mask, field)) grid.on[static_cast<std::size_t>(p.y) * grid.width + p.x] = 1;

    double max_radius = 0.0;
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x)
            if (grid.at(x, y)) max_radius = std::max(max_radius, radius_at(field, {x, y}));
    const double threshold = prune_ratio * max_radius;

    Reconstruction reconstruction(mask, field, grid);
    while (true) {
        std::vector<Branch> branches;
        for (int y = 0; y < grid.height; ++y)
            for (int x = 0; x < grid.width; ++x)
                if (grid.at(x, y) && grid.neighbour_count(x, y) == 1) branches.push_back(trace_branch(grid, {x, y}));

        int best = -1;
        double best_score = kInf;
        for (std::size_t b = 0; b < branches.size(); ++b) {
            if (!branches[b].reaches_junction) continue;
            const double score = reconstruction.contribution(branches[b].pixels, std::min(best_score, threshold));
            if (score < best_score) {
                best_score = score;
                best = static_cast<int>(b);
            }
        }
        if (best >= 0 && best_score < threshold) {
            reconstruction.remove(branches[best].pixels);
            continue;
        }
        if (best < 0 && !branches.empty()) {
            // Bare path: drop end pixels whose discs add nothing.
            auto path = branches.front().pixels;
            for (int end = 0; end < 2; ++end) {
                while (path.size() > 1) {
                    const std::array<PixelPos, 1> tip{path.front()};
                    if (reconstruction.contribution(tip, kBareSlack) > kBareSlack) break;
                    reconstruction.remove(tip);
                    path.erase(path.begin());
                }
                std::reverse(path.begin(), path.end());
            }
        }
        break;
    }

    Skeleton skel;
    std::vector<int> index(grid.on.size(), -1);
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x)
            if (grid.at(x, y)) {
                index[static_cast<std::size_t>(y) * grid.width + x] = static_cast<int>(skel.points.size());
                skel.points.push_back({x, y});
                skel.radius.push_back(radius_at(field, {x, y}));
            }
    skel.adjacency.resize(skel.points.size());
    for (std::size_t i = 0; i < skel.points.size(); ++i) {
        const auto p = skel.points[i];
        for (const auto& d : kRing)
            if (grid.at(p.x + d.x, p.y + d.y))
                skel.adjacency[i].push_back(index[static_cast<std::size_t>(p.y + d.y) * grid.width + p.x + d.x]);
        std::sort(skel.adjacency[i].begin(), skel.adjacency[i].end());
    }
    return skel;
}

std::vector<int> generating_points(PixelPos p, const Contour& contour) {
    std::vector<int> out;
    for (const auto& d : kRing) {
        const Point2 n{static_cast<double>(p.x + d.x), static_cast<double>(p.y + d.y)};
        int best = -1;
        double best_d2 = kInf;
        for (std::size_t i = 0; i < contour.size(); ++i) {
            const double dx = contour[i].x - n.x, dy = contour[i].y - n.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = static_cast<int>(i);
            }
        }
        if (best >= 0) out.push_back(best);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double contour_distance(std::span<const double> cumulative, double perimeter, std::size_t i, std::size_t j) {
    const double d = std::abs(cumulative[i] - cumulative[j]);
    return std::min(d, perimeter - d);
}

AssociatedContour associate_thickness(const Contour& contour, const Skeleton& skeleton) {
    if (skeleton.size() == 0) throw ShapeError("empty skeleton");
    const std::size_t n = contour.size();
    AssociatedContour out{contour, std::vector<double>(n, 0.0), std::vector<bool>(n, false), std::vector<int>(n, -1)};

    for (std::size_t s = 0; s < skeleton.size(); ++s) {
        const Point2 centre = skeleton.points[s].center();
        for (const int q : generating_points(skeleton.points[s], contour)) {
            if (distance(centre, contour[q]) > skeleton.radius[s] + kTangencySlack) continue;
            const int current = out.skeleton_index[q];
            if (current < 0 || skeleton.radius[s] > skeleton.radius[current]) out.skeleton_index[q] = static_cast<int>(s);
        }
    }
    std::vector<std::size_t> flagged;
    for (std::size_t q = 0; q < n; ++q)
        if (out.skeleton_index[q] >= 0) {
            out.generating[q] = true;
            out.thickness[q] = skeleton.radius[out.skeleton_index[q]];
            flagged.push_back(q);
        }
    if (flagged.empty()) throw ShapeError("skeleton produced no generating points");

    const auto cumulative = cumulative_length(contour.points);
    const double perimeter = closed_length(contour.points);
    for (std::size_t q = 0; q < n; ++q) {
        if (out.generating[q]) continue;
        std::size_t best = flagged.front();
        double best_d = kInf;
        for (const auto g : flagged) {  // ascending, so strict < keeps the lower index on ties
            const double d = contour_distance(cumulative, perimeter, q, g);
            if (d < best_d) {
                best_d = d;
                best = g;
            }
        }
        out.thickness[q] = out.thickness[best];
    }
    return out;
}

void write_skeleton_overlay(const std::filesystem::path& path, const BinaryMask& mask, const Skeleton& skeleton) {
    GrayImage img{mask.width(), mask.height(), std::vector<std::uint8_t>(mask.bits().size(), 0)};
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) img.pixels[static_cast<std::size_t>(y) * mask.width() + x] = 96;
    for (const auto& p : skeleton.points) img.pixels[static_cast<std::size_t>(p.y) * mask.width() + p.x] = 255;
    write_pgm(path, img);
}

void write_thickness_table(std::ostream& out, const AssociatedContour& contour) {
    out << "contour_index x y thickness flagged\n";
    for (std::size_t i = 0; i < contour.size(); ++i)
        out << i << ' ' << contour.contour[i].x << ' ' << contour.contour[i].y << ' ' << contour.thickness[i] << ' '
            << (contour.generating[i] ? 1 : 0) << '\n';
}

}  // namespace bscp
