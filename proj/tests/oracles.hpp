#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the code under test beyond plain data types.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "bscp/classifier.hpp"
#include "bscp/descriptor.hpp"
#include "bscp/geometry.hpp"
#include "bscp/shape_io.hpp"

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

inline bscp::BinaryMask disc(int radius, int pad = 3) {
    const int size = 2 * (radius + pad) + 1;
    bscp::BinaryMask m(size, size);
    const int c = radius + pad;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            if ((x - c) * (x - c) + (y - c) * (y - c) <= radius * radius) m.set(x, y, true);
    return m;
}

inline bscp::BinaryMask rectangle(int w, int h, int pad = 3) {
    bscp::BinaryMask m(w + 2 * pad, h + 2 * pad);
    for (int y = pad; y < pad + h; ++y)
        for (int x = pad; x < pad + w; ++x) m.set(x, y, true);
    return m;
}

/// Filled ellipse with semi-axes a, b rotated by `angle` (radians).
inline bscp::BinaryMask ellipse(double a, double b, double angle) {
    const int r = static_cast<int>(std::ceil(std::max(a, b))) + 3;
    const int size = 2 * r + 1;
    bscp::BinaryMask m(size, size);
    const double c = std::cos(angle), s = std::sin(angle);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const double dx = x - r, dy = y - r;
            const double u = c * dx + s * dy, v = -s * dx + c * dy;
            if (u * u / (a * a) + v * v / (b * b) <= 1.0) m.set(x, y, true);
        }
    return m;
}

/// Union of random discs inside a w x h raster.
inline bscp::BinaryMask random_blob(int w, int h, std::mt19937_64& rng, int discs = 6) {
    bscp::BinaryMask m(w, h);
    std::uniform_real_distribution<double> ux(0.25 * w, 0.75 * w), uy(0.25 * h, 0.75 * h), ur(3.0, 0.22 * w);
    for (int k = 0; k < discs; ++k) {
        const double cx = ux(rng), cy = uy(rng), r = ur(rng);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y, true);
    }
    return m;
}

/// O(N^2) distance from each foreground pixel to the nearest foreground
/// pixel that has a background 4-neighbour (outside counts as background).
inline std::vector<double> brute_distance_transform(const bscp::BinaryMask& m) {
    std::vector<std::pair<int, int>> boundary;
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            if (m.at(x, y) && (!m.at(x - 1, y) || !m.at(x + 1, y) || !m.at(x, y - 1) || !m.at(x, y + 1)))
                boundary.emplace_back(x, y);
    std::vector<double> out(static_cast<std::size_t>(m.width()) * m.height(), 0.0);
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
            if (!m.at(x, y)) continue;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [bx, by] : boundary) best = std::min(best, std::hypot(x - bx, y - by));
            out[static_cast<std::size_t>(y) * m.width() + x] = best;
        }
    return out;
}

/// Triple binning of one reference point by linear scans over explicitly
/// listed edges. Distance bin k holds (e_k, e_k+1] with everything below
/// e_1 in bin 0; orientation bins are 2pi/N_o wide starting at angle 0.
inline std::vector<double> brute_ssc(const std::vector<bscp::Point2>& pos, const std::vector<double>& thick,
                                     int ref, const std::vector<double>& dist_edges, int orient_bins,
                                     const std::vector<double>& thick_edges) {
    const int n = static_cast<int>(pos.size());
    double mean = 0.0;
    int pairs = 0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            mean += std::hypot(pos[a].x - pos[b].x, pos[a].y - pos[b].y);
            ++pairs;
        }
    mean /= pairs;
    const int nd = static_cast<int>(dist_edges.size()) - 1;
    const int nt = static_cast<int>(thick_edges.size()) - 1;
    std::vector<double> hist(static_cast<std::size_t>(nd) * orient_bins * nt, 0.0);
    for (int q = 0; q < n; ++q) {
        if (q == ref) continue;
        const double dx = pos[q].x - pos[ref].x, dy = pos[q].y - pos[ref].y;
        const double d = std::hypot(dx, dy) / mean;
        if (d == 0.0 || d > dist_edges.back()) continue;
        int db = 0;
        for (int k = 1; k < nd; ++k)
            if (d >= dist_edges[k]) db = k;
        double theta = std::atan2(dy, dx);
        if (theta < 0) theta += 2 * kPi;
        int ob = static_cast<int>(std::floor(theta / (2 * kPi) * orient_bins));
        if (ob >= orient_bins) ob = 0;
        const double tau = std::log(thick[q]) - std::log(thick[ref]);
        int tb = 0;
        for (int k = 1; k < nt; ++k)
            if (tau >= thick_edges[k]) tb = k;
        hist[(static_cast<std::size_t>(db) * orient_bins + ob) * nt + tb] += 1.0;
    }
    return hist;
}

/// Equality-constrained least squares via its KKT system:
/// minimize ||f - B c||^2 + ridge ||c||^2 subject to sum(c) = 1,
/// B holding the candidate vectors as columns.
inline Eigen::VectorXd ecls(const Eigen::MatrixXd& B, const Eigen::VectorXd& f, double ridge) {
    const auto k = B.cols();
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
    kkt.topLeftCorner(k, k) = 2.0 * (B.transpose() * B + ridge * Eigen::MatrixXd::Identity(k, k));
    kkt.block(0, k, k, 1).setOnes();
    kkt.block(k, 0, 1, k).setOnes();
    Eigen::VectorXd rhs(k + 1);
    rhs.head(k) = 2.0 * B.transpose() * f;
    rhs(k) = 1.0;
    return kkt.fullPivLu().solve(rhs).head(k);
}

/// Central finite-difference gradient of the SVM objective.
inline bscp::WeightMatrix svm_numeric_gradient(const bscp::WeightMatrix& w,
                                               const std::vector<bscp::SparseVector>& g,
                                               const std::vector<int>& y, double alpha, double h) {
    bscp::WeightMatrix grad(w.rows(), w.cols());
    bscp::WeightMatrix probe = w;
    for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
            probe(r, c) = w(r, c) + h;
            const double up = bscp::svm_objective(probe, g, y, alpha);
            probe(r, c) = w(r, c) - h;
            const double down = bscp::svm_objective(probe, g, y, alpha);
            probe(r, c) = w(r, c);
            grad(r, c) = (up - down) / (2.0 * h);
        }
    return grad;
}

/// Smallest |margin| over examples and wrong classes, where the margin is
/// 1 + w_l.g - w_y.g; also flags near-ties for the best wrong class.
inline double svm_kink_distance(const bscp::WeightMatrix& w, const std::vector<bscp::SparseVector>& g,
                                const std::vector<int>& y) {
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto dense = g[i].dense();
        const Eigen::Map<const Eigen::VectorXd> x(dense.data(), static_cast<Eigen::Index>(dense.size()));
        const Eigen::VectorXd s = w * x;
        std::vector<double> wrong;
        for (Eigen::Index l = 0; l < s.size(); ++l)
            if (l != y[i]) wrong.push_back(s(l));
        std::sort(wrong.rbegin(), wrong.rend());
        closest = std::min(closest, std::abs(1.0 + wrong[0] - s(y[i])));
        if (wrong.size() > 1) closest = std::min(closest, wrong[0] - wrong[1]);
    }
    return closest;
}

}  // namespace oracle

namespace oracle {

/// Intersection over union of two masks placed with their bounding boxes'
/// top-left corners together.
inline double iou_aligned(const bscp::BinaryMask& a, const bscp::BinaryMask& b) {
    auto corner = [](const bscp::BinaryMask& m) {
        int x0 = m.width(), y0 = m.height();
        for (int y = 0; y < m.height(); ++y)
            for (int x = 0; x < m.width(); ++x)
                if (m.at(x, y)) {
                    x0 = std::min(x0, x);
                    y0 = std::min(y0, y);
                }
        return std::pair{x0, y0};
    };
    const auto [ax, ay] = corner(a);
    const auto [bx, by] = corner(b);
    const int w = std::max(a.width(), b.width()) + 2, h = std::max(a.height(), b.height()) + 2;
    int inter = 0, uni = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const bool pa = a.at(x + ax, y + ay), pb = b.at(x + bx, y + by);
            inter += pa && pb;
            uni += pa || pb;
        }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

/// Number of 8-connected foreground components.
inline int components(const bscp::BinaryMask& m) {
    std::vector<int> label(static_cast<std::size_t>(m.width()) * m.height(), 0);
    int count = 0;
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
            if (!m.at(x, y) || label[static_cast<std::size_t>(y) * m.width() + x]) continue;
            ++count;
            std::vector<std::pair<int, int>> stack{{x, y}};
            label[static_cast<std::size_t>(y) * m.width() + x] = count;
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx, ny = cy + dy;
                        if (!m.at(nx, ny)) continue;
                        auto& l = label[static_cast<std::size_t>(ny) * m.width() + nx];
                        if (l) continue;
                        l = count;
                        stack.emplace_back(nx, ny);
                    }
            }
        }
    return count;
}

/// Principal-axis angle from the closed-form eigenvector of the 2x2
/// covariance, wrapped to [-pi/2, pi/2).
inline double principal_angle(const std::vector<bscp::Point2>& pts) {
    double mx = 0, my = 0;
    for (const auto& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= pts.size();
    my /= pts.size();
    double a = 0, b = 0, c = 0;
    for (const auto& p : pts) {
        a += (p.x - mx) * (p.x - mx);
        b += (p.x - mx) * (p.y - my);
        c += (p.y - my) * (p.y - my);
    }
    const double lambda = 0.5 * (a + c) + std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    double vx, vy;
    if (std::abs(b) > 1e-300) {
        vx = lambda - c;
        vy = b;
    } else {
        vx = a >= c ? 1.0 : 0.0;
        vy = a >= c ? 0.0 : 1.0;
    }
    double angle = std::atan2(vy, vx);
    while (angle >= kPi / 2) angle -= kPi;
    while (angle < -kPi / 2) angle += kPi;
    return angle;
}

}  // namespace oracle
