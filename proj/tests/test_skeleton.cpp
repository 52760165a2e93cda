#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bscp/error.hpp"
#include "bscp/shape_io.hpp"
#include "bscp/skeleton.hpp"
#include "bscp/synth.hpp"
#include "oracles.hpp"

using namespace bscp;

namespace {

struct Prepared {
    BinaryMask mask;
    DistanceField field;
    Skeleton skeleton;
    Contour contour;
};

Prepared prepare(const BinaryMask& raw, int contour_points = 256) {
    Prepared p;
    p.mask = canonicalize_mask(raw);
    p.field = distance_transform(p.mask);
    p.skeleton = extract_skeleton(p.mask, p.field);
    p.contour = trace_contour(p.mask, contour_points);
    return p;
}

}  // namespace

TEST(DistanceTransform, BoundaryPixelsAreZero) {
    const auto mask = canonicalize_mask(oracle::rectangle(12, 8));
    const auto field = distance_transform(mask);
    for (int x = 1; x <= 12; ++x) {
        EXPECT_EQ(field.at(x, 1), 0.0);
        EXPECT_EQ(field.at(x, 8), 0.0);
    }
    EXPECT_EQ(field.at(0, 0), 0.0);
}

TEST(DistanceTransform, DiscCentreIsRadius) {
    const int r = 25;
    const auto raw = oracle::disc(r);
    const auto field = distance_transform(raw);
    const int c = raw.width() / 2;
    EXPECT_NEAR(field.at(c, c), r, 1.0);
}

TEST(DistanceTransform, MatchesBruteForce) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        const auto mask = oracle::random_blob(64, 64, rng);
        const auto field = distance_transform(mask);
        const auto want = oracle::brute_distance_transform(mask);
        for (std::size_t i = 0; i < want.size(); ++i) ASSERT_NEAR(field.values[i], want[i], 0.5);
    }
}

TEST(Skeleton, RectangleHasCentreline) {
    const int w = 200, h = 20;
    const auto p = prepare(oracle::rectangle(w, h));
    const double cy = 0.5 * (1 + h);  // pixel rows 1..h after padding
    int on_line = 0;
    for (std::size_t i = 0; i < p.skeleton.size(); ++i) {
        const auto q = p.skeleton.points[i];
        if (q.x < 30 || q.x > w - 30) continue;
        EXPECT_LE(std::abs(q.y - cy), 1.0);
        EXPECT_NEAR(p.skeleton.radius[i], 0.5 * h, 1.0);
        ++on_line;
    }
    EXPECT_GE(on_line, w - 60);
}

TEST(Skeleton, DiscCollapsesToCentre) {
    const auto raw = oracle::disc(30);
    const auto p = prepare(raw);
    const double c = 0.5 * (p.mask.width() - 1);
    ASSERT_GT(p.skeleton.size(), 0u);
    for (const auto& q : p.skeleton.points) EXPECT_LE(std::hypot(q.x - c, q.y - c), 2.0);
}

TEST(Skeleton, ReconstructionCoversForeground) {
    std::mt19937_64 rng(41);
    SynthOptions options;
    options.per_class = 3;
    auto shapes = synth_shapes(options);
    for (int i = 0; i < 6; ++i) shapes.add(canonicalize_mask(oracle::random_blob(100, 100, rng)), 0, "blob");
    for (int i = 0; i < 4; ++i) shapes.add(canonicalize_mask(oracle::random_blob(200, 200, rng)), 0, "blob");
    shapes.add(oracle::disc(30), 0, "disc");
    shapes.add(oracle::rectangle(120, 40), 0, "rectangle");
    for (const auto& mask : shapes.masks) {
        const auto p = prepare(mask);
        std::size_t covered = 0, total = 0;
        for (int y = 0; y < p.mask.height(); ++y)
            for (int x = 0; x < p.mask.width(); ++x) {
                // Boundary pixels sit at distance 0 and form the contour itself.
                if (p.field.at(x, y) <= 0.0) continue;
                ++total;
                for (std::size_t k = 0; k < p.skeleton.size(); ++k) {
                    const auto s = p.skeleton.points[k];
                    if (std::hypot(x - s.x, y - s.y) <= p.skeleton.radius[k]) {
                        ++covered;
                        break;
                    }
                }
            }
        EXPECT_GE(static_cast<double>(covered) / total, 0.95) << shapes.names[&mask - shapes.masks.data()];
    }
}

TEST(Skeleton, RejectsThinForeground) {
    const auto mask = canonicalize_mask(oracle::rectangle(40, 3));
    EXPECT_THROW(extract_skeleton(mask, distance_transform(mask)), ShapeError);
}

TEST(GeneratingPoints, RectangleMidpointTouchesBothLongSides) {
    const int w = 200, h = 20;
    const auto p = prepare(oracle::rectangle(w, h), 1024);
    const double spacing = closed_length(p.contour.points) / 1024.0;
    const PixelPos mid{1 + w / 2, h / 2};
    const auto g = generating_points(mid, p.contour);
    bool top = false, bottom = false;
    for (int i : g) {
        const auto q = p.contour[i];
        EXPECT_LE(std::abs(q.x - mid.x), 1.0 + spacing);
        if (std::abs(q.y - 1.0) < 1.0) top = true;
        else if (std::abs(q.y - h) < 1.0) bottom = true;
        else ADD_FAILURE() << "generating point off the long sides at y = " << q.y;
    }
    EXPECT_TRUE(top);
    EXPECT_TRUE(bottom);
}

TEST(GeneratingPoints, DiscCentreReachesContourAtRadius) {
    const int r = 30;
    const auto p = prepare(oracle::disc(r));
    const int c = p.mask.width() / 2;
    const double radius = p.field.at(c, c);
    const auto g = generating_points({c, c}, p.contour);
    ASSERT_FALSE(g.empty());
    for (int i : g) {
        ASSERT_GE(i, 0);
        ASSERT_LT(i, static_cast<int>(p.contour.size()));
        EXPECT_NEAR(distance(p.contour[i], Point2{double(c), double(c)}), radius, 1.5);
    }
}

TEST(AssociateThickness, ConstantRibbonIsHalfWidth) {
    std::vector<Point2> line;
    for (int i = 0; i <= 100; ++i) {
        const double t = 1.4 * i / 100.0;
        line.push_back({120.0 * std::sin(t), 120.0 * (1.0 - std::cos(t))});
    }
    const double half = 9.0;
    const std::vector<double> width(line.size(), half);
    const auto p = prepare(rasterize_polygon(ribbon_outline(line, width)));
    const auto assoc = associate_thickness(p.contour, p.skeleton);

    // Nearest centreline sample for each contour point; skip the end caps.
    double min_x = 1e9, min_y = 1e9;
    for (const auto& q : ribbon_outline(line, width)) {
        min_x = std::min(min_x, q.x);
        min_y = std::min(min_y, q.y);
    }
    int checked = 0;
    for (std::size_t i = 0; i < assoc.size(); ++i) {
        const auto q = assoc.contour[i];
        std::size_t nearest = 0;
        double best = 1e18;
        for (std::size_t k = 0; k < line.size(); ++k) {
            const double d = distance(q, Point2{line[k].x - min_x + 3.0, line[k].y - min_y + 3.0});
            if (d < best) {
                best = d;
                nearest = k;
            }
        }
        if (nearest < 15 || nearest > line.size() - 16) continue;
        EXPECT_NEAR(assoc.thickness[i], half, 2.0) << "contour index " << i;
        ++checked;
    }
    EXPECT_GT(checked, 150);
}

TEST(AssociateThickness, FlaggedPointsCarrySkeletonRadius) {
    std::mt19937_64 rng(51);
    const auto p = prepare(oracle::random_blob(90, 90, rng));
    const auto assoc = associate_thickness(p.contour, p.skeleton);
    int flagged = 0;
    for (std::size_t i = 0; i < assoc.size(); ++i) {
        if (!assoc.generating[i]) {
            EXPECT_EQ(assoc.skeleton_index[i], -1);
            continue;
        }
        ++flagged;
        ASSERT_GE(assoc.skeleton_index[i], 0);
        EXPECT_EQ(assoc.thickness[i], p.skeleton.radius[assoc.skeleton_index[i]]);
    }
    EXPECT_GT(flagged, 0);
}

TEST(AssociateThickness, WedgeThicknessGrowsAlongAxis) {
    const std::vector<Point2> wedge{{0, 0}, {200, -30}, {200, 30}};
    const auto p = prepare(rasterize_polygon(wedge));
    const auto assoc = associate_thickness(p.contour, p.skeleton);
    // Long sides: points well away from the apex and the base, split by y.
    const double cx_max = p.mask.width() - 1.0;
    const double cy = 0.5 * (p.mask.height() - 1);
    for (int side = 0; side < 2; ++side) {
        std::vector<std::pair<double, double>> profile;
        for (std::size_t i = 0; i < assoc.size(); ++i) {
            const auto q = assoc.contour[i];
            if (q.x < 20 || q.x > cx_max - 40) continue;
            if ((q.y < cy) != (side == 0)) continue;
            profile.emplace_back(q.x, assoc.thickness[i]);
        }
        std::sort(profile.begin(), profile.end());
        ASSERT_GT(profile.size(), 50u);
        double running_max = 0.0;
        for (const auto& [x, t] : profile) {
            EXPECT_GE(t, running_max - 1.0) << "at x = " << x;
            running_max = std::max(running_max, t);
        }
    }
}

TEST(AssociateThickness, ArcLengthDistanceWrapsAround) {
    const std::vector<Point2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto cumulative = cumulative_length(square);
    EXPECT_DOUBLE_EQ(contour_distance(cumulative, 4.0, 0, 3), 1.0);
    EXPECT_DOUBLE_EQ(contour_distance(cumulative, 4.0, 3, 0), 1.0);
    EXPECT_DOUBLE_EQ(contour_distance(cumulative, 4.0, 0, 2), 2.0);
}
