#include <gtest/gtest.h>

#include <random>

#include "bscp/encoding.hpp"
#include "bscp/error.hpp"
#include "oracles.hpp"

using namespace bscp;

namespace {

Codebook random_codebook(int k, int dim, std::mt19937_64& rng) {
    std::normal_distribution<float> n(0.0f, 1.0f);
    Codebook c;
    c.entries.resize(k, dim);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < dim; ++j) c.entries(i, j) = n(rng);
    return c;
}

std::vector<float> random_vector(int dim, std::mt19937_64& rng) {
    std::normal_distribution<float> n(0.0f, 1.0f);
    std::vector<float> v(dim);
    for (auto& x : v) x = n(rng);
    return v;
}

SparseVector sparse(int dim, std::vector<int> index, std::vector<double> value) {
    return {dim, std::move(index), std::move(value)};
}

const BoundingBox kUnitBox{0.0, 0.0, 1.0, 1.0};

}  // namespace

TEST(Llc, CodewordIsOneHot) {
    std::mt19937_64 rng(1);
    const auto book = random_codebook(20, 8, rng);
    std::vector<float> f(book.entries.row(7).data(), book.entries.row(7).data() + 8);
    const auto code = llc_encode(f, book, 5);
    const auto dense = code.dense();
    for (int j = 0; j < 20; ++j) EXPECT_NEAR(dense[j], j == 7 ? 1.0 : 0.0, 1e-6);
}

TEST(Llc, MatchesConstrainedLeastSquares) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto book = random_codebook(5, 8, rng);
        const auto f = random_vector(8, rng);
        const std::vector<int> nb{0, 1, 2, 3, 4};
        const auto code = llc_solve(f, book, nb);

        Eigen::MatrixXd B = book.entries.cast<double>().transpose();
        Eigen::VectorXd fd = Eigen::Map<const Eigen::VectorXf>(f.data(), 8).cast<double>();
        const Eigen::MatrixXd z = B.colwise() - fd;
        const double ridge = kLlcRidge * (z.transpose() * z).trace();
        const Eigen::VectorXd want = oracle::ecls(B, fd, ridge);

        Eigen::VectorXd got = Eigen::VectorXd::Zero(5);
        for (std::size_t k = 0; k < code.nonzeros(); ++k) got[code.index[k]] = code.value[k];
        EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-8);
        EXPECT_NEAR((fd - B * got).norm(), (fd - B * want).norm(), 1e-8);
    }
}

TEST(Llc, CoefficientsSumToOneAndStayLocal) {
    std::mt19937_64 rng(3);
    const auto book = random_codebook(60, 16, rng);
    DescriptorMatrix f(30, 16);
    for (int i = 0; i < 30; ++i) {
        const auto v = random_vector(16, rng);
        for (int j = 0; j < 16; ++j) f(i, j) = v[j];
    }
    const auto codes = llc_encode_all(f, book, 5);
    const auto nn = nearest_entries(f, book, 5);
    for (int i = 0; i < 30; ++i) {
        EXPECT_NEAR(codes[i].sum(), 1.0, 1e-9);
        EXPECT_LE(codes[i].nonzeros(), 5u);
        for (int idx : codes[i].index) EXPECT_NE(std::find(nn[i].begin(), nn[i].end(), idx), nn[i].end());
    }
}

TEST(Llc, NearestEntriesBruteForce) {
    std::mt19937_64 rng(4);
    const auto book = random_codebook(40, 6, rng);
    DescriptorMatrix f(10, 6);
    for (int i = 0; i < 10; ++i) {
        const auto v = random_vector(6, rng);
        for (int j = 0; j < 6; ++j) f(i, j) = v[j];
    }
    const auto nn = nearest_entries(f, book, 5);
    for (int i = 0; i < 10; ++i) {
        std::vector<std::pair<double, int>> d;
        for (int k = 0; k < 40; ++k)
            d.push_back({(book.entries.row(k).cast<double>() - f.row(i).cast<double>()).squaredNorm(), k});
        std::sort(d.begin(), d.end());
        for (int r = 0; r < 5; ++r) EXPECT_EQ(nn[i][r], d[r].second);
    }
}

TEST(Llc, NeighbourCountOutOfRangeThrows) {
    std::mt19937_64 rng(5);
    const auto book = random_codebook(4, 3, rng);
    const auto f = random_vector(3, rng);
    EXPECT_THROW(llc_encode(f, book, 5), NumericError);
}

TEST(FlipMerge, SumsAndKeepsPartPosition) {
    const ShapeCode a{sparse(6, {0, 2}, {0.7, 0.3}), {0.2, 0.4}};
    const ShapeCode b{sparse(6, {2, 5}, {0.5, 0.5}), {0.8, 0.4}};
    const auto ab = flip_merge(a, b);
    const auto ba = flip_merge(b, a);
    EXPECT_EQ(ab.values, ba.values);
    EXPECT_EQ(ab.values.dense(), (std::vector<double>{0.7, 0, 0.8, 0, 0, 0.5}));
    EXPECT_EQ(ab.position.x, 0.2);
    const auto aa = flip_merge(a, a);
    EXPECT_EQ(aa.values.dense(), (std::vector<double>{1.4, 0, 0.6, 0, 0, 0}));
}

TEST(Pyramid, CentreLiesInThreeRegions) {
    const ShapeCode c{sparse(4, {1, 3}, {0.6, 0.4}), {0.5, 0.5}};
    const auto g = spm_pool(std::span(&c, 1), kUnitBox, 4);
    EXPECT_EQ(g.dimension(), 84);
    const std::vector<int> expected{0, 1 + 3, 5 + 2 * 4 + 2};
    const double norm = std::sqrt(3.0 * (0.36 + 0.16));
    for (int r = 0; r < 21; ++r) {
        const bool hit = std::find(expected.begin(), expected.end(), r) != expected.end();
        EXPECT_NEAR(g.at(r, 1), hit ? 0.6 / norm : 0.0, 1e-12) << "region " << r;
        EXPECT_NEAR(g.at(r, 3), hit ? 0.4 / norm : 0.0, 1e-12) << "region " << r;
        EXPECT_EQ(g.at(r, 0), 0.0);
    }
    EXPECT_NEAR(g.values.norm(), 1.0, 1e-9);
}

TEST(Pyramid, MaxPoolsWithinRegion) {
    const std::vector<ShapeCode> codes{{sparse(3, {0, 1}, {0.9, -0.2}), {0.1, 0.1}},
                                       {sparse(3, {1, 2}, {0.5, 0.4}), {0.15, 0.2}}};
    const auto g = spm_pool(codes, kUnitBox, 3);
    const std::vector<double> pooled{0.9, 0.5, 0.4};
    const double norm = std::sqrt(3.0 * (0.81 + 0.25 + 0.16));
    for (int r : {0, 1, 5})
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(g.at(r, j), pooled[j] / norm, 1e-12);
}

TEST(Pyramid, GridLinesBelongToLowerRightCell) {
    EXPECT_EQ(pyramid_region({0.5, 0.5}, kUnitBox, 1), 1 + 3);
    EXPECT_EQ(pyramid_region({0.25, 0.0}, kUnitBox, 2), 5 + 1);
    EXPECT_EQ(pyramid_region({1.0, 1.0}, kUnitBox, 2), 5 + 15);
    EXPECT_EQ(pyramid_region({-3.0, 7.0}, kUnitBox, 2), 5 + 12);
    for (int level = 0; level < 3; ++level) {
        const int lo = level == 0 ? 0 : level == 1 ? 1 : 5;
        for (double x = -0.1; x <= 1.1; x += 0.05)
            for (double y = -0.1; y <= 1.1; y += 0.05) {
                const int r = pyramid_region({x, y}, kUnitBox, level);
                EXPECT_GE(r, lo);
                EXPECT_LT(r, lo + (1 << (2 * level)));
            }
    }
}

TEST(Pyramid, DefaultDimension) {
    const ShapeCode c{sparse(2500, {10}, {1.0}), {0.3, 0.7}};
    EXPECT_EQ(spm_pool(std::span(&c, 1), kUnitBox, 2500).dimension(), 52500);
}

TEST(Pyramid, EmptyInputThrows) {
    EXPECT_THROW(spm_pool(std::span<const ShapeCode>(), kUnitBox, 4), NumericError);
    const ShapeCode zero{sparse(4, {}, {}), {0.5, 0.5}};
    EXPECT_THROW(spm_pool(std::span(&zero, 1), kUnitBox, 4), NumericError);
}
