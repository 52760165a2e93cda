#include "bscp/encoding.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bscp/error.hpp"

namespace bscp {
namespace {

constexpr Eigen::Index kBlockRows = 512;

}  // namespace

std::vector<std::vector<int>> nearest_entries(const DescriptorMatrix& descriptors, const Codebook& codebook, int k) {
    const int size = codebook.size();
    if (k < 1 || k > size) throw NumericError("LLC neighbour count must be in [1, K]");
    if (descriptors.cols() != codebook.dimension()) throw NumericError("descriptor and codebook dimensions differ");
    const Eigen::VectorXf entry_norms = codebook.entries.rowwise().squaredNorm();
    std::vector<std::vector<int>> out(static_cast<std::size_t>(descriptors.rows()));
    std::vector<int> order(size);
    std::vector<float> dist(size);
    for (Eigen::Index start = 0; start < descriptors.rows(); start += kBlockRows) {
        const Eigen::Index rows = std::min(kBlockRows, descriptors.rows() - start);
        const Eigen::MatrixXf dots = descriptors.middleRows(start, rows) * codebook.entries.transpose();
        for (Eigen::Index r = 0; r < rows; ++r) {
            const float own = descriptors.row(start + r).squaredNorm();
            for (int j = 0; j < size; ++j) dist[j] = own - 2.0f * dots(r, j) + entry_norms[j];
            std::iota(order.begin(), order.end(), 0);
            std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
                return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
            });
            out[start + r].assign(order.begin(), order.begin() + k);
        }
    }
    return out;
}

SparseVector llc_solve(std::span<const float> f, const Codebook& codebook, std::span<const int> neighbours) {
    const int k = static_cast<int>(neighbours.size());
    const Eigen::Index dim = codebook.dimension();
    if (static_cast<Eigen::Index>(f.size()) != dim) throw NumericError("descriptor and codebook dimensions differ");
    const Eigen::Map<const Eigen::VectorXf> fv(f.data(), dim);
    const Eigen::VectorXd fd = fv.cast<double>();

    Eigen::MatrixXd z(k, dim);
    for (int i = 0; i < k; ++i) z.row(i) = codebook.entries.row(neighbours[i]).cast<double>() - fd.transpose();

    SparseVector code;
    code.dimension = codebook.size();

    const double scale = 1.0 + fd.squaredNorm();
    for (int i = 0; i < k; ++i) {
        if (z.row(i).squaredNorm() <= 1e-20 * scale) {
            code.index = {neighbours[i]};
            code.value = {1.0};
            return code;
        }
    }

    Eigen::MatrixXd gram = z * z.transpose();
    const double ridge = kLlcRidge * gram.trace();
    if (!(ridge > 0.0) || !std::isfinite(ridge)) throw NumericError("LLC Gram matrix is degenerate");
    gram.diagonal().array() += ridge;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) throw NumericError("LLC Gram system is singular");
    const Eigen::VectorXd w = ldlt.solve(Eigen::VectorXd::Ones(k));
    const double total = w.sum();
    if (!w.allFinite() || std::abs(total) < std::numeric_limits<double>::min())
        throw NumericError("LLC Gram system is singular");

    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return neighbours[a] < neighbours[b]; });
    for (int i : order) {
        if (!code.index.empty() && code.index.back() == neighbours[i])
            throw NumericError("LLC neighbour list has repeated entries");
        code.index.push_back(neighbours[i]);
        code.value.push_back(w[i] / total);
    }
    return code;
}

std::vector<SparseVector> llc_encode_all(const DescriptorMatrix& descriptors, const Codebook& codebook, int k) {
    const auto neighbours = nearest_entries(descriptors, codebook, k);
    std::vector<SparseVector> codes;
    codes.reserve(neighbours.size());
    for (Eigen::Index r = 0; r < descriptors.rows(); ++r)
        codes.push_back(llc_solve(std::span(descriptors.row(r).data(), static_cast<std::size_t>(descriptors.cols())),
                                  codebook, neighbours[r]));
    return codes;
}

SparseVector llc_encode(std::span<const float> f, const Codebook& codebook, int k) {
    DescriptorMatrix row = Eigen::Map<const DescriptorMatrix>(f.data(), 1, static_cast<Eigen::Index>(f.size()));
    return llc_encode_all(row, codebook, k).front();
}

ShapeCode flip_merge(const ShapeCode& part, const ShapeCode& mirror) {
    return {add(part.values, mirror.values), part.position};
}

int pyramid_region(Point2 position, const BoundingBox& box, int level) {
    static constexpr int kOffset[kPyramidLevels] = {0, 1, 5};
    const int cells = 1 << level;
    auto cell = [cells](double v, double lo, double extent) {
        if (!(extent > 0.0)) return 0;
        const int c = static_cast<int>(std::floor((v - lo) / extent * cells));
        return std::clamp(c, 0, cells - 1);
    };
    const int cx = cell(position.x, box.min_x, box.width());
    const int cy = cell(position.y, box.min_y, box.height());
    return kOffset[level] + cy * cells + cx;
}

BscpVector spm_pool(std::span<const ShapeCode> codes, const BoundingBox& box, int codebook_size) {
    if (codes.empty()) throw NumericError("cannot pool an empty set of codes");
    const auto k = static_cast<std::size_t>(codebook_size);
    std::vector<double> pooled(kPyramidRegions * k, -std::numeric_limits<double>::infinity());
    std::vector<bool> touched(kPyramidRegions, false);
    std::vector<double> dense;
    for (const auto& code : codes) {
        if (code.values.dimension != codebook_size) throw NumericError("code dimension differs from codebook size");
        dense = code.values.dense();
        for (int level = 0; level < kPyramidLevels; ++level) {
            const int region = pyramid_region(code.position, box, level);
            touched[region] = true;
            double* dst = pooled.data() + region * k;
            for (std::size_t j = 0; j < k; ++j) dst[j] = std::max(dst[j], dense[j]);
        }
    }
    for (int r = 0; r < kPyramidRegions; ++r)
        if (!touched[r]) std::fill_n(pooled.begin() + r * static_cast<std::ptrdiff_t>(k), k, 0.0);

    BscpVector out;
    out.codebook_size = codebook_size;
    out.values = SparseVector::from_dense(pooled);
    const double n = out.values.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw NumericError("pooled vector has zero norm");
    for (auto& v : out.values.value) v /= n;
    return out;
}

}  // namespace bscp
