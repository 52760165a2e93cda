#include "bscp/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "bscp/error.hpp"

namespace bscp {
namespace {

using MatrixXdR = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr Eigen::Index kBlockRows = 1024;

double squared_distance(const MatrixXdR& a, Eigen::Index i, const MatrixXdR& b, Eigen::Index j) {
    return (a.row(i) - b.row(j)).squaredNorm();
}

}  // namespace

void Codebook::validate(int neighbours) const {
    if (size() < neighbours) throw NumericError("codebook has fewer entries than LLC neighbours");
    if (!entries.allFinite()) throw NumericError("codebook has non-finite entries");
    std::vector<int> order(size());
    std::iota(order.begin(), order.end(), 0);
    const auto cols = entries.cols();
    auto less = [&](int a, int b) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            if (entries(a, c) != entries(b, c)) return entries(a, c) < entries(b, c);
        }
        return false;
    };
    std::sort(order.begin(), order.end(), less);
    for (std::size_t i = 1; i < order.size(); ++i)
        if (!less(order[i - 1], order[i])) throw NumericError("codebook has duplicate entries");
}

DescriptorSample sample_training_descriptors(std::span<const PartDescriptorSet* const> shapes, int per_shape_cap,
                                             std::uint64_t seed) {
    if (per_shape_cap <= 0) throw NumericError("per-shape sample cap must be positive");
    std::mt19937_64 rng(seed);
    std::vector<SampleId> ids;
    Eigen::Index dim = -1;
    for (std::size_t s = 0; s < shapes.size(); ++s) {
        const auto& set = *shapes[s];
        if (set.parts.rows() != set.mirrors.rows() || set.parts.cols() != set.mirrors.cols())
            throw NumericError("part and mirror descriptors are not aligned");
        if (set.parts.rows() == 0) continue;
        if (dim < 0) dim = set.parts.cols();
        if (set.parts.cols() != dim) throw NumericError("descriptor dimensions differ between shapes");
        std::vector<int> order(static_cast<std::size_t>(set.parts.rows()));
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(per_shape_cap)));
        for (int p : order) {
            ids.push_back({static_cast<int>(s), p, false});
            ids.push_back({static_cast<int>(s), p, true});
        }
    }
    if (ids.empty()) throw NumericError("no descriptors to sample");

    DescriptorSample out;
    out.rows.resize(static_cast<Eigen::Index>(ids.size()), dim);
    for (std::size_t r = 0; r < ids.size(); ++r) {
        const auto& set = *shapes[ids[r].shape];
        out.rows.row(static_cast<Eigen::Index>(r)) = ids[r].mirrored ? set.mirrors.row(ids[r].part) : set.parts.row(ids[r].part);
    }
    out.ids = std::move(ids);
    return out;
}

double kmeans_objective(const DescriptorMatrix& data, const DescriptorMatrix& centres) {
    const MatrixXdR x = data.cast<double>();
    const MatrixXdR c = centres.cast<double>();
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) total += (c.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff();
    return total;
}

KMeansResult kmeans(const DescriptorMatrix& data, int clusters, const KMeansOptions& options) {
    const Eigen::Index n = data.rows();
    const Eigen::Index dim = data.cols();
    if (clusters < 1) throw NumericError("k-means needs at least one cluster");
    if (clusters > n) throw NumericError("k-means asked for more clusters than samples");
    if (!data.allFinite()) throw NumericError("k-means input has non-finite values");

    const MatrixXdR x = data.cast<double>();
    std::mt19937_64 rng(options.seed);

    // k-means++ seeding
    MatrixXdR centres(clusters, dim);
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);
    Eigen::VectorXd nearest(n);
    {
        std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
        Eigen::Index first = pick(rng);
        centres.row(0) = x.row(first);
        chosen[first] = true;
        nearest = (x.rowwise() - centres.row(0)).rowwise().squaredNorm();
    }
    for (int k = 1; k < clusters; ++k) {
        const double total = nearest.sum();
        Eigen::Index next = -1;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            const double target = u(rng);
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (nearest[i] <= 0.0) continue;
                acc += nearest[i];
                next = i;
                if (acc > target) break;
            }
        }
        if (next < 0)
            for (Eigen::Index i = 0; i < n; ++i)
                if (!chosen[i]) {
                    next = i;
                    break;
                }
        chosen[next] = true;
        centres.row(k) = x.row(next);
        nearest = nearest.cwiseMin((x.rowwise() - centres.row(k)).rowwise().squaredNorm());
    }

    KMeansResult result;
    std::vector<int>& assign = result.assignment;
    assign.assign(static_cast<std::size_t>(n), -1);
    std::vector<Eigen::Index> counts(clusters, 0);
    Eigen::VectorXf row_norms = data.rowwise().squaredNorm();

    for (int iter = 0; iter < std::max(options.max_iterations, 1); ++iter) {
        // Assignment: float GEMM proposes, exact distances decide a switch.
        const DescriptorMatrix cf = centres.cast<float>();
        const Eigen::VectorXf centre_norms = cf.rowwise().squaredNorm();
        Eigen::Index changed = 0;
        for (Eigen::Index start = 0; start < n; start += kBlockRows) {
            const Eigen::Index rows = std::min(kBlockRows, n - start);
            Eigen::MatrixXf dots = data.middleRows(start, rows) * cf.transpose();
            for (Eigen::Index r = 0; r < rows; ++r) {
                const Eigen::Index i = start + r;
                int best = 0;
                float best_d = std::numeric_limits<float>::infinity();
                for (int k = 0; k < clusters; ++k) {
                    const float d = row_norms[i] - 2.0f * dots(r, k) + centre_norms[k];
                    if (d < best_d) {
                        best_d = d;
                        best = k;
                    }
                }
                int& a = assign[i];
                if (a < 0) {
                    a = best;
                    ++changed;
                } else if (best != a && squared_distance(x, i, centres, best) < squared_distance(x, i, centres, a)) {
                    a = best;
                    ++changed;
                }
            }
        }

        std::fill(counts.begin(), counts.end(), 0);
        for (int a : assign) ++counts[a];
        for (int k = 0; k < clusters; ++k) {
            if (counts[k] > 0) continue;
            const int largest = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
            Eigen::Index far = -1;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (assign[i] != largest) continue;
                const double d = squared_distance(x, i, centres, largest);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            assign[far] = k;
            centres.row(k) = x.row(far);
            --counts[largest];
            ++counts[k];
            ++changed;
        }

        double objective = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) objective += squared_distance(x, i, centres, assign[i]);
        result.objective.push_back(objective);

        // Update
        centres.setZero();
        for (Eigen::Index i = 0; i < n; ++i) centres.row(assign[i]) += x.row(i);
        for (int k = 0; k < clusters; ++k) centres.row(k) /= static_cast<double>(counts[k]);

        result.iterations = iter + 1;
        if (iter > 0 && static_cast<double>(changed) < options.tolerance * static_cast<double>(n)) break;
    }

    result.codebook.entries = centres.cast<float>();
    result.codebook.training_samples = static_cast<std::uint64_t>(n);
    result.codebook.validate();
    return result;
}

}  // namespace bscp
