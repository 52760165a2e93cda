#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace bscp {

/// One descriptor per row.
using DescriptorMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Descriptors of a shape's contour parts and of their mirrors, row-aligned.
struct PartDescriptorSet {
    DescriptorMatrix parts;
    DescriptorMatrix mirrors;
};

struct Codebook {
    DescriptorMatrix entries;  ///< K x D
    std::uint64_t geometry_fingerprint = 0;
    std::uint64_t training_samples = 0;

    int size() const { return static_cast<int>(entries.rows()); }
    int dimension() const { return static_cast<int>(entries.cols()); }

    /// Throws NumericError on non-finite entries, exact duplicate entries, or
    /// fewer entries than `neighbours`.
    void validate(int neighbours = 1) const;
};

struct SampleId {
    int shape = 0;
    int part = 0;
    bool mirrored = false;

    friend bool operator==(SampleId, SampleId) = default;
};

struct DescriptorSample {
    DescriptorMatrix rows;
    std::vector<SampleId> ids;
};

inline constexpr int kDefaultPerShapeCap = 30;

/// Up to `per_shape_cap` parts drawn without replacement from every shape,
/// each followed by its mirror. Deterministic in `seed`.
/// Throws NumericError when nothing can be sampled.
DescriptorSample sample_training_descriptors(std::span<const PartDescriptorSet* const> shapes, int per_shape_cap,
                                             std::uint64_t seed);

struct KMeansOptions {
    std::uint64_t seed = 0;
    int max_iterations = 100;
    double tolerance = 1e-4;  ///< stop when fewer than this fraction of points change cluster
};

struct KMeansResult {
    Codebook codebook;
    std::vector<double> objective;  ///< sum of squared distances after each assignment step
    std::vector<int> assignment;
    int iterations = 0;
};

/// k-means++ seeding followed by Lloyd iterations. Empty clusters are
/// re-seeded with the point of the largest cluster farthest from its centre.
KMeansResult kmeans(const DescriptorMatrix& data, int clusters, const KMeansOptions& options = {});

/// Sum of squared distances from each row to its nearest centre.
double kmeans_objective(const DescriptorMatrix& data, const DescriptorMatrix& centres);

}  // namespace bscp
