#pragma once

#include <span>
#include <vector>

namespace bscp {

/// Sparse vector with strictly increasing indices.
struct SparseVector {
    int dimension = 0;
    std::vector<int> index;
    std::vector<double> value;

    std::size_t nonzeros() const { return index.size(); }
    double at(int i) const;
    double sum() const;
    double norm() const;
    std::vector<double> dense() const;
    double dot(std::span<const float> dense) const;
    double dot(std::span<const double> dense) const;

    static SparseVector from_dense(std::span<const double> dense);

    friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Element-wise a + b; dimensions must agree.
SparseVector add(const SparseVector& a, const SparseVector& b);

/// Euclidean distance between two sparse vectors of equal dimension.
double distance(const SparseVector& a, const SparseVector& b);

}  // namespace bscp
