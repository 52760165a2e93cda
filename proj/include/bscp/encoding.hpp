#pragma once

#include <span>
#include <vector>

#include "bscp/codebook.hpp"
#include "bscp/geometry.hpp"
#include "bscp/sparse.hpp"

namespace bscp {

inline constexpr int kDefaultLlcNeighbours = 5;
/// Ridge added to the local Gram matrix, relative to its trace.
inline constexpr double kLlcRidge = 1e-4;

/// Indices of the `k` codebook entries nearest to each row of `descriptors`,
/// nearest first, lower index on ties.
std::vector<std::vector<int>> nearest_entries(const DescriptorMatrix& descriptors, const Codebook& codebook, int k);

/// Affine reconstruction weights of `f` over the given codebook entries
/// (coefficients sum to one), minimizing ||f - B c||^2 + ridge * ||c||^2
/// with ridge = kLlcRidge * trace of the centred Gram matrix. A descriptor
/// that coincides with one of the entries gets that entry alone.
/// Throws NumericError when the system cannot be solved.
SparseVector llc_solve(std::span<const float> f, const Codebook& codebook, std::span<const int> neighbours);

/// Locality-constrained linear code of every row over its k nearest entries.
std::vector<SparseVector> llc_encode_all(const DescriptorMatrix& descriptors, const Codebook& codebook, int k);

SparseVector llc_encode(std::span<const float> f, const Codebook& codebook, int k);

/// Code of one contour part together with its position in the normalized shape.
struct ShapeCode {
    SparseVector values;
    Point2 position;
};

/// Element-wise sum of a part's code and its mirror's; keeps the part's position.
ShapeCode flip_merge(const ShapeCode& part, const ShapeCode& mirror);

inline constexpr int kPyramidLevels = 3;
inline constexpr int kPyramidRegions = 21;  // 1 + 4 + 16

/// Index in [0, 21) of the region containing `position` at pyramid level
/// 0, 1 or 2. Cells are row-major within a level and levels are stacked in
/// order; a position on a grid line belongs to the right/bottom cell, and
/// positions outside the box are clamped onto it.
int pyramid_region(Point2 position, const BoundingBox& box, int level);

/// Max-pooled, l2-normalized code over the 21 pyramid regions; region r
/// occupies coordinates [r*K, (r+1)*K).
struct BscpVector {
    int codebook_size = 0;
    SparseVector values;

    int dimension() const { return values.dimension; }
    double at(int region, int entry) const { return values.at(region * codebook_size + entry); }
};

/// Throws NumericError for an empty code list or an all-zero result.
BscpVector spm_pool(std::span<const ShapeCode> codes, const BoundingBox& box, int codebook_size);

}  // namespace bscp
