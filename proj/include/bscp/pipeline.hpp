#pragma once

#include <vector>

#include "bscp/codebook.hpp"
#include "bscp/config.hpp"
#include "bscp/dataset.hpp"
#include "bscp/descriptor.hpp"
#include "bscp/encoding.hpp"
#include "bscp/skeleton.hpp"

namespace bscp {

/// Every intermediate of the per-shape front end, for inspection.
struct ShapeAnalysis {
    NormalizedShape normalized;
    AssociatedContour contour;
    Skeleton skeleton;
    CriticalPointSet critical;
    std::vector<ContourPart> parts;
};

/// Hole filling, pose normalization, contour tracing, skeleton, thickness
/// association, DCE and part enumeration.
ShapeAnalysis analyze_shape(const BinaryMask& mask, const ExperimentConfig& config);

/// Descriptors of a shape's parts and their mirrors with the part positions
/// and the bounding box they are pooled over.
struct ShapeFeatures {
    PartDescriptorSet descriptors;
    std::vector<Point2> positions;
    BoundingBox box;
};

ShapeFeatures describe_shape(const ShapeAnalysis& analysis, const BinGeometry& bins);
ShapeFeatures extract_features(const BinaryMask& mask, const ExperimentConfig& config);

/// Features of every shape, computed in parallel. A failing shape aborts
/// with its name in the message.
std::vector<ShapeFeatures> extract_all(const LabeledShapes& shapes, const ExperimentConfig& config);

/// LLC codes of parts and mirrors, flip-merged and pooled over the pyramid.
BscpVector encode_shape(const ShapeFeatures& features, const Codebook& codebook, int llc_k);

std::vector<BscpVector> encode_all(std::span<const ShapeFeatures* const> features, const Codebook& codebook,
                                   int llc_k, int threads);

}  // namespace bscp
