#include "bscp/pipeline.hpp"

#include "bscp/error.hpp"
#include "parallel.hpp"

namespace bscp {

ShapeAnalysis analyze_shape(const BinaryMask& mask, const ExperimentConfig& config) {
    ShapeAnalysis a;
    a.normalized = normalize_pose(fill_holes(mask));
    const auto& m = a.normalized.mask;
    const auto contour = trace_contour(m, config.N_c);
    const auto field = distance_transform(m);
    a.skeleton = extract_skeleton(m, field, config.prune_ratio);
    a.contour = associate_thickness(contour, a.skeleton);
    a.critical = dce_critical_points(a.contour.contour, config.T);
    a.parts = enumerate_parts(a.contour, a.critical, config.descriptor());
    return a;
}

ShapeFeatures describe_shape(const ShapeAnalysis& analysis, const BinGeometry& bins) {
    const auto n = static_cast<Eigen::Index>(analysis.parts.size());
    const Eigen::Index dim = static_cast<Eigen::Index>(bins.bins()) *
                             static_cast<Eigen::Index>(analysis.parts.front().reference_slots.size());
    ShapeFeatures f;
    f.descriptors.parts.resize(n, dim);
    f.descriptors.mirrors.resize(n, dim);
    f.positions.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& part = analysis.parts[i];
        const auto d = part_descriptor(part, bins);
        const auto m = part_descriptor(mirror_part(part), bins);
        f.descriptors.parts.row(i) = Eigen::Map<const Eigen::RowVectorXf>(d.data(), dim);
        f.descriptors.mirrors.row(i) = Eigen::Map<const Eigen::RowVectorXf>(m.data(), dim);
        f.positions.push_back(part.median_position);
    }
    f.box = foreground_bounds(analysis.normalized.mask);
    return f;
}

ShapeFeatures extract_features(const BinaryMask& mask, const ExperimentConfig& config) {
    const auto bins = BinGeometry::from(config.descriptor());
    return describe_shape(analyze_shape(mask, config), bins);
}

std::vector<ShapeFeatures> extract_all(const LabeledShapes& shapes, const ExperimentConfig& config) {
    const auto bins = BinGeometry::from(config.descriptor());
    std::vector<ShapeFeatures> out(shapes.size());
    detail::parallel_for(shapes.size(), config.threads, [&](std::size_t i) {
        try {
            out[i] = describe_shape(analyze_shape(shapes.masks[i], config), bins);
        } catch (const Error& e) {
            throw ShapeError(shapes.names[i] + ": " + e.what());
        }
    });
    return out;
}

BscpVector encode_shape(const ShapeFeatures& features, const Codebook& codebook, int llc_k) {
    const auto parts = llc_encode_all(features.descriptors.parts, codebook, llc_k);
    const auto mirrors = llc_encode_all(features.descriptors.mirrors, codebook, llc_k);
    std::vector<ShapeCode> codes;
    codes.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i)
        codes.push_back(flip_merge({parts[i], features.positions[i]}, {mirrors[i], features.positions[i]}));
    return spm_pool(codes, features.box, codebook.size());
}

std::vector<BscpVector> encode_all(std::span<const ShapeFeatures* const> features, const Codebook& codebook,
                                   int llc_k, int threads) {
    std::vector<BscpVector> out(features.size());
    detail::parallel_for(features.size(), threads,
                         [&](std::size_t i) { out[i] = encode_shape(*features[i], codebook, llc_k); });
    return out;
}

}  // namespace bscp
