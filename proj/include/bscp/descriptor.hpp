#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bscp/geometry.hpp"
#include "bscp/shape_io.hpp"
#include "bscp/skeleton.hpp"

namespace bscp {

struct DescriptorConfig {
    int critical_points = 10;   ///< T, DCE vertices kept
    int sample_points = 50;     ///< n_s, points sampled on each part
    int reference_points = 5;   ///< n_r, histogram centres per part
    int distance_bins = 5;      ///< N_d
    int orientation_bins = 12;  ///< N_o
    int thickness_bins = 5;     ///< N_td, odd

    int bins_per_reference() const { return distance_bins * orientation_bins * thickness_bins; }
    int dimension() const { return reference_points * bins_per_reference(); }
    void validate() const;
};

/// Bin edges of the distance x orientation x thickness-difference histogram.
///
/// Distances are normalized by the mean pairwise distance of the part's
/// samples and binned log-uniformly between 0.125 and 2.5; the innermost
/// bin also takes everything closer than 0.125 and samples beyond 2.5 are
/// dropped. Orientation is split into uniform sectors over [0, 2pi).
/// Thickness differences are log ratios, binned symmetrically around a
/// central "same thickness" bin of half-width 0.1; for five bins the edges
/// are {-inf, -0.5, -0.1, 0.1, 0.5, inf}.
struct BinGeometry {
    std::vector<double> distance_edges;   ///< N_d + 1 values, 0.125 ... 2.5
    int orientation_bins = 12;
    std::vector<double> thickness_edges;  ///< N_td + 1 values, -inf ... inf

    static BinGeometry from(const DescriptorConfig& config);

    int distance_count() const { return static_cast<int>(distance_edges.size()) - 1; }
    int thickness_count() const { return static_cast<int>(thickness_edges.size()) - 1; }
    int bins() const { return distance_count() * orientation_bins * thickness_count(); }

    /// -1 when the normalized distance is not positive or beyond the outer edge.
    int distance_bin(double normalized_distance) const;
    /// Angle in radians, any range; 2pi wraps to sector 0.
    int orientation_bin(double angle) const;
    int thickness_bin(double log_ratio) const;
    int flat_index(int distance, int orientation, int thickness) const {
        return (distance * orientation_bins + orientation) * thickness_count() + thickness;
    }

    std::uint64_t fingerprint() const;

    friend bool operator==(const BinGeometry&, const BinGeometry&) = default;
};

/// Contour indices of the DCE critical points, ascending.
struct CriticalPointSet {
    std::vector<int> indices;
    std::size_t size() const { return indices.size(); }
};

/// Relevance of vertex `v` between `prev` and `next`: turn angle times
/// l1*l2/(l1+l2), segment lengths divided by `perimeter`.
double dce_relevance(Point2 prev, Point2 v, Point2 next, double perimeter);

/// Discrete contour evolution: indices removed, in order, until `keep`
/// vertices remain. Lowest index wins ties.
std::vector<int> dce_removal_order(std::span<const Point2> polygon, int keep);

/// Throws ShapeError when T < 3 or the contour has fewer than T points.
CriticalPointSet dce_critical_points(const Contour& contour, int count);

struct PartSample {
    Point2 position;
    double thickness = 1.0;  ///< divided by the part mean
};

/// Contour fragment from critical point `first` to `second`, anticlockwise.
struct ContourPart {
    int first = 0;          ///< index into the critical point set
    int second = 0;
    int start_index = 0;    ///< contour index of the first critical point
    int end_index = 0;
    std::vector<PartSample> samples;  ///< equally spaced in arc length, endpoints included
    std::vector<int> reference_slots; ///< indices into samples
    Point2 median_position;           ///< arc-length midpoint
    double mean_distance = 0.0;       ///< mean pairwise distance between samples
};

/// Sample slots of the reference points, equally spaced and symmetric under
/// reversal, both endpoints included.
std::vector<int> reference_slots(int sample_points, int reference_points);

ContourPart make_part(const AssociatedContour& contour, int start_index, int end_index,
                      const DescriptorConfig& config);

/// All ordered pairs (i, j), i != j, of critical points: T(T-1) parts,
/// ordered by i then j.
std::vector<ContourPart> enumerate_parts(const AssociatedContour& contour, const CriticalPointSet& critical,
                                         const DescriptorConfig& config);

/// The part as it appears on the shape reflected about a vertical axis:
/// samples reflected about the median x and traversed in reverse.
ContourPart mirror_part(const ContourPart& part);

/// Counts over bins.flat_index() for reference point `reference` of the part.
std::vector<double> ssc_histogram(const ContourPart& part, int reference, const BinGeometry& bins);

/// Concatenated per-reference histograms, each block scaled to unit l2 norm
/// (empty blocks stay zero).
std::vector<float> part_descriptor(const ContourPart& part, const BinGeometry& bins);

}  // namespace bscp
