#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bscp/config.hpp"
#include "bscp/dataset.hpp"
#include "bscp/model_io.hpp"
#include "bscp/pipeline.hpp"

namespace bscp {

/// Model trained on a subset of shapes, with a hash of the exact descriptor
/// rows fed to k-means.
struct TrainedModel {
    ModelBundle bundle;
    std::uint64_t kmeans_input_hash = 0;
    std::vector<int> kmeans_shapes;  ///< indices into the training subset, ascending, distinct
};

/// Codebook on up to per_shape_cap parts (plus mirrors) of each training
/// shape, then the SVM on their BSCP vectors. Deterministic in `seed`.
TrainedModel train_model(std::span<const ShapeFeatures* const> features, std::span<const int> labels,
                         const std::vector<std::string>& classes, const ExperimentConfig& config,
                         std::uint64_t seed);

int classify(const ModelBundle& bundle, const ShapeFeatures& features);

std::uint64_t hash_rows(const DescriptorMatrix& rows);

struct Prediction {
    int run = 0;
    int shape = 0;
    int truth = 0;
    int predicted = 0;
};

struct EvaluationReport {
    Protocol protocol = Protocol::HalfSplit;
    std::vector<std::string> classes;
    std::vector<std::uint64_t> seeds;
    std::vector<double> accuracies;
    double mean = 0.0;
    double stddev = 0.0;                       ///< sample standard deviation, 0 for one run
    std::vector<std::vector<int>> confusion;   ///< [truth][predicted], summed over runs
    std::vector<Prediction> predictions;
    std::vector<std::uint64_t> kmeans_input_hashes;
    double extract_seconds = 0.0;
    std::vector<double> run_seconds;

    void aggregate();
};

/// Stratified split of each class: a seeded shuffle of the class members,
/// the first floor(n/2) of which train. Indices ascending.
struct Split {
    std::vector<int> train;
    std::vector<int> test;
};
Split half_split(std::span<const int> labels, int classes, std::uint64_t seed);

/// Throws ConfigError when a class has fewer than two shapes.
EvaluationReport run_half_split(const LabeledShapes& shapes, const ExperimentConfig& config);
EvaluationReport run_half_split(std::span<const ShapeFeatures> features, std::span<const int> labels,
                                const std::vector<std::string>& classes, const ExperimentConfig& config);

/// One codebook on all shapes; each shape classified by an SVM trained on
/// the others. Throws ConfigError for fewer than two shapes.
EvaluationReport run_leave_one_out(const LabeledShapes& shapes, const ExperimentConfig& config);
EvaluationReport run_leave_one_out(std::span<const ShapeFeatures> features, std::span<const int> labels,
                                   const std::vector<std::string>& classes, const ExperimentConfig& config);

/// Human-readable table followed by a `key = value` block.
std::string format_report(const EvaluationReport& report);

/// Reads back the `key = value` block of format_report.
EvaluationReport parse_report(std::string_view text);

struct SweepRow {
    double value = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
};

struct SweepTable {
    std::string parameter;
    std::vector<SweepRow> rows;
};

/// Half-split evaluation for each value of N_td, n_r or K. Features are
/// re-extracted only when the parameter changes the descriptor.
SweepTable sweep(const LabeledShapes& shapes, const ExperimentConfig& config, std::string_view parameter,
                 std::span<const double> values);

/// `# parameter mean std` header and one whitespace-separated row per value.
std::string format_sweep(const SweepTable& table);

}  // namespace bscp
