#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bscp/sparse.hpp"

namespace bscp {

using WeightMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kDefaultSvmAlpha = 10.0;

struct SvmOptions {
    double alpha = kDefaultSvmAlpha;
    std::uint64_t seed = 0;
    int epochs = 200;
};

/// Multi-class linear SVM, one weight row per class, no bias.
struct SvmModel {
    std::vector<std::string> class_labels;
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> weights;  ///< L x dim
    double alpha = kDefaultSvmAlpha;
    int epochs = 0;
    double final_objective = 0.0;
    std::vector<double> epoch_objective;  ///< objective of the averaged iterate after each epoch

    int classes() const { return static_cast<int>(weights.rows()); }
    int dimension() const { return static_cast<int>(weights.cols()); }
    std::vector<double> scores(const SparseVector& g) const;
};

/// sum_l ||w_l||^2 + alpha * sum_i max(0, 1 + max_{l != y_i} w_l.g_i - w_{y_i}.g_i)
double svm_objective(const WeightMatrix& w, std::span<const SparseVector> features, std::span<const int> labels,
                     double alpha);

/// A subgradient of svm_objective at w (the best wrong class is the lowest
/// index among ties).
WeightMatrix svm_subgradient(const WeightMatrix& w, std::span<const SparseVector> features,
                             std::span<const int> labels, double alpha);

/// Stochastic subgradient descent on svm_objective with step 1/(lambda t),
/// lambda = 2 / (alpha n), returning the average of all iterates. Examples
/// are visited in a seeded random order each epoch.
///
/// Throws NumericError when fewer than two classes are present, a label is
/// out of range, or feature dimensions differ.
SvmModel train_svm(std::span<const SparseVector> features, std::span<const int> labels,
                   std::vector<std::string> class_labels, const SvmOptions& options = {});

/// argmax_l w_l.g, lowest class index on ties.
int predict(const SvmModel& model, const SparseVector& g);

}  // namespace bscp
