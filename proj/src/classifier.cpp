#include "bscp/classifier.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "bscp/error.hpp"

namespace bscp {
namespace {

double row_dot(const WeightMatrix& w, int row, const SparseVector& g) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.index.size(); ++k) s += w(row, g.index[k]) * g.value[k];
    return s;
}

// Best wrong class and its hinge margin for one example.
struct Violation {
    int wrong = -1;
    double loss = 0.0;
};

Violation violation(std::span<const double> scores, int label) {
    Violation v;
    double best = -std::numeric_limits<double>::infinity();
    for (int l = 0; l < static_cast<int>(scores.size()); ++l) {
        if (l == label) continue;
        if (scores[l] > best) {
            best = scores[l];
            v.wrong = l;
        }
    }
    v.loss = std::max(0.0, 1.0 + best - scores[label]);
    return v;
}

void check_inputs(std::span<const SparseVector> features, std::span<const int> labels, int classes, int dimension) {
    if (features.size() != labels.size()) throw NumericError("feature and label counts differ");
    for (const auto& g : features)
        if (g.dimension != dimension) throw NumericError("feature dimension mismatch");
    for (int y : labels)
        if (y < 0 || y >= classes) throw NumericError("label out of range");
}

}  // namespace

std::vector<double> SvmModel::scores(const SparseVector& g) const {
    if (g.dimension != dimension()) throw NumericError("feature dimension does not match the model");
    std::vector<double> out(classes());
    for (int l = 0; l < classes(); ++l) {
        double s = 0.0;
        for (std::size_t k = 0; k < g.index.size(); ++k) s += static_cast<double>(weights(l, g.index[k])) * g.value[k];
        out[l] = s;
    }
    return out;
}

double svm_objective(const WeightMatrix& w, std::span<const SparseVector> features, std::span<const int> labels,
                     double alpha) {
    check_inputs(features, labels, static_cast<int>(w.rows()), static_cast<int>(w.cols()));
    double loss = 0.0;
    std::vector<double> scores(w.rows());
    for (std::size_t i = 0; i < features.size(); ++i) {
        for (int l = 0; l < w.rows(); ++l) scores[l] = row_dot(w, l, features[i]);
        loss += violation(scores, labels[i]).loss;
    }
    return w.squaredNorm() + alpha * loss;
}

WeightMatrix svm_subgradient(const WeightMatrix& w, std::span<const SparseVector> features,
                             std::span<const int> labels, double alpha) {
    check_inputs(features, labels, static_cast<int>(w.rows()), static_cast<int>(w.cols()));
    WeightMatrix grad = 2.0 * w;
    std::vector<double> scores(w.rows());
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& g = features[i];
        for (int l = 0; l < w.rows(); ++l) scores[l] = row_dot(w, l, g);
        const auto v = violation(scores, labels[i]);
        if (v.loss <= 0.0) continue;
        for (std::size_t k = 0; k < g.index.size(); ++k) {
            grad(v.wrong, g.index[k]) += alpha * g.value[k];
            grad(labels[i], g.index[k]) -= alpha * g.value[k];
        }
    }
    return grad;
}

SvmModel train_svm(std::span<const SparseVector> features, std::span<const int> labels,
                   std::vector<std::string> class_labels, const SvmOptions& options) {
    const int classes = static_cast<int>(class_labels.size());
    if (features.empty()) throw NumericError("no training examples");
    if (options.alpha <= 0.0 || options.epochs < 1) throw NumericError("alpha and epochs must be positive");
    const int dim = features.front().dimension;
    check_inputs(features, labels, classes, dim);
    std::vector<bool> present(classes, false);
    for (int y : labels) present[y] = true;
    if (classes < 2 || std::count(present.begin(), present.end(), true) < 2)
        throw NumericError("training needs at least two classes");

    const auto n = features.size();
    const double lambda = 2.0 / (options.alpha * static_cast<double>(n));

    // W_t = -S_t / (lambda t); the running average is -(H_t S_t - U_t) / (lambda t).
    WeightMatrix sum = WeightMatrix::Zero(classes, dim);
    WeightMatrix weighted = WeightMatrix::Zero(classes, dim);
    double harmonic = 0.0;  // H_{t-1}
    std::uint64_t t = 0;

    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> scores(classes);

    SvmModel model;
    model.class_labels = std::move(class_labels);
    model.alpha = options.alpha;
    model.epochs = options.epochs;
    WeightMatrix averaged;

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (const auto i : order) {
            ++t;
            const auto& g = features[i];
            const int y = labels[i];
            const double scale = t > 1 ? -1.0 / (lambda * static_cast<double>(t - 1)) : 0.0;
            for (int l = 0; l < classes; ++l) scores[l] = t > 1 ? scale * row_dot(sum, l, g) : 0.0;
            const auto v = violation(scores, y);
            if (v.loss > 0.0) {
                for (std::size_t k = 0; k < g.index.size(); ++k) {
                    const int c = g.index[k];
                    const double x = g.value[k];
                    sum(v.wrong, c) += x;
                    sum(y, c) -= x;
                    weighted(v.wrong, c) += harmonic * x;
                    weighted(y, c) -= harmonic * x;
                }
            }
            harmonic += 1.0 / static_cast<double>(t);
        }
        averaged = -(harmonic * sum - weighted) / (lambda * static_cast<double>(t));
        model.epoch_objective.push_back(svm_objective(averaged, features, labels, options.alpha));
    }

    model.weights = averaged.cast<float>();
    model.final_objective = model.epoch_objective.back();
    return model;
}

int predict(const SvmModel& model, const SparseVector& g) {
    const auto s = model.scores(g);
    return static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
}

}  // namespace bscp
