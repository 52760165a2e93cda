#include "bscp/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "bscp/error.hpp"

namespace bscp {

double SparseVector::at(int i) const {
    const auto it = std::lower_bound(index.begin(), index.end(), i);
    return (it != index.end() && *it == i) ? value[static_cast<std::size_t>(it - index.begin())] : 0.0;
}

double SparseVector::sum() const {
    double s = 0.0;
    for (double v : value) s += v;
    return s;
}

double SparseVector::norm() const {
    double s = 0.0;
    for (double v : value) s += v * v;
    return std::sqrt(s);
}

std::vector<double> SparseVector::dense() const {
    std::vector<double> out(dimension, 0.0);
    for (std::size_t k = 0; k < index.size(); ++k) out[index[k]] = value[k];
    return out;
}

double SparseVector::dot(std::span<const float> dense) const {
    double s = 0.0;
    for (std::size_t k = 0; k < index.size(); ++k) s += value[k] * static_cast<double>(dense[index[k]]);
    return s;
}

double SparseVector::dot(std::span<const double> dense) const {
    double s = 0.0;
    for (std::size_t k = 0; k < index.size(); ++k) s += value[k] * dense[index[k]];
    return s;
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
    SparseVector out;
    out.dimension = static_cast<int>(dense.size());
    for (std::size_t i = 0; i < dense.size(); ++i)
        if (dense[i] != 0.0) {
            out.index.push_back(static_cast<int>(i));
            out.value.push_back(dense[i]);
        }
    return out;
}

SparseVector add(const SparseVector& a, const SparseVector& b) {
    if (a.dimension != b.dimension) throw NumericError("sparse vector dimensions differ");
    SparseVector out;
    out.dimension = a.dimension;
    std::size_t i = 0, j = 0;
    while (i < a.index.size() || j < b.index.size()) {
        if (j == b.index.size() || (i < a.index.size() && a.index[i] < b.index[j])) {
            out.index.push_back(a.index[i]);
            out.value.push_back(a.value[i++]);
        } else if (i == a.index.size() || b.index[j] < a.index[i]) {
            out.index.push_back(b.index[j]);
            out.value.push_back(b.value[j++]);
        } else {
            out.index.push_back(a.index[i]);
            out.value.push_back(a.value[i++] + b.value[j++]);
        }
    }
    return out;
}

double distance(const SparseVector& a, const SparseVector& b) {
    if (a.dimension != b.dimension) throw NumericError("sparse vector dimensions differ");
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.index.size() || j < b.index.size()) {
        double d;
        if (j == b.index.size() || (i < a.index.size() && a.index[i] < b.index[j])) {
            d = a.value[i++];
        } else if (i == a.index.size() || b.index[j] < a.index[i]) {
            d = b.value[j++];
        } else {
            d = a.value[i++] - b.value[j++];
        }
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace bscp
