#pragma once

// Dataset: a dense feature matrix with integer class labels. Immutable by
// convention once built; everything downstream (splits, pools, neighborhoods)
// shares datasets by const reference.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsens {

struct Dataset {
    std::string name;
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<double> features;  // row-major, rows x dim
    std::vector<int> labels;       // dense class indices in [0, class_count)
    int class_count = 0;

    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * dim, dim};
    }

    double at(std::size_t i, std::size_t j) const { return features[i * dim + j]; }

    std::vector<std::size_t> class_sizes() const {
        std::vector<std::size_t> sizes(static_cast<std::size_t>(class_count), 0);
        for (int label : labels) sizes[static_cast<std::size_t>(label)]++;
        return sizes;
    }
};

// Checks the structural invariants: finite features, labels dense in
// [0, class_count) with every class present, and rows >= class_count.
inline void validate_dataset(const Dataset& ds) {
    if (ds.class_count < 2) {
        throw std::runtime_error("dataset '" + ds.name + "': needs at least 2 classes");
    }
    if (ds.rows < static_cast<std::size_t>(ds.class_count)) {
        throw std::runtime_error("dataset '" + ds.name + "': fewer rows than classes");
    }
    if (ds.features.size() != ds.rows * ds.dim || ds.labels.size() != ds.rows) {
        throw std::runtime_error("dataset '" + ds.name + "': shape mismatch");
    }
    for (double v : ds.features) {
        if (!std::isfinite(v)) {
            throw std::runtime_error("dataset '" + ds.name + "': non-finite feature value");
        }
    }
    std::vector<bool> seen(static_cast<std::size_t>(ds.class_count), false);
    for (int label : ds.labels) {
        if (label < 0 || label >= ds.class_count) {
            throw std::runtime_error("dataset '" + ds.name + "': label out of range");
        }
        seen[static_cast<std::size_t>(label)] = true;
    }
    for (int c = 0; c < ds.class_count; ++c) {
        if (!seen[static_cast<std::size_t>(c)]) {
            throw std::runtime_error("dataset '" + ds.name + "': class " + std::to_string(c) +
                                     " has no instances");
        }
    }
}

// Builds a dataset from a subset of rows of another. Labels and class_count
// carry over unchanged; the caller is responsible for every class remaining
// represented (stratified splitting guarantees it).
inline Dataset subset(const Dataset& ds, const std::vector<std::size_t>& row_indices,
                      const std::string& name) {
    Dataset out;
    out.name = name;
    out.rows = row_indices.size();
    out.dim = ds.dim;
    out.class_count = ds.class_count;
    out.features.reserve(out.rows * out.dim);
    out.labels.reserve(out.rows);
    for (std::size_t idx : row_indices) {
        const auto r = ds.row(idx);
        out.features.insert(out.features.end(), r.begin(), r.end());
        out.labels.push_back(ds.labels[idx]);
    }
    return out;
}

// Concatenates two datasets with identical schema (dim, class_count).
inline Dataset concatenate(const Dataset& a, const Dataset& b, const std::string& name) {
    if (a.dim != b.dim || a.class_count != b.class_count) {
        throw std::runtime_error("concatenate: incompatible datasets");
    }
    Dataset out;
    out.name = name;
    out.rows = a.rows + b.rows;
    out.dim = a.dim;
    out.class_count = a.class_count;
    out.features = a.features;
    out.features.insert(out.features.end(), b.features.begin(), b.features.end());
    out.labels = a.labels;
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    return out;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        sum += diff * diff;
    }
    return sum;
}

}  // namespace dsens
