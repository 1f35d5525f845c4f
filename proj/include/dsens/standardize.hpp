#pragma once

// Z-score standardization. Stats are fit on the training partition only and
// then applied verbatim to every other partition, so no information leaks
// from selection or test data into the scaling.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dsens/dataset.hpp"

namespace dsens {

struct StandardizationStats {
    std::vector<double> mean;
    std::vector<double> stddev;          // population stddev; 0 for constant features
    std::vector<bool> zero_variance;     // flagged features pass through as (x - mean)
};

inline StandardizationStats fit_standardizer(const Dataset& train) {
    if (train.rows == 0) throw std::runtime_error("fit_standardizer: empty dataset");
    StandardizationStats stats;
    stats.mean.assign(train.dim, 0.0);
    stats.stddev.assign(train.dim, 0.0);
    stats.zero_variance.assign(train.dim, false);

    for (std::size_t i = 0; i < train.rows; ++i) {
        for (std::size_t j = 0; j < train.dim; ++j) stats.mean[j] += train.at(i, j);
    }
    for (std::size_t j = 0; j < train.dim; ++j) stats.mean[j] /= static_cast<double>(train.rows);

    for (std::size_t i = 0; i < train.rows; ++i) {
        for (std::size_t j = 0; j < train.dim; ++j) {
            const double d = train.at(i, j) - stats.mean[j];
            stats.stddev[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < train.dim; ++j) {
        stats.stddev[j] = std::sqrt(stats.stddev[j] / static_cast<double>(train.rows));
        if (stats.stddev[j] == 0.0) stats.zero_variance[j] = true;
    }
    return stats;
}

inline Dataset apply_standardizer(const StandardizationStats& stats, const Dataset& ds) {
    if (stats.mean.size() != ds.dim) {
        throw std::runtime_error("apply_standardizer: dimensionality mismatch");
    }
    Dataset out = ds;
    for (std::size_t i = 0; i < ds.rows; ++i) {
        for (std::size_t j = 0; j < ds.dim; ++j) {
            const double scale = stats.zero_variance[j] ? 1.0 : stats.stddev[j];
            out.features[i * ds.dim + j] = (ds.at(i, j) - stats.mean[j]) / scale;
        }
    }
    return out;
}

}  // namespace dsens
