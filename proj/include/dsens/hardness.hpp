#pragma once

// Instance hardness via the kDN measure: the fraction of a sample's K nearest
// reference neighbors that carry a different label. Levels are kept as
// integer disagreement counts (m of K) so binning is exact, never a
// floating-point straddle. Also hosts the hardness-gated hybrid classifier:
// easy queries go to plain K-NN, hard ones to a dynamic selection rule, with
// routing decided by a label-free hardness proxy so test labels never leak
// into routing.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsens/dataset.hpp"
#include "dsens/knn.hpp"

namespace dsens {

// Disagreement count m: how many of the K nearest reference neighbors have a
// label other than `true_label`. kDN = m / K. `exclude_index` removes the
// query's own row when it is profiled against a set containing itself.
inline std::size_t kdn_level(std::span<const double> query, int true_label,
                             const Dataset& reference, std::size_t k,
                             std::ptrdiff_t exclude_index = -1) {
    const auto neighbors = knn_search(query, reference, k, exclude_index);
    std::size_t disagree = 0;
    for (const auto& nb : neighbors) {
        if (reference.labels[nb.index] != true_label) ++disagree;
    }
    return disagree;
}

inline double kdn(std::span<const double> query, int true_label, const Dataset& reference,
                  std::size_t k, std::ptrdiff_t exclude_index = -1) {
    return static_cast<double>(kdn_level(query, true_label, reference, k, exclude_index)) /
           static_cast<double>(k);
}

struct HardnessProfile {
    std::size_t k = 0;
    std::string reference_name;
    std::vector<std::size_t> levels;  // per instance, disagreement count in [0, k]

    double value(std::size_t i) const {
        return static_cast<double>(levels[i]) / static_cast<double>(k);
    }
};

// Profile every row of `subject` against `reference`. When the two are the
// same dataset object, each row is excluded from its own neighborhood.
inline HardnessProfile hardness_profile(const Dataset& subject, const Dataset& reference,
                                        std::size_t k) {
    const bool self = &subject == &reference;
    HardnessProfile profile;
    profile.k = k;
    profile.reference_name = reference.name;
    profile.levels.reserve(subject.rows);
    for (std::size_t i = 0; i < subject.rows; ++i) {
        profile.levels.push_back(kdn_level(subject.row(i), subject.labels[i], reference, k,
                                           self ? static_cast<std::ptrdiff_t>(i) : -1));
    }
    return profile;
}

struct HardnessBins {
    std::size_t k = 0;
    std::vector<std::size_t> counts;    // length k+1, sums to the instance count
    std::vector<std::size_t> level_of;  // per instance
};

inline HardnessBins bin_by_hardness(const Dataset& test, const Dataset& reference,
                                    std::size_t k) {
    const HardnessProfile profile = hardness_profile(test, reference, k);
    HardnessBins bins;
    bins.k = k;
    bins.counts.assign(k + 1, 0);
    bins.level_of = profile.levels;
    for (const std::size_t level : bins.level_of) bins.counts[level]++;
    return bins;
}

struct BinAccuracy {
    std::size_t level = 0;  // kdn = level / k
    std::size_t total = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
};

// Per-bin accuracy of one technique's predictions. Empty bins are omitted
// rather than reported as zero.
inline std::vector<BinAccuracy> accuracy_per_bin(const std::vector<int>& predictions,
                                                 const std::vector<int>& labels,
                                                 const HardnessBins& bins) {
    if (predictions.size() != labels.size() || predictions.size() != bins.level_of.size()) {
        throw std::runtime_error("accuracy_per_bin: prediction/label/bin sizes disagree");
    }
    std::vector<std::size_t> correct(bins.k + 1, 0);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == labels[i]) correct[bins.level_of[i]]++;
    }
    std::vector<BinAccuracy> curve;
    for (std::size_t level = 0; level <= bins.k; ++level) {
        if (bins.counts[level] == 0) continue;
        curve.push_back({level, bins.counts[level], correct[level],
                         static_cast<double>(correct[level]) /
                             static_cast<double>(bins.counts[level])});
    }
    return curve;
}

// Label-free hardness used for routing: the fraction of the K nearest
// reference neighbors that disagree with the neighborhood's own plurality
// label. Unlike kDN it never consults the query's true label.
inline double routing_hardness(std::span<const double> query, const Dataset& reference,
                               std::size_t k) {
    const auto neighbors = knn_search(query, reference, k);
    const int majority = knn_vote(neighbors, reference.labels, reference.class_count);
    std::size_t disagree = 0;
    for (const auto& nb : neighbors) {
        if (reference.labels[nb.index] != majority) ++disagree;
    }
    return static_cast<double>(disagree) / static_cast<double>(k);
}

enum class HybridRoute { Knn, DynamicSelection };

struct HybridResult {
    int label = 0;
    HybridRoute route = HybridRoute::Knn;
    double hardness = 0.0;
};

// Route easy queries (routing hardness < tau) to K-NN over the reference set
// and the rest to the supplied dynamic selection route. tau = 0 sends
// everything to dynamic selection; tau > 1 sends everything to K-NN.
inline HybridResult hybrid_classify(std::span<const double> query, const Dataset& reference,
                                    std::size_t k, double tau,
                                    const std::function<int(std::span<const double>)>& ds_route) {
    const auto neighbors = knn_search(query, reference, k);
    const int majority = knn_vote(neighbors, reference.labels, reference.class_count);
    std::size_t disagree = 0;
    for (const auto& nb : neighbors) {
        if (reference.labels[nb.index] != majority) ++disagree;
    }
    HybridResult result;
    result.hardness = static_cast<double>(disagree) / static_cast<double>(k);
    if (result.hardness < tau) {
        result.route = HybridRoute::Knn;
        result.label = majority;
    } else {
        result.route = HybridRoute::DynamicSelection;
        result.label = ds_route(query);
    }
    return result;
}

}  // namespace dsens
