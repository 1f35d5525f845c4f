#pragma once

// Dynamic ensemble selection rules. Each rule picks a per-query subset of the
// pool and aggregates the members' query predictions by (weighted) plurality
// vote. Every rule guarantees a nonempty selection: paths that would come up
// empty fall back to an unweighted full-pool vote and say so via
// fallback_used. Ordering ties always resolve toward the lower pool index.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsens/kmeans.hpp"
#include "dsens/pool.hpp"
#include "dsens/region.hpp"
#include "dsens/selection.hpp"

namespace dsens {

namespace detail {

inline SelectionOutcome vote_outcome(std::string rule, std::vector<double> competence,
                                     std::vector<std::size_t> selected,
                                     const OutputProfile& query_profile,
                                     const std::vector<double>& weights, int num_classes,
                                     bool fallback) {
    std::vector<int> predictions;
    predictions.reserve(selected.size());
    for (const std::size_t i : selected) predictions.push_back(query_profile[i]);
    const VoteTally tally = majority_vote(predictions, weights, num_classes);
    SelectionOutcome outcome;
    outcome.selected_indices = std::move(selected);
    outcome.predicted_label = tally.winner;
    outcome.competence = {std::move(rule), std::move(competence)};
    outcome.fallback_used = fallback;
    return outcome;
}

inline std::vector<std::size_t> full_pool(std::size_t pool_size) {
    std::vector<std::size_t> all(pool_size);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
}

// Per-classifier count of correct predictions over the given samples.
inline std::vector<double> correct_counts(const OracleMatrix& oracle,
                                          const std::vector<std::size_t>& samples) {
    std::vector<double> counts(oracle.pool_size, 0.0);
    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        for (const std::size_t s : samples) {
            if (oracle.is_correct(i, s)) counts[i] += 1.0;
        }
    }
    return counts;
}

// Union-style counting shared by KNORA-U and KNOP: everyone correct at least
// once votes, weighted by how often they were correct.
inline SelectionOutcome knora_u_core(std::string rule, const RegionOfCompetence& region,
                                     const OracleMatrix& oracle,
                                     const OutputProfile& query_profile) {
    std::vector<double> competence = correct_counts(oracle, region.indices);
    std::vector<std::size_t> selected;
    std::vector<double> weights;
    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        if (competence[i] > 0.0) {
            selected.push_back(i);
            weights.push_back(competence[i]);
        }
    }
    bool fallback = false;
    if (selected.empty()) {
        selected = full_pool(oracle.pool_size);
        weights.clear();
        fallback = true;
    }
    return vote_outcome(std::move(rule), std::move(competence), std::move(selected),
                        query_profile, weights, oracle.num_classes, fallback);
}

// Accuracy-then-diversity selection shared by DES-KNN and DES-Clustering:
// keep the N locally most accurate members, then the J of those with the
// lowest mean pairwise double-fault (fraction of samples both members get
// wrong). Returns pool indices sorted ascending.
inline std::vector<std::size_t> accuracy_diversity_select(const OracleMatrix& oracle,
                                                          const std::vector<std::size_t>& samples,
                                                          const std::vector<double>& accuracy,
                                                          double n_frac, double j_frac) {
    const std::size_t pool = oracle.pool_size;
    const std::size_t n_keep =
        static_cast<std::size_t>(std::ceil(n_frac * static_cast<double>(pool)));
    const std::size_t j_keep =
        static_cast<std::size_t>(std::ceil(j_frac * static_cast<double>(pool)));
    if (n_keep == 0 || n_keep > pool || j_keep == 0) {
        throw std::runtime_error("ensemble selection: fractions must keep between 1 and pool_size members");
    }
    if (j_keep > n_keep) {
        throw std::runtime_error("ensemble selection: diversity subset exceeds accuracy subset");
    }

    std::vector<std::size_t> by_accuracy(pool);
    std::iota(by_accuracy.begin(), by_accuracy.end(), std::size_t{0});
    std::stable_sort(by_accuracy.begin(), by_accuracy.end(),
                     [&](std::size_t a, std::size_t b) {
                         if (accuracy[a] != accuracy[b]) return accuracy[a] > accuracy[b];
                         return a < b;
                     });
    std::vector<std::size_t> top(by_accuracy.begin(),
                                 by_accuracy.begin() + static_cast<std::ptrdiff_t>(n_keep));

    std::vector<double> mean_double_fault(n_keep, 0.0);
    if (n_keep > 1) {
        for (std::size_t a = 0; a < n_keep; ++a) {
            for (std::size_t b = a + 1; b < n_keep; ++b) {
                std::size_t both_wrong = 0;
                for (const std::size_t s : samples) {
                    if (!oracle.is_correct(top[a], s) && !oracle.is_correct(top[b], s)) {
                        ++both_wrong;
                    }
                }
                const double df =
                    static_cast<double>(both_wrong) / static_cast<double>(samples.size());
                mean_double_fault[a] += df;
                mean_double_fault[b] += df;
            }
        }
        for (double& v : mean_double_fault) v /= static_cast<double>(n_keep - 1);
    }

    std::vector<std::size_t> order(n_keep);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (mean_double_fault[a] != mean_double_fault[b]) {
            return mean_double_fault[a] < mean_double_fault[b];
        }
        return top[a] < top[b];
    });
    std::vector<std::size_t> selected;
    selected.reserve(j_keep);
    for (std::size_t r = 0; r < j_keep; ++r) selected.push_back(top[order[r]]);
    std::sort(selected.begin(), selected.end());
    return selected;
}

}  // namespace detail

// KNORA-Eliminate: require correctness on every neighbor; when nobody
// qualifies, drop the farthest neighbor and retry. Competence reports each
// member's correct count on the prefix at which the loop stopped (the full
// region when the loop exhausted it and the pool fallback fired).
inline SelectionOutcome knora_e_classify(const RegionOfCompetence& region,
                                         const OracleMatrix& oracle,
                                         const OutputProfile& query_profile) {
    std::vector<std::size_t> selected;
    std::size_t prefix = region.size();
    for (; prefix >= 1; --prefix) {
        for (std::size_t i = 0; i < oracle.pool_size; ++i) {
            bool all = true;
            for (std::size_t k = 0; k < prefix; ++k) {
                if (!oracle.is_correct(i, region.indices[k])) {
                    all = false;
                    break;
                }
            }
            if (all) selected.push_back(i);
        }
        if (!selected.empty()) break;
    }
    const bool fallback = selected.empty();
    const std::size_t scored = fallback ? region.size() : prefix;
    std::vector<double> competence(oracle.pool_size, 0.0);
    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        for (std::size_t k = 0; k < scored; ++k) {
            if (oracle.is_correct(i, region.indices[k])) competence[i] += 1.0;
        }
    }
    if (fallback) selected = detail::full_pool(oracle.pool_size);
    return detail::vote_outcome("knora-e", std::move(competence), std::move(selected),
                                query_profile, {}, oracle.num_classes, fallback);
}

inline SelectionOutcome knora_u_classify(const RegionOfCompetence& region,
                                         const OracleMatrix& oracle,
                                         const OutputProfile& query_profile) {
    return detail::knora_u_core("knora-u", region, oracle, query_profile);
}

// K nearest output profiles: the region lives in profile space instead of
// feature space, then union counting applies unchanged.
inline SelectionOutcome knop_classify(const OutputProfile& query_profile,
                                      const OracleMatrix& oracle, const Dataset& dsel,
                                      std::size_t k) {
    const RegionOfCompetence region = profile_region(query_profile, oracle, dsel, k);
    return detail::knora_u_core("knop", region, oracle, query_profile);
}

// DES performance: keep members whose local accuracy beats random guessing
// (strictly above 1/M).
inline SelectionOutcome des_p_classify(const RegionOfCompetence& region,
                                       const OracleMatrix& oracle,
                                       const OutputProfile& query_profile) {
    const double baseline = 1.0 / static_cast<double>(oracle.num_classes);
    std::vector<double> competence(oracle.pool_size, 0.0);
    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        std::size_t correct = 0;
        for (const std::size_t s : region.indices) {
            if (oracle.is_correct(i, s)) ++correct;
        }
        competence[i] =
            static_cast<double>(correct) / static_cast<double>(region.size()) - baseline;
        if (competence[i] > 0.0) selected.push_back(i);
    }
    bool fallback = false;
    if (selected.empty()) {
        selected = detail::full_pool(oracle.pool_size);
        fallback = true;
    }
    return detail::vote_outcome("des-p", std::move(competence), std::move(selected),
                                query_profile, {}, oracle.num_classes, fallback);
}

namespace detail {

// KL divergence of a clamped soft output against the uniform distribution.
inline double kl_to_uniform(std::span<const double> soft) {
    constexpr double eps = 1e-6;
    const double uniform = 1.0 / static_cast<double>(soft.size());
    double kl = 0.0;
    for (const double raw : soft) {
        const double p = std::min(std::max(raw, eps), 1.0 - eps);
        kl += p * std::log(p / uniform);
    }
    return kl;
}

}  // namespace detail

// DES Kullback-Leibler: per-neighbor source competence is the KL divergence
// of the member's soft output from uniform, signed by correctness and decayed
// by distance. Members with positive total competence vote.
inline SelectionOutcome des_kl_classify(const RegionOfCompetence& region,
                                        const OracleMatrix& oracle,
                                        const OutputProfile& query_profile) {
    std::vector<double> competence(oracle.pool_size, 0.0);
    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        double total = 0.0;
        for (std::size_t k = 0; k < region.size(); ++k) {
            const std::size_t s = region.indices[k];
            const double kl = detail::kl_to_uniform(oracle.soft_row(i, s));
            const double sign = oracle.is_correct(i, s) ? 1.0 : -1.0;
            total += kl * sign * distance_weight(region.distances[k]);
        }
        competence[i] = total;
        if (total > 0.0) selected.push_back(i);
    }
    bool fallback = false;
    if (selected.empty()) {
        selected = detail::full_pool(oracle.pool_size);
        fallback = true;
    }
    return detail::vote_outcome("des-kl", std::move(competence), std::move(selected),
                                query_profile, {}, oracle.num_classes, fallback);
}

// DES-KNN: accuracy ranking then double-fault diversity over the feature
// region. Competence reports the accuracy stage; the diversity cut shows up
// only in selected_indices.
inline SelectionOutcome des_knn_classify(const RegionOfCompetence& region,
                                         const OracleMatrix& oracle,
                                         const OutputProfile& query_profile, double n_frac = 0.5,
                                         double j_frac = 0.3) {
    std::vector<double> accuracy = detail::correct_counts(oracle, region.indices);
    for (double& v : accuracy) v /= static_cast<double>(region.size());
    std::vector<std::size_t> selected =
        detail::accuracy_diversity_select(oracle, region.indices, accuracy, n_frac, j_frac);
    return detail::vote_outcome("des-knn", std::move(accuracy), std::move(selected),
                                query_profile, {}, oracle.num_classes, false);
}

// DES-Clustering: the region is the query's nearest cluster of the dynamic
// selection set, so member ensembles are precomputed per cluster at fit time
// and classification is a lookup plus a vote.
struct DesClusteringModel {
    ClusterModel clusters;
    std::vector<std::vector<std::size_t>> ensembles;   // per cluster, pool indices
    std::vector<std::vector<double>> accuracies;       // per cluster, length pool_size
    int num_classes = 0;
};

inline DesClusteringModel des_clustering_fit(const Dataset& dsel, const OracleMatrix& oracle,
                                             std::size_t num_clusters, std::uint64_t seed,
                                             double n_frac = 0.5, double j_frac = 0.3) {
    DesClusteringModel model;
    model.clusters = kmeans_fit(dsel, num_clusters, seed);
    model.num_classes = oracle.num_classes;
    model.ensembles.reserve(num_clusters);
    model.accuracies.reserve(num_clusters);
    for (std::size_t c = 0; c < num_clusters; ++c) {
        const auto& members = model.clusters.members[c];
        std::vector<double> accuracy = detail::correct_counts(oracle, members);
        for (double& v : accuracy) v /= static_cast<double>(members.size());
        model.ensembles.push_back(
            detail::accuracy_diversity_select(oracle, members, accuracy, n_frac, j_frac));
        model.accuracies.push_back(std::move(accuracy));
    }
    return model;
}

inline SelectionOutcome des_clustering_classify(const DesClusteringModel& model,
                                                std::span<const double> query,
                                                const OutputProfile& query_profile) {
    const std::size_t cluster = nearest_cluster(model.clusters, query);
    return detail::vote_outcome("des-clustering", model.accuracies[cluster],
                                model.ensembles[cluster], query_profile, {}, model.num_classes,
                                false);
}

}  // namespace dsens
