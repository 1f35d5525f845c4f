#pragma once

// Regions of competence: the neighborhood of a query inside the dynamic
// selection set, either in feature space (standardized inputs) or in output
// profile space (concatenated one-hot pool predictions). Both flavors return
// neighbors ordered nearest-first with deterministic tie-breaks, so the rule
// implementations never have to think about ordering again.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "dsens/dataset.hpp"
#include "dsens/knn.hpp"
#include "dsens/pool.hpp"

namespace dsens {

struct RegionOfCompetence {
    // Parallel arrays, nearest first. `indices` point into the DSEL set.
    std::vector<std::size_t> indices;
    std::vector<double> distances;
    std::vector<int> labels;

    std::size_t size() const { return indices.size(); }
};

inline RegionOfCompetence knn_region(std::span<const double> query, const Dataset& dsel,
                                     std::size_t k) {
    if (k > dsel.rows) {
        throw std::runtime_error("knn_region: k exceeds the dynamic selection set size");
    }
    const auto neighbors = knn_search(query, dsel, k);
    RegionOfCompetence region;
    region.indices.reserve(k);
    region.distances.reserve(k);
    region.labels.reserve(k);
    for (const auto& nb : neighbors) {
        region.indices.push_back(nb.index);
        region.distances.push_back(nb.distance);
        region.labels.push_back(dsel.labels[nb.index]);
    }
    return region;
}

// Output profile: each pool member's hard prediction for one sample.
using OutputProfile = std::vector<int>;

inline OutputProfile output_profile(const ClassifierPool& pool, std::span<const double> x) {
    OutputProfile profile(pool.members.size());
    for (std::size_t i = 0; i < pool.members.size(); ++i) {
        profile[i] = pool.members[i].predict(x);
    }
    return profile;
}

// Profile for a DSEL sample straight out of the oracle matrix; identical to
// output_profile(pool, dsel.row(sample)) by construction.
inline OutputProfile oracle_profile(const OracleMatrix& oracle, std::size_t sample) {
    OutputProfile profile(oracle.pool_size);
    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        profile[i] = oracle.prediction(i, sample);
    }
    return profile;
}

// Fraction of positions on which two profiles agree, in [0, 1].
inline double profile_similarity(const OutputProfile& a, const OutputProfile& b) {
    if (a.size() != b.size()) {
        throw std::runtime_error("profile_similarity: profiles have different lengths");
    }
    if (a.empty()) {
        throw std::runtime_error("profile_similarity: profiles are empty");
    }
    std::size_t matches = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(a.size());
}

// Region of competence in output profile space. With one-hot concatenated
// embeddings the squared Euclidean distance between two profiles is exactly
// 2 * (number of disagreeing positions), so we rank by Hamming distance and
// report the Euclidean value.
inline RegionOfCompetence profile_region(const OutputProfile& query_profile,
                                         const OracleMatrix& oracle, const Dataset& dsel,
                                         std::size_t k) {
    if (k == 0 || k > oracle.samples) {
        throw std::runtime_error("profile_region: k must be in [1, " +
                                 std::to_string(oracle.samples) + "]");
    }
    if (query_profile.size() != oracle.pool_size) {
        throw std::runtime_error("profile_region: profile length does not match the pool");
    }
    std::vector<Neighbor> all;
    all.reserve(oracle.samples);
    for (std::size_t s = 0; s < oracle.samples; ++s) {
        std::size_t mismatches = 0;
        for (std::size_t i = 0; i < oracle.pool_size; ++i) {
            if (oracle.prediction(i, s) != query_profile[i]) ++mismatches;
        }
        all.push_back({s, 2.0 * static_cast<double>(mismatches)});
    }
    const auto closer = [](const Neighbor& a, const Neighbor& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.index < b.index;
    };
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k - 1), all.end(),
                     closer);
    all.resize(k);
    std::sort(all.begin(), all.end(), closer);

    RegionOfCompetence region;
    region.indices.reserve(k);
    region.distances.reserve(k);
    region.labels.reserve(k);
    for (const auto& nb : all) {
        region.indices.push_back(nb.index);
        region.distances.push_back(std::sqrt(nb.distance));
        region.labels.push_back(dsel.labels[nb.index]);
    }
    return region;
}

}  // namespace dsens
