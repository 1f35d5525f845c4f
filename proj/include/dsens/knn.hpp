#pragma once

// Exact brute-force K nearest neighbors. This one implementation backs the
// regions of competence, the K-NN baseline, the hardness measure, and the
// hybrid router, so all of them see identical neighborhoods: Euclidean
// distance with ties broken toward the lower reference index, vote ties
// broken toward the lower class index.

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "dsens/dataset.hpp"

namespace dsens {

struct Neighbor {
    std::size_t index = 0;
    double distance = 0.0;
};

// K nearest rows of `reference` to `query`. `exclude_index` (if >= 0) removes
// one reference row from consideration, used when a set is profiled against
// itself.
inline std::vector<Neighbor> knn_search(std::span<const double> query, const Dataset& reference,
                                        std::size_t k, std::ptrdiff_t exclude_index = -1) {
    const std::size_t usable = reference.rows - (exclude_index >= 0 ? 1 : 0);
    if (k == 0 || k > usable) {
        throw std::runtime_error("knn_search: k must be in [1, " + std::to_string(usable) + "]");
    }
    std::vector<Neighbor> all;
    all.reserve(usable);
    for (std::size_t i = 0; i < reference.rows; ++i) {
        if (exclude_index >= 0 && i == static_cast<std::size_t>(exclude_index)) continue;
        all.push_back({i, squared_distance(query, reference.row(i))});
    }
    const auto closer = [](const Neighbor& a, const Neighbor& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.index < b.index;
    };
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k - 1), all.end(),
                     closer);
    all.resize(k);
    std::sort(all.begin(), all.end(), closer);
    for (auto& nb : all) nb.distance = std::sqrt(nb.distance);
    return all;
}

// Plurality vote over neighbor labels; ties go to the lowest class index.
inline int knn_vote(const std::vector<Neighbor>& neighbors, const std::vector<int>& labels,
                    int num_classes) {
    std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
    for (const auto& nb : neighbors) counts[static_cast<std::size_t>(labels[nb.index])]++;
    int best = 0;
    for (int c = 1; c < num_classes; ++c) {
        if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) best = c;
    }
    return best;
}

// Unweighted K-NN classifier over a fixed labeled reference set.
struct KnnClassifier {
    const Dataset* reference = nullptr;
    std::size_t k = 7;

    int classify(std::span<const double> query) const {
        const auto neighbors = knn_search(query, *reference, k);
        return knn_vote(neighbors, reference->labels, reference->class_count);
    }
};

}  // namespace dsens
