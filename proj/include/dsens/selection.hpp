#pragma once

// Shared vocabulary for the dynamic selection rules: competence vectors,
// selection outcomes, argmax with deterministic tie-breaks, and the weighted
// vote used by every ensemble rule.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsens {

// Competence values are comparable within one rule only; `rule` names the
// producing rule so mixed-rule comparisons are detectable downstream.
struct CompetenceVector {
    std::string rule;
    std::vector<double> values;
};

struct SelectionOutcome {
    std::vector<std::size_t> selected_indices;  // nonempty, sorted ascending
    int predicted_label = 0;
    CompetenceVector competence;
    bool fallback_used = false;
};

// Index of the maximum value; ties go to the lowest index.
inline std::size_t argmax_index(const std::vector<double>& values) {
    if (values.empty()) throw std::runtime_error("argmax_index: empty input");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

struct VoteTally {
    std::vector<double> counts;  // length num_classes
    int winner = 0;
};

// Weighted plurality vote. Weight 1 per prediction when `weights` is empty;
// winner ties go to the lowest class index.
inline VoteTally majority_vote(const std::vector<int>& predictions,
                               const std::vector<double>& weights, int num_classes) {
    if (predictions.empty()) {
        throw std::runtime_error("majority_vote: no predictions to aggregate");
    }
    if (!weights.empty() && weights.size() != predictions.size()) {
        throw std::runtime_error("majority_vote: weights do not match predictions");
    }
    VoteTally tally;
    tally.counts.assign(static_cast<std::size_t>(num_classes), 0.0);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const int label = predictions[i];
        if (label < 0 || label >= num_classes) {
            throw std::runtime_error("majority_vote: prediction outside the label range");
        }
        tally.counts[static_cast<std::size_t>(label)] += weights.empty() ? 1.0 : weights[i];
    }
    tally.winner = 0;
    for (int c = 1; c < num_classes; ++c) {
        if (tally.counts[static_cast<std::size_t>(c)] >
            tally.counts[static_cast<std::size_t>(tally.winner)]) {
            tally.winner = c;
        }
    }
    return tally;
}

// Distance decay used wherever a rule weights neighbors by proximity.
// Bounded at 1 for d = 0, strictly decreasing, never singular.
inline double distance_weight(double distance) { return 1.0 / (1.0 + distance); }

}  // namespace dsens
