#pragma once

// Dynamic classifier selection rules. Each rule scores every pool member on
// the query's region of competence and selects exactly one classifier; the
// outcome's predicted label is that classifier's own prediction on the query
// (taken from `query_profile`), never a vote. Ties always go to the lowest
// pool index.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "dsens/pool.hpp"
#include "dsens/region.hpp"
#include "dsens/selection.hpp"

namespace dsens {

namespace detail {

inline SelectionOutcome pick_single(std::string rule, std::vector<double> competence,
                                    const OutputProfile& query_profile, bool fallback) {
    SelectionOutcome outcome;
    const std::size_t best = argmax_index(competence);
    outcome.selected_indices = {best};
    outcome.predicted_label = query_profile[best];
    outcome.competence = {std::move(rule), std::move(competence)};
    outcome.fallback_used = fallback;
    return outcome;
}

// Margin gate shared by the probabilistic rules: the winner must beat the
// runner-up by at least `margin`. A miss still selects the argmax (the rules
// never abstain) but reports fallback_used so callers can count it.
inline SelectionOutcome pick_with_margin(std::string rule, std::vector<double> competence,
                                         const OutputProfile& query_profile, double margin) {
    bool missed = false;
    if (margin > 0.0 && competence.size() > 1) {
        const std::size_t best = argmax_index(competence);
        double runner_up = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < competence.size(); ++i) {
            if (i != best && competence[i] > runner_up) runner_up = competence[i];
        }
        missed = (competence[best] - runner_up) < margin;
    }
    return pick_single(std::move(rule), std::move(competence), query_profile, missed);
}

}  // namespace detail

// Overall local accuracy: fraction of region samples the classifier gets
// right.
inline SelectionOutcome ola_classify(const RegionOfCompetence& region, const OracleMatrix& oracle,
                                     const OutputProfile& query_profile) {
    std::vector<double> competence(oracle.pool_size, 0.0);
    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        std::size_t correct = 0;
        for (const std::size_t s : region.indices) {
            if (oracle.is_correct(i, s)) ++correct;
        }
        competence[i] = static_cast<double>(correct) / static_cast<double>(region.size());
    }
    return detail::pick_single("ola", std::move(competence), query_profile, false);
}

// Local class accuracy: accuracy restricted to region samples whose true
// label equals the classifier's own prediction for the query; 0 when no such
// sample exists.
inline SelectionOutcome lca_classify(const RegionOfCompetence& region, const OracleMatrix& oracle,
                                     const OutputProfile& query_profile) {
    std::vector<double> competence(oracle.pool_size, 0.0);
    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        const int predicted = query_profile[i];
        std::size_t hits = 0, total = 0;
        for (std::size_t k = 0; k < region.size(); ++k) {
            if (region.labels[k] != predicted) continue;
            ++total;
            if (oracle.is_correct(i, region.indices[k])) ++hits;
        }
        competence[i] = total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
    }
    return detail::pick_single("lca", std::move(competence), query_profile, false);
}

// Modified local accuracy: LCA with each neighbor contributing
// distance_weight(d_k) instead of 1 to both numerator and denominator.
inline SelectionOutcome mla_classify(const RegionOfCompetence& region, const OracleMatrix& oracle,
                                     const OutputProfile& query_profile) {
    std::vector<double> competence(oracle.pool_size, 0.0);
    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        const int predicted = query_profile[i];
        double hits = 0.0, total = 0.0;
        for (std::size_t k = 0; k < region.size(); ++k) {
            if (region.labels[k] != predicted) continue;
            const double w = distance_weight(region.distances[k]);
            total += w;
            if (oracle.is_correct(i, region.indices[k])) hits += w;
        }
        competence[i] = total == 0.0 ? 0.0 : hits / total;
    }
    return detail::pick_single("mla", std::move(competence), query_profile, false);
}

// Classifier ranking: length of the correct prefix of the distance-ordered
// region. Sensitive to neighbor order by design.
inline SelectionOutcome rank_classify(const RegionOfCompetence& region, const OracleMatrix& oracle,
                                      const OutputProfile& query_profile) {
    std::vector<double> competence(oracle.pool_size, 0.0);
    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        std::size_t prefix = 0;
        for (const std::size_t s : region.indices) {
            if (!oracle.is_correct(i, s)) break;
            ++prefix;
        }
        competence[i] = static_cast<double>(prefix);
    }
    return detail::pick_single("rank", std::move(competence), query_profile, false);
}

// Multiple classifier behavior: restrict the region to neighbors whose output
// profiles resemble the query's (similarity >= threshold), then run OLA on
// what remains. An empty filtered set falls back to the whole region.
inline SelectionOutcome mcb_classify(const RegionOfCompetence& region, const OracleMatrix& oracle,
                                     const OutputProfile& query_profile, double threshold = 0.7) {
    std::vector<std::size_t> kept;
    kept.reserve(region.size());
    for (const std::size_t s : region.indices) {
        std::size_t matches = 0;
        for (std::size_t i = 0; i < oracle.pool_size; ++i) {
            if (oracle.prediction(i, s) == query_profile[i]) ++matches;
        }
        const double similarity =
            static_cast<double>(matches) / static_cast<double>(oracle.pool_size);
        if (similarity >= threshold) kept.push_back(s);
    }
    bool fallback = false;
    if (kept.empty()) {
        kept = region.indices;
        fallback = true;
    }
    std::vector<double> competence(oracle.pool_size, 0.0);
    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        std::size_t correct = 0;
        for (const std::size_t s : kept) {
            if (oracle.is_correct(i, s)) ++correct;
        }
        competence[i] = static_cast<double>(correct) / static_cast<double>(kept.size());
    }
    return detail::pick_single("mcb", std::move(competence), query_profile, fallback);
}

// A priori: expected probability of correctness over the region, each
// neighbor weighted by distance_weight and the classifier's soft output for
// the neighbor's true label.
inline SelectionOutcome apriori_classify(const RegionOfCompetence& region,
                                         const OracleMatrix& oracle,
                                         const OutputProfile& query_profile,
                                         double selection_margin = 0.0) {
    std::vector<double> competence(oracle.pool_size, 0.0);
    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        double weighted = 0.0, total = 0.0;
        for (std::size_t k = 0; k < region.size(); ++k) {
            const double w = distance_weight(region.distances[k]);
            const auto soft = oracle.soft_row(i, region.indices[k]);
            weighted += soft[static_cast<std::size_t>(region.labels[k])] * w;
            total += w;
        }
        competence[i] = weighted / total;
    }
    return detail::pick_with_margin("apriori", std::move(competence), query_profile,
                                    selection_margin);
}

// A posteriori: probability mass the classifier places on its own predicted
// class over same-class neighbors, relative to the mass it places on that
// class over the whole region; 0 when the denominator vanishes.
inline SelectionOutcome aposteriori_classify(const RegionOfCompetence& region,
                                             const OracleMatrix& oracle,
                                             const OutputProfile& query_profile,
                                             double selection_margin = 0.0) {
    std::vector<double> competence(oracle.pool_size, 0.0);
    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        const int predicted = query_profile[i];
        double matching = 0.0, total = 0.0;
        for (std::size_t k = 0; k < region.size(); ++k) {
            const double w = distance_weight(region.distances[k]);
            const auto soft = oracle.soft_row(i, region.indices[k]);
            const double mass = soft[static_cast<std::size_t>(predicted)] * w;
            total += mass;
            if (region.labels[k] == predicted) matching += mass;
        }
        competence[i] = total == 0.0 ? 0.0 : matching / total;
    }
    return detail::pick_with_margin("aposteriori", std::move(competence), query_profile,
                                    selection_margin);
}

}  // namespace dsens
