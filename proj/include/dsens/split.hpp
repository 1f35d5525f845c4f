#pragma once

// Stratified train / selection / test splitting. Per-class allocation uses
// largest-remainder rounding steered by the running global deficit of each
// partition, so both the per-class counts (within +-1 of the exact share)
// and the total partition sizes come out right. Every class lands at least
// once in every partition.

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsens/dataset.hpp"
#include "dsens/rng.hpp"

namespace dsens {

struct SplitSpec {
    double train_fraction = 0.25;
    double dsel_fraction = 0.50;
    double test_fraction = 0.25;
    std::uint64_t seed = 0;
    int replications = 20;
};

inline void validate_split_spec(const SplitSpec& spec) {
    const double sum = spec.train_fraction + spec.dsel_fraction + spec.test_fraction;
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::runtime_error("split: fractions must sum to 1");
    }
    if (spec.train_fraction <= 0.0 || spec.dsel_fraction <= 0.0 || spec.test_fraction <= 0.0) {
        throw std::runtime_error("split: every fraction must be positive");
    }
    if (spec.replications < 1) throw std::runtime_error("split: replications must be >= 1");
}

struct SplitResult {
    Dataset train;
    Dataset dsel;
    Dataset test;
};

namespace detail {

// Rounds real shares to integers summing to `total`, favoring partitions
// with larger remainders and, on ties, larger outstanding global deficits.
inline std::array<std::size_t, 3> allocate_counts(std::size_t total,
                                                  const std::array<double, 3>& shares,
                                                  const std::array<double, 3>& deficits) {
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (int p = 0; p < 3; ++p) {
        counts[p] = static_cast<std::size_t>(shares[p]);
        remainders[p] = shares[p] - static_cast<double>(counts[p]);
        assigned += counts[p];
    }
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (remainders[a] != remainders[b]) return remainders[a] > remainders[b];
        if (deficits[a] != deficits[b]) return deficits[a] > deficits[b];
        return a < b;
    });
    for (std::size_t leftover = total - assigned, i = 0; i < leftover; ++i) {
        counts[order[i % 3]]++;
    }
    // Every partition must keep at least one instance of the class.
    for (int p = 0; p < 3; ++p) {
        while (counts[p] == 0) {
            const int donor = static_cast<int>(
                std::max_element(counts.begin(), counts.end()) - counts.begin());
            counts[donor]--;
            counts[p]++;
        }
    }
    return counts;
}

}  // namespace detail

// Splits a dataset into disjoint train/dsel/test partitions preserving class
// priors. Deterministic given (spec.seed, replication_index).
inline SplitResult stratified_split(const Dataset& ds, const SplitSpec& spec,
                                    int replication_index) {
    validate_split_spec(spec);
    const auto sizes = ds.class_sizes();
    for (int c = 0; c < ds.class_count; ++c) {
        if (sizes[static_cast<std::size_t>(c)] < 3) {
            throw std::runtime_error("split: class " + std::to_string(c) + " has only " +
                                     std::to_string(sizes[static_cast<std::size_t>(c)]) +
                                     " instances; need >= 3 to stratify");
        }
    }

    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(replication_index)));
    const std::array<double, 3> fractions = {spec.train_fraction, spec.dsel_fraction,
                                             spec.test_fraction};
    std::array<double, 3> allocated = {0.0, 0.0, 0.0};
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> dsel_idx;
    std::vector<std::size_t> test_idx;

    for (int c = 0; c < ds.class_count; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < ds.rows; ++i) {
            if (ds.labels[i] == c) members.push_back(i);
        }
        rng.shuffle(members);

        const auto n_c = static_cast<double>(members.size());
        std::array<double, 3> shares{};
        std::array<double, 3> deficits{};
        for (int p = 0; p < 3; ++p) {
            shares[p] = n_c * fractions[p];
            deficits[p] = static_cast<double>(ds.rows) * fractions[p] - allocated[p];
        }
        const auto counts = detail::allocate_counts(members.size(), shares, deficits);
        for (int p = 0; p < 3; ++p) allocated[p] += static_cast<double>(counts[p]);

        std::size_t cursor = 0;
        for (std::size_t i = 0; i < counts[0]; ++i) train_idx.push_back(members[cursor++]);
        for (std::size_t i = 0; i < counts[1]; ++i) dsel_idx.push_back(members[cursor++]);
        for (std::size_t i = 0; i < counts[2]; ++i) test_idx.push_back(members[cursor++]);
    }

    std::sort(train_idx.begin(), train_idx.end());
    std::sort(dsel_idx.begin(), dsel_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    SplitResult out;
    out.train = subset(ds, train_idx, ds.name + "/train");
    out.dsel = subset(ds, dsel_idx, ds.name + "/dsel");
    out.test = subset(ds, test_idx, ds.name + "/test");
    return out;
}

}  // namespace dsens
