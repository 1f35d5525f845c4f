#pragma once

// Cross-dataset comparison machinery: the accuracy table, Friedman average
// ranks, the sign test critical value, and win/tie/loss tallies. Accuracy
// comparisons happen at two-decimal precision (the precision results tables
// are reported at) so ties are reproducible rather than floating-point
// coincidences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsens {

// Mean accuracy (percent) per dataset x technique, with the standard
// deviation across replications alongside.
struct ResultsTable {
    std::vector<std::string> datasets;    // row names
    std::vector<std::string> techniques;  // column names
    std::vector<double> mean;             // row-major, percent
    std::vector<double> stddev;           // row-major, percent

    std::size_t rows() const { return datasets.size(); }
    std::size_t cols() const { return techniques.size(); }
    double mean_at(std::size_t r, std::size_t c) const { return mean[r * cols() + c]; }
    double stddev_at(std::size_t r, std::size_t c) const { return stddev[r * cols() + c]; }

    std::size_t technique_index(const std::string& name) const {
        for (std::size_t c = 0; c < techniques.size(); ++c) {
            if (techniques[c] == name) return c;
        }
        throw std::runtime_error("results table: unknown technique '" + name + "'");
    }
};

inline double round2(double value) { return std::round(value * 100.0) / 100.0; }

// Per-technique average rank across datasets: best accuracy gets rank 1,
// an n-way tie gets the mean of the tied positions. Lower is better.
inline std::vector<double> friedman_ranks(const ResultsTable& table) {
    if (table.rows() == 0 || table.cols() == 0) {
        throw std::runtime_error("friedman_ranks: empty results table");
    }
    const std::size_t t = table.cols();
    std::vector<double> sums(t, 0.0);
    std::vector<std::size_t> order(t);
    for (std::size_t r = 0; r < table.rows(); ++r) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::vector<double> acc(t);
        for (std::size_t c = 0; c < t; ++c) acc[c] = round2(table.mean_at(r, c));
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (acc[a] != acc[b]) return acc[a] > acc[b];
            return a < b;
        });
        std::size_t pos = 0;
        while (pos < t) {
            std::size_t end = pos + 1;
            while (end < t && acc[order[end]] == acc[order[pos]]) ++end;
            // Positions pos..end-1 are tied; each gets the mean 1-based rank.
            const double rank = static_cast<double>(pos + end + 1) / 2.0;
            for (std::size_t i = pos; i < end; ++i) sums[order[i]] += rank;
            pos = end;
        }
    }
    for (double& s : sums) s /= static_cast<double>(table.rows());
    return sums;
}

// Minimum win count over n_exp pairwise comparisons needed to reject the
// hypothesis that two techniques perform equivalently:
// ceil(n_exp/2 + z_alpha * sqrt(n_exp)/2). Only the three tabulated
// significance levels are supported.
inline std::size_t sign_test_critical(std::size_t n_exp, double alpha) {
    if (n_exp == 0) throw std::runtime_error("sign_test_critical: need at least one comparison");
    double z = 0.0;
    if (alpha == 0.10) {
        z = 1.282;
    } else if (alpha == 0.05) {
        z = 1.645;
    } else if (alpha == 0.01) {
        z = 2.326;
    } else {
        throw std::runtime_error("sign_test_critical: alpha must be 0.10, 0.05, or 0.01");
    }
    const double n = static_cast<double>(n_exp);
    return static_cast<std::size_t>(std::ceil(n / 2.0 + z * std::sqrt(n) / 2.0));
}

struct WinTieLoss {
    std::string technique;
    std::string baseline;
    std::size_t wins = 0;
    std::size_t ties = 0;
    std::size_t losses = 0;
};

// Strict wins only: a tie at two-decimal precision is a tie, not half a win.
inline std::vector<WinTieLoss> win_tie_loss(const ResultsTable& table,
                                            const std::string& baseline) {
    const std::size_t base = table.technique_index(baseline);
    std::vector<WinTieLoss> rows;
    rows.reserve(table.cols());
    for (std::size_t c = 0; c < table.cols(); ++c) {
        WinTieLoss row;
        row.technique = table.techniques[c];
        row.baseline = baseline;
        for (std::size_t r = 0; r < table.rows(); ++r) {
            const double a = round2(table.mean_at(r, c));
            const double b = round2(table.mean_at(r, base));
            if (a > b) {
                row.wins++;
            } else if (a < b) {
                row.losses++;
            } else {
                row.ties++;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace dsens
