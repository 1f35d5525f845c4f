#pragma once

// Lloyd's k-means over dataset rows. Used to partition the dynamic selection
// set into regions whose member ensembles can be precomputed. Deterministic:
// initial centroids are drawn without replacement via the seeded generator,
// and an emptied cluster is reseeded from the point farthest from its
// centroid.

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dsens/dataset.hpp"
#include "dsens/rng.hpp"

namespace dsens {

struct ClusterModel {
    std::size_t k = 0;
    std::size_t dim = 0;
    std::vector<double> centroids;           // row-major, k x dim
    std::vector<std::size_t> assignments;    // per dataset row
    std::vector<std::vector<std::size_t>> members;  // rows per cluster
    std::size_t iterations = 0;

    std::span<const double> centroid(std::size_t c) const {
        return {centroids.data() + c * dim, dim};
    }
};

inline std::size_t nearest_cluster(const ClusterModel& model, std::span<const double> x) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < model.k; ++c) {
        const double d = squared_distance(x, model.centroid(c));
        if (d < best_dist) {
            best_dist = d;
            best = c;
        }
    }
    return best;
}

inline ClusterModel kmeans_fit(const Dataset& ds, std::size_t k, std::uint64_t seed,
                               std::size_t max_iterations = 300, double tolerance = 1e-6) {
    if (k == 0 || k > ds.rows) {
        throw std::runtime_error("kmeans_fit: k must be in [1, " + std::to_string(ds.rows) + "]");
    }
    ClusterModel model;
    model.k = k;
    model.dim = ds.dim;
    model.centroids.resize(k * ds.dim);
    model.assignments.assign(ds.rows, 0);

    // Initial centroids: k distinct rows chosen by shuffling the row index.
    Rng rng(derive_seed(seed, 0x6b6d65616e73ULL));  // "kmeans"
    std::vector<std::size_t> order(ds.rows);
    for (std::size_t i = 0; i < ds.rows; ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t c = 0; c < k; ++c) {
        const auto row = ds.row(order[c]);
        std::copy(row.begin(), row.end(), model.centroids.begin() + c * ds.dim);
    }

    std::vector<double> sums(k * ds.dim);
    std::vector<std::size_t> counts(k);
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        model.iterations = iter + 1;
        for (std::size_t r = 0; r < ds.rows; ++r) {
            model.assignments[r] = nearest_cluster(model, ds.row(r));
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), std::size_t{0});
        for (std::size_t r = 0; r < ds.rows; ++r) {
            const auto row = ds.row(r);
            const std::size_t c = model.assignments[r];
            counts[c]++;
            for (std::size_t j = 0; j < ds.dim; ++j) sums[c * ds.dim + j] += row[j];
        }
        // Reseed an emptied cluster from the globally worst-fit point so every
        // cluster stays populated.
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            std::size_t farthest = 0;
            double farthest_dist = -1.0;
            for (std::size_t r = 0; r < ds.rows; ++r) {
                const std::size_t owner = model.assignments[r];
                if (counts[owner] <= 1) continue;
                const double d = squared_distance(ds.row(r), model.centroid(owner));
                if (d > farthest_dist) {
                    farthest_dist = d;
                    farthest = r;
                }
            }
            const std::size_t old = model.assignments[farthest];
            const auto row = ds.row(farthest);
            for (std::size_t j = 0; j < ds.dim; ++j) {
                sums[old * ds.dim + j] -= row[j];
                sums[c * ds.dim + j] += row[j];
            }
            counts[old]--;
            counts[c]++;
            model.assignments[farthest] = c;
        }
        double movement = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < ds.dim; ++j) {
                const double next = sums[c * ds.dim + j] / static_cast<double>(counts[c]);
                const double delta = next - model.centroids[c * ds.dim + j];
                movement += delta * delta;
                model.centroids[c * ds.dim + j] = next;
            }
        }
        if (movement < tolerance) break;
    }

    for (std::size_t r = 0; r < ds.rows; ++r) {
        model.assignments[r] = nearest_cluster(model, ds.row(r));
    }
    // The final reassignment can empty a cluster when centroids coincide
    // (duplicate rows); repair the same way the loop does so every cluster
    // stays nonempty.
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    for (const std::size_t c : model.assignments) counts[c]++;
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] > 0) continue;
        std::size_t farthest = 0;
        double farthest_dist = -1.0;
        for (std::size_t r = 0; r < ds.rows; ++r) {
            const std::size_t owner = model.assignments[r];
            if (counts[owner] <= 1) continue;
            const double d = squared_distance(ds.row(r), model.centroid(owner));
            if (d > farthest_dist) {
                farthest_dist = d;
                farthest = r;
            }
        }
        counts[model.assignments[farthest]]--;
        counts[c]++;
        model.assignments[farthest] = c;
    }
    model.members.assign(k, {});
    for (std::size_t r = 0; r < ds.rows; ++r) {
        model.members[model.assignments[r]].push_back(r);
    }
    return model;
}

}  // namespace dsens
