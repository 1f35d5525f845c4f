#pragma once

// Linear base learner: one one-vs-rest perceptron row per class. Prediction
// is the argmax of the row activations with ties broken toward the lowest
// class index; soft outputs are the softmax of the activations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dsens/dataset.hpp"
#include "dsens/rng.hpp"

namespace dsens {

struct PerceptronHyper {
    double learning_rate = 1.0;
    int max_epochs = 100;
};

class LinearClassifier {
public:
    LinearClassifier() = default;
    LinearClassifier(int num_classes, std::size_t dim)
        : num_classes_(num_classes),
          dim_(dim),
          weights_(static_cast<std::size_t>(num_classes) * dim, 0.0),
          bias_(static_cast<std::size_t>(num_classes), 0.0) {}

    int num_classes() const { return num_classes_; }
    std::size_t dim() const { return dim_; }

    std::span<const double> weight_row(int cls) const {
        return {weights_.data() + static_cast<std::size_t>(cls) * dim_, dim_};
    }
    std::span<double> weight_row(int cls) {
        return {weights_.data() + static_cast<std::size_t>(cls) * dim_, dim_};
    }
    const std::vector<double>& bias() const { return bias_; }
    std::vector<double>& bias() { return bias_; }

    std::vector<double> activations(std::span<const double> x) const {
        std::vector<double> act(static_cast<std::size_t>(num_classes_));
        for (int m = 0; m < num_classes_; ++m) {
            const auto w = weight_row(m);
            double a = bias_[static_cast<std::size_t>(m)];
            for (std::size_t j = 0; j < dim_; ++j) a += w[j] * x[j];
            act[static_cast<std::size_t>(m)] = a;
        }
        return act;
    }

    int predict(std::span<const double> x) const {
        const auto act = activations(x);
        int best = 0;
        for (int m = 1; m < num_classes_; ++m) {
            if (act[static_cast<std::size_t>(m)] > act[static_cast<std::size_t>(best)]) best = m;
        }
        return best;
    }

    // Softmax of the activations, shifted by the max for stability.
    std::vector<double> soft_outputs(std::span<const double> x) const {
        auto act = activations(x);
        const double peak = *std::max_element(act.begin(), act.end());
        double sum = 0.0;
        for (double& a : act) {
            a = std::exp(a - peak);
            sum += a;
        }
        for (double& a : act) a /= sum;
        return act;
    }

    // Metadata carried for reproducibility and serialization.
    PerceptronHyper hyper;
    std::uint64_t seed = 0;

private:
    int num_classes_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> weights_;
    std::vector<double> bias_;
};

// Trains one-vs-rest perceptron rows with the classic mistake-driven update.
// Sample order is reshuffled every epoch from `seed`; training stops early
// once a full epoch makes no update. A single-class input yields a constant
// classifier for that class.
inline LinearClassifier train_perceptron(const Dataset& train, const PerceptronHyper& hyper,
                                         std::uint64_t seed) {
    if (train.rows == 0) throw std::runtime_error("train_perceptron: empty dataset");
    LinearClassifier clf(train.class_count, train.dim);
    clf.hyper = hyper;
    clf.seed = seed;

    bool single_class = true;
    for (std::size_t i = 1; i < train.rows; ++i) {
        if (train.labels[i] != train.labels[0]) {
            single_class = false;
            break;
        }
    }
    if (single_class) {
        clf.bias()[static_cast<std::size_t>(train.labels[0])] = 1.0;
        return clf;
    }

    std::vector<std::size_t> order(train.rows);
    for (std::size_t i = 0; i < train.rows; ++i) order[i] = i;
    Rng rng(derive_seed(seed, 0x70657263));

    for (int epoch = 0; epoch < hyper.max_epochs; ++epoch) {
        rng.shuffle(order);
        std::size_t mistakes = 0;
        for (std::size_t idx : order) {
            const auto x = train.row(idx);
            const int y = train.labels[idx];
            const auto act = clf.activations(x);
            for (int m = 0; m < train.class_count; ++m) {
                const double target = (m == y) ? 1.0 : -1.0;
                if (target * act[static_cast<std::size_t>(m)] <= 0.0) {
                    ++mistakes;
                    auto w = clf.weight_row(m);
                    const double step = hyper.learning_rate * target;
                    for (std::size_t j = 0; j < train.dim; ++j) w[j] += step * x[j];
                    clf.bias()[static_cast<std::size_t>(m)] += step;
                }
            }
        }
        if (mistakes == 0) break;
    }
    return clf;
}

}  // namespace dsens
