#pragma once

// Pool generation by bagging and the cached behavior of the pool on the
// dynamic selection set: hard predictions, correctness flags, and softmax
// outputs. Every selection rule reads from this cache instead of re-running
// the base learners.

#include <cstdint>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsens/dataset.hpp"
#include "dsens/linear.hpp"
#include "dsens/rng.hpp"

namespace dsens {

struct ClassifierPool {
    std::vector<LinearClassifier> members;
    std::vector<std::uint64_t> bag_seeds;
    std::vector<std::string> warnings;  // e.g. single-class bags accepted after retries
    std::uint64_t seed = 0;

    std::size_t size() const { return members.size(); }
};

namespace detail {

inline Dataset resample_with_replacement(const Dataset& train, Rng& rng) {
    std::vector<std::size_t> picks(train.rows);
    for (std::size_t i = 0; i < train.rows; ++i) {
        picks[i] = static_cast<std::size_t>(rng.next_below(train.rows));
    }
    return subset(train, picks, train.name + "/bag");
}

inline bool single_class(const Dataset& ds) {
    for (std::size_t i = 1; i < ds.rows; ++i) {
        if (ds.labels[i] != ds.labels[0]) return false;
    }
    return true;
}

}  // namespace detail

// Trains `pool_size` perceptrons on independent with-replacement resamples of
// the training set. A bag that collapses to a single class is redrawn up to
// 10 times, then accepted as a constant classifier with a warning.
inline ClassifierPool bagging_generate(const Dataset& train, std::size_t pool_size,
                                       const PerceptronHyper& hyper, std::uint64_t seed) {
    if (pool_size < 1) throw std::runtime_error("bagging_generate: pool_size must be >= 1");
    if (train.rows == 0) throw std::runtime_error("bagging_generate: empty training set");

    ClassifierPool pool;
    pool.seed = seed;
    pool.members.reserve(pool_size);
    pool.bag_seeds.reserve(pool_size);

    for (std::size_t i = 0; i < pool_size; ++i) {
        const std::uint64_t bag_seed = derive_seed(seed, i);
        Rng rng(bag_seed);
        Dataset bag = detail::resample_with_replacement(train, rng);
        int retries = 0;
        while (detail::single_class(bag) && retries < 10) {
            bag = detail::resample_with_replacement(train, rng);
            ++retries;
        }
        if (detail::single_class(bag)) {
            pool.warnings.push_back("bag " + std::to_string(i) +
                                    " single-class after 10 retries; constant member");
        }
        pool.members.push_back(train_perceptron(bag, hyper, derive_seed(bag_seed, 1)));
        pool.bag_seeds.push_back(bag_seed);
    }
    return pool;
}

// Cached pool behavior over a labeled reference set.
struct OracleMatrix {
    std::size_t pool_size = 0;
    std::size_t samples = 0;
    int num_classes = 0;
    std::vector<int> predictions;       // pool_size x samples
    std::vector<std::uint8_t> correct;  // pool_size x samples
    std::vector<double> soft;           // pool_size x samples x num_classes

    int prediction(std::size_t member, std::size_t sample) const {
        return predictions[member * samples + sample];
    }
    bool is_correct(std::size_t member, std::size_t sample) const {
        return correct[member * samples + sample] != 0;
    }
    std::span<const double> soft_row(std::size_t member, std::size_t sample) const {
        return {soft.data() + (member * samples + sample) * static_cast<std::size_t>(num_classes),
                static_cast<std::size_t>(num_classes)};
    }
};

inline OracleMatrix build_oracle_matrix(const ClassifierPool& pool, const Dataset& dsel) {
    OracleMatrix oracle;
    oracle.pool_size = pool.size();
    oracle.samples = dsel.rows;
    oracle.num_classes = dsel.class_count;
    oracle.predictions.resize(oracle.pool_size * oracle.samples);
    oracle.correct.resize(oracle.pool_size * oracle.samples);
    oracle.soft.resize(oracle.pool_size * oracle.samples *
                       static_cast<std::size_t>(oracle.num_classes));

    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        const auto& member = pool.members[i];
        for (std::size_t k = 0; k < dsel.rows; ++k) {
            const auto x = dsel.row(k);
            const auto soft = member.soft_outputs(x);
            const int best = member.predict(x);
            const std::size_t cell = i * oracle.samples + k;
            oracle.predictions[cell] = best;
            oracle.correct[cell] = best == dsel.labels[k] ? 1 : 0;
            std::copy(soft.begin(), soft.end(),
                      oracle.soft.begin() +
                          static_cast<std::ptrdiff_t>(cell * static_cast<std::size_t>(oracle.num_classes)));
        }
    }
    return oracle;
}

// --- pool serialization (JSON, schema "dsens-pool/1") ---------------------

inline nlohmann::json pool_to_json(const ClassifierPool& pool) {
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto& m = pool.members[i];
        nlohmann::json rows = nlohmann::json::array();
        for (int c = 0; c < m.num_classes(); ++c) {
            const auto w = m.weight_row(c);
            rows.push_back(std::vector<double>(w.begin(), w.end()));
        }
        members.push_back({{"weights", rows},
                           {"bias", m.bias()},
                           {"seed", m.seed},
                           {"learning_rate", m.hyper.learning_rate},
                           {"max_epochs", m.hyper.max_epochs},
                           {"bag_seed", pool.bag_seeds[i]}});
    }
    return {{"schema", "dsens-pool/1"},
            {"seed", pool.seed},
            {"warnings", pool.warnings},
            {"members", members}};
}

inline ClassifierPool pool_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "dsens-pool/1") {
        throw std::runtime_error("pool_from_json: unsupported schema");
    }
    ClassifierPool pool;
    pool.seed = j.at("seed").get<std::uint64_t>();
    pool.warnings = j.value("warnings", std::vector<std::string>{});
    for (const auto& mj : j.at("members")) {
        const auto rows = mj.at("weights");
        const int num_classes = static_cast<int>(rows.size());
        const std::size_t dim = rows.empty() ? 0 : rows[0].size();
        LinearClassifier m(num_classes, dim);
        for (int c = 0; c < num_classes; ++c) {
            const auto row = rows[static_cast<std::size_t>(c)].get<std::vector<double>>();
            std::copy(row.begin(), row.end(), m.weight_row(c).begin());
        }
        m.bias() = mj.at("bias").get<std::vector<double>>();
        m.seed = mj.at("seed").get<std::uint64_t>();
        m.hyper.learning_rate = mj.at("learning_rate").get<double>();
        m.hyper.max_epochs = mj.at("max_epochs").get<int>();
        pool.members.push_back(std::move(m));
        pool.bag_seeds.push_back(mj.at("bag_seed").get<std::uint64_t>());
    }
    return pool;
}

inline void save_pool(const ClassifierPool& pool, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_pool: cannot open '" + path + "'");
    out << pool_to_json(pool).dump(2) << "\n";
}

inline ClassifierPool load_pool(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_pool: cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;
    return pool_from_json(j);
}

}  // namespace dsens
