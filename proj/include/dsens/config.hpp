#pragma once

// Experiment configuration: a single JSON document describing datasets,
// split protocol, pool settings, the technique roster, and the analysis
// toggles. Every key has a default; an empty roster or malformed value fails
// validation up front rather than mid-sweep. Configs round-trip losslessly
// through to_json/from_json.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsens/csv_io.hpp"
#include "dsens/linear.hpp"
#include "dsens/split.hpp"
#include "dsens/synthetic.hpp"

namespace dsens {

inline constexpr const char* kConfigSchema = "dsens-config/1";
inline constexpr const char* kLibraryVersion = "1.0.0";

// A dataset to experiment on: either a CSV file or a synthetic generator.
struct DatasetSpec {
    std::string name;

    // CSV source (when `path` is nonempty).
    std::string path;
    std::string label_column = "label";

    // Synthetic source (when `path` is empty).
    SyntheticKind kind = SyntheticKind::Banana;
    std::size_t samples = 400;
    double noise = 0.2;
    std::uint64_t seed = 0;  // 0: derive from the master seed and the name

    bool is_synthetic() const { return path.empty(); }
};

struct TechniqueSpec {
    std::string name;               // rule id, e.g. "ola", "knora-u"
    std::string label;              // display name; defaults to `name`
    double mcb_threshold = 0.7;     // mcb
    double selection_margin = 0.0;  // apriori, aposteriori
    double n_frac = 0.5;            // des-knn, des-clustering
    double j_frac = 0.3;            // des-knn, des-clustering
    std::size_t clusters = 5;       // des-clustering

    const std::string& display() const { return label.empty() ? name : label; }
};

inline const std::vector<std::string>& known_techniques() {
    static const std::vector<std::string> names = {
        "ola",     "lca",     "mla",    "rank",   "mcb",     "apriori", "aposteriori",
        "knora-e", "knora-u", "knop",   "des-p",  "des-kl",  "des-knn", "des-clustering"};
    return names;
}

struct HardnessSettings {
    bool enabled = true;
    std::string reference = "train+dsel";  // or "dsel"
};

struct HybridSettings {
    bool enabled = true;
    std::string rule = "knora-u";
    double tau = 0.4;
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::uint64_t seed = 42;
    std::size_t k = 7;
    std::size_t pool_size = 100;
    PerceptronHyper perceptron;
    SplitSpec split;  // .25/.50/.25, 20 replications by default
    std::vector<DatasetSpec> datasets;
    std::vector<TechniqueSpec> roster;
    bool include_baselines = true;
    HardnessSettings hardness;
    HybridSettings hybrid;
    std::string output_dir = "out";
};

inline void validate_config(const ExperimentConfig& config) {
    if (config.k < 1) throw std::runtime_error("config: k must be at least 1");
    if (config.pool_size < 1) throw std::runtime_error("config: pool_size must be at least 1");
    if (config.roster.empty()) throw std::runtime_error("config: technique roster is empty");
    if (config.datasets.empty()) throw std::runtime_error("config: dataset list is empty");
    validate_split_spec(config.split);

    std::set<std::string> seen;
    for (const auto& ds : config.datasets) {
        if (ds.name.empty()) throw std::runtime_error("config: dataset with empty name");
        if (!seen.insert(ds.name).second) {
            throw std::runtime_error("config: duplicate dataset name '" + ds.name + "'");
        }
    }
    std::set<std::string> columns;
    for (const auto& tech : config.roster) {
        const auto& known = known_techniques();
        if (std::find(known.begin(), known.end(), tech.name) == known.end()) {
            throw std::runtime_error("config: unknown technique '" + tech.name + "'");
        }
        if (!columns.insert(tech.display()).second) {
            throw std::runtime_error("config: duplicate technique label '" + tech.display() +
                                     "'; set a distinct label");
        }
        if (tech.name == "des-knn" || tech.name == "des-clustering") {
            if (!(tech.n_frac > 0.0 && tech.n_frac <= 1.0) ||
                !(tech.j_frac > 0.0 && tech.j_frac <= 1.0)) {
                throw std::runtime_error("config: n_frac and j_frac must be in (0, 1]");
            }
            const double n_keep = std::ceil(tech.n_frac * static_cast<double>(config.pool_size));
            const double j_keep = std::ceil(tech.j_frac * static_cast<double>(config.pool_size));
            if (j_keep > n_keep) {
                throw std::runtime_error(
                    "config: j_frac keeps more members than n_frac for technique '" +
                    tech.display() + "'");
            }
        }
        if (tech.name == "mcb" && (tech.mcb_threshold < 0.0 || tech.mcb_threshold > 1.0)) {
            throw std::runtime_error("config: mcb threshold must be in [0, 1]");
        }
        if (tech.name == "des-clustering" && tech.clusters < 1) {
            throw std::runtime_error("config: des-clustering needs at least one cluster");
        }
    }
    if (config.hardness.reference != "train+dsel" && config.hardness.reference != "dsel") {
        throw std::runtime_error("config: hardness reference must be 'train+dsel' or 'dsel'");
    }
    if (config.hybrid.enabled) {
        const auto& known = known_techniques();
        if (std::find(known.begin(), known.end(), config.hybrid.rule) == known.end()) {
            throw std::runtime_error("config: unknown hybrid rule '" + config.hybrid.rule + "'");
        }
        if (config.hybrid.tau < 0.0) {
            throw std::runtime_error("config: hybrid tau must be nonnegative");
        }
    }
}

inline nlohmann::json config_to_json(const ExperimentConfig& config) {
    nlohmann::json j;
    j["schema"] = kConfigSchema;
    j["name"] = config.name;
    j["seed"] = config.seed;
    j["k"] = config.k;
    j["pool_size"] = config.pool_size;
    j["perceptron"] = {{"learning_rate", config.perceptron.learning_rate},
                       {"max_epochs", config.perceptron.max_epochs}};
    j["split"] = {{"train_fraction", config.split.train_fraction},
                  {"dsel_fraction", config.split.dsel_fraction},
                  {"test_fraction", config.split.test_fraction},
                  {"replications", config.split.replications}};
    j["datasets"] = nlohmann::json::array();
    for (const auto& ds : config.datasets) {
        nlohmann::json d;
        d["name"] = ds.name;
        if (ds.is_synthetic()) {
            d["synthetic"] = to_string(ds.kind);
            d["samples"] = ds.samples;
            d["noise"] = ds.noise;
            d["seed"] = ds.seed;
        } else {
            d["path"] = ds.path;
            d["label"] = ds.label_column;
        }
        j["datasets"].push_back(std::move(d));
    }
    j["roster"] = nlohmann::json::array();
    for (const auto& tech : config.roster) {
        nlohmann::json t;
        t["name"] = tech.name;
        if (!tech.label.empty()) t["label"] = tech.label;
        if (tech.name == "mcb") t["threshold"] = tech.mcb_threshold;
        if (tech.name == "apriori" || tech.name == "aposteriori") {
            t["selection_margin"] = tech.selection_margin;
        }
        if (tech.name == "des-knn" || tech.name == "des-clustering") {
            t["n_frac"] = tech.n_frac;
            t["j_frac"] = tech.j_frac;
        }
        if (tech.name == "des-clustering") t["clusters"] = tech.clusters;
        j["roster"].push_back(std::move(t));
    }
    j["include_baselines"] = config.include_baselines;
    j["hardness"] = {{"enabled", config.hardness.enabled},
                     {"reference", config.hardness.reference}};
    j["hybrid"] = {{"enabled", config.hybrid.enabled},
                   {"rule", config.hybrid.rule},
                   {"tau", config.hybrid.tau}};
    j["output_dir"] = config.output_dir;
    return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (j.value("schema", std::string{}) != kConfigSchema) {
        throw std::runtime_error("config: missing or unsupported schema field");
    }
    ExperimentConfig config;
    config.name = j.value("name", config.name);
    config.seed = j.value("seed", config.seed);
    config.k = j.value("k", config.k);
    config.pool_size = j.value("pool_size", config.pool_size);
    if (j.contains("perceptron")) {
        const auto& p = j.at("perceptron");
        config.perceptron.learning_rate = p.value("learning_rate", config.perceptron.learning_rate);
        config.perceptron.max_epochs = p.value("max_epochs", config.perceptron.max_epochs);
    }
    if (j.contains("split")) {
        const auto& s = j.at("split");
        config.split.train_fraction = s.value("train_fraction", config.split.train_fraction);
        config.split.dsel_fraction = s.value("dsel_fraction", config.split.dsel_fraction);
        config.split.test_fraction = s.value("test_fraction", config.split.test_fraction);
        config.split.replications = s.value("replications", config.split.replications);
    }
    for (const auto& d : j.value("datasets", nlohmann::json::array())) {
        DatasetSpec ds;
        ds.name = d.at("name").get<std::string>();
        if (d.contains("synthetic")) {
            ds.kind = synthetic_kind_from_name(d.at("synthetic").get<std::string>());
            ds.samples = d.value("samples", ds.samples);
            ds.noise = d.value("noise", ds.noise);
            ds.seed = d.value("seed", ds.seed);
        } else {
            ds.path = d.at("path").get<std::string>();
            ds.label_column = d.value("label", ds.label_column);
        }
        config.datasets.push_back(std::move(ds));
    }
    for (const auto& t : j.value("roster", nlohmann::json::array())) {
        TechniqueSpec tech;
        tech.name = t.at("name").get<std::string>();
        tech.label = t.value("label", tech.label);
        tech.mcb_threshold = t.value("threshold", tech.mcb_threshold);
        tech.selection_margin = t.value("selection_margin", tech.selection_margin);
        tech.n_frac = t.value("n_frac", tech.n_frac);
        tech.j_frac = t.value("j_frac", tech.j_frac);
        tech.clusters = t.value("clusters", tech.clusters);
        config.roster.push_back(std::move(tech));
    }
    config.include_baselines = j.value("include_baselines", config.include_baselines);
    if (j.contains("hardness")) {
        const auto& h = j.at("hardness");
        config.hardness.enabled = h.value("enabled", config.hardness.enabled);
        config.hardness.reference = h.value("reference", config.hardness.reference);
    }
    if (j.contains("hybrid")) {
        const auto& h = j.at("hybrid");
        config.hybrid.enabled = h.value("enabled", config.hybrid.enabled);
        config.hybrid.rule = h.value("rule", config.hybrid.rule);
        config.hybrid.tau = h.value("tau", config.hybrid.tau);
    }
    config.output_dir = j.value("output_dir", config.output_dir);
    return config;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config: '" + path + "' is not valid JSON: " + e.what());
    }
    ExperimentConfig config = config_from_json(j);
    validate_config(config);
    return config;
}

inline void save_config(const ExperimentConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("config: cannot write '" + path + "'");
    out << config_to_json(config).dump(2) << "\n";
}

// FNV-1a over the canonical serialized form; stamped into reports so results
// are traceable to the exact configuration that produced them.
inline std::string config_hash(const ExperimentConfig& config) {
    const std::string dump = config_to_json(config).dump();
    std::uint64_t hash = 1469598103934665603ULL;
    for (const unsigned char ch : dump) {
        hash ^= ch;
        hash *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

}  // namespace dsens
