#pragma once

// The replicated experiment: for every dataset and replication, split,
// standardize on the training statistics, bag-train a perceptron pool, build
// the oracle matrix over the dynamic selection set, and score every roster
// technique plus the nearest-neighbor baselines and the hardness-gated
// hybrid on the held-out test set. Seeds derive from the master seed and the
// dataset NAME (never its list position), and report rows are sorted by
// name, so reordering the dataset list cannot change a single reported
// number. Failures quarantine per dataset; the sweep continues.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dsens/config.hpp"
#include "dsens/csv_io.hpp"
#include "dsens/dataset.hpp"
#include "dsens/dcs.hpp"
#include "dsens/des.hpp"
#include "dsens/hardness.hpp"
#include "dsens/pool.hpp"
#include "dsens/region.hpp"
#include "dsens/report.hpp"
#include "dsens/rng.hpp"
#include "dsens/split.hpp"
#include "dsens/standardize.hpp"
#include "dsens/synthetic.hpp"

namespace dsens {

namespace detail {

inline constexpr std::uint64_t kSplitTag = 0x73706c6974ULL;   // "split"
inline constexpr std::uint64_t kPoolTag = 0x706f6f6cULL;      // "pool"
inline constexpr std::uint64_t kClusterTag = 0x636c757374ULL; // "clust"
inline constexpr std::uint64_t kSynthTag = 0x73796e7468ULL;   // "synth"

inline std::uint64_t hash_name(const std::string& name) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (const unsigned char ch : name) {
        hash ^= ch;
        hash *= 1099511628211ULL;
    }
    return hash;
}

}  // namespace detail

// Everything a rule needs to answer one query; built once per replication.
struct RuleContext {
    const OracleMatrix* oracle = nullptr;
    const Dataset* dsel = nullptr;  // standardized
    std::size_t k = 7;
    const DesClusteringModel* clustering = nullptr;  // des-clustering only
};

// One query through one configured technique. The feature-space region and
// the query's output profile are computed once by the caller and shared by
// every rule that wants them.
inline int apply_rule(const TechniqueSpec& tech, const RuleContext& ctx,
                      std::span<const double> query, const RegionOfCompetence& region,
                      const OutputProfile& profile) {
    const OracleMatrix& oracle = *ctx.oracle;
    if (tech.name == "ola") return ola_classify(region, oracle, profile).predicted_label;
    if (tech.name == "lca") return lca_classify(region, oracle, profile).predicted_label;
    if (tech.name == "mla") return mla_classify(region, oracle, profile).predicted_label;
    if (tech.name == "rank") return rank_classify(region, oracle, profile).predicted_label;
    if (tech.name == "mcb") {
        return mcb_classify(region, oracle, profile, tech.mcb_threshold).predicted_label;
    }
    if (tech.name == "apriori") {
        return apriori_classify(region, oracle, profile, tech.selection_margin).predicted_label;
    }
    if (tech.name == "aposteriori") {
        return aposteriori_classify(region, oracle, profile, tech.selection_margin)
            .predicted_label;
    }
    if (tech.name == "knora-e") return knora_e_classify(region, oracle, profile).predicted_label;
    if (tech.name == "knora-u") return knora_u_classify(region, oracle, profile).predicted_label;
    if (tech.name == "knop") {
        return knop_classify(profile, oracle, *ctx.dsel, ctx.k).predicted_label;
    }
    if (tech.name == "des-p") return des_p_classify(region, oracle, profile).predicted_label;
    if (tech.name == "des-kl") return des_kl_classify(region, oracle, profile).predicted_label;
    if (tech.name == "des-knn") {
        return des_knn_classify(region, oracle, profile, tech.n_frac, tech.j_frac)
            .predicted_label;
    }
    if (tech.name == "des-clustering") {
        return des_clustering_classify(*ctx.clustering, query, profile).predicted_label;
    }
    throw std::runtime_error("apply_rule: unknown technique '" + tech.name + "'");
}

// Optional observation points into a running experiment (e.g. persisting the
// trained pools). Callbacks may fire from worker threads, but never twice for
// the same (dataset, replication).
struct RunHooks {
    std::function<void(const std::string& dataset, std::size_t replication,
                       const ClassifierPool& pool)>
        on_pool;
};

namespace detail {

struct DatasetOutcome {
    std::string name;
    bool failed = false;
    std::string error;
    // accuracy[technique][replication], percent
    std::vector<std::vector<double>> accuracy;
    std::vector<std::size_t> hardness_totals;                // per level 0..k
    std::vector<std::vector<std::size_t>> hardness_correct;  // [technique][level]
    std::size_t hybrid_ds_routed = 0;
    std::size_t hybrid_queries = 0;
    std::vector<std::string> warnings;
};

inline Dataset load_dataset(const DatasetSpec& spec, const ExperimentConfig& config,
                            const std::string& base_dir, std::vector<std::string>& warnings) {
    if (spec.is_synthetic()) {
        const std::uint64_t seed =
            spec.seed != 0
                ? spec.seed
                : derive_seed(derive_seed(config.seed, hash_name(spec.name)), kSynthTag);
        Dataset ds = generate_synthetic(spec.kind, spec.samples, spec.noise, seed);
        ds.name = spec.name;
        return ds;
    }
    std::filesystem::path path(spec.path);
    if (path.is_relative() && !base_dir.empty()) {
        path = std::filesystem::path(base_dir) / path;
    }
    IngestOptions options;
    options.label_column = spec.label_column;
    IngestResult result = ingest_csv(path.string(), options);
    if (result.rejected_rows > 0) {
        warnings.push_back(spec.name + ": rejected " + std::to_string(result.rejected_rows) +
                           " rows with missing or non-finite features");
    }
    result.dataset.name = spec.name;
    return result.dataset;
}

// Column layout of the results table: roster first, then baselines, then the
// hybrid. Fixed once so every replication tallies into the same slots.
struct ColumnPlan {
    std::vector<std::string> names;
    std::size_t roster_count = 0;
    std::ptrdiff_t one_nn = -1;
    std::ptrdiff_t k_nn = -1;
    std::ptrdiff_t hybrid = -1;
};

inline ColumnPlan plan_columns(const ExperimentConfig& config) {
    ColumnPlan plan;
    for (const auto& tech : config.roster) plan.names.push_back(tech.display());
    plan.roster_count = config.roster.size();
    if (config.include_baselines) {
        plan.one_nn = static_cast<std::ptrdiff_t>(plan.names.size());
        plan.names.push_back("1-nn");
        plan.k_nn = static_cast<std::ptrdiff_t>(plan.names.size());
        plan.names.push_back("k-nn");
    }
    if (config.hybrid.enabled) {
        plan.hybrid = static_cast<std::ptrdiff_t>(plan.names.size());
        plan.names.push_back("hybrid");
    }
    return plan;
}

// The hybrid reuses the roster's parameters for its rule when present, so
// its dynamic selection side matches the corresponding table column.
inline TechniqueSpec hybrid_rule_spec(const ExperimentConfig& config) {
    for (const auto& tech : config.roster) {
        if (tech.name == config.hybrid.rule) return tech;
    }
    TechniqueSpec spec;
    spec.name = config.hybrid.rule;
    return spec;
}

inline void run_dataset(const ExperimentConfig& config, const DatasetSpec& spec,
                        const std::string& base_dir, const ColumnPlan& plan,
                        const RunHooks& hooks, DatasetOutcome& outcome) {
    outcome.name = spec.name;
    const Dataset ds = load_dataset(spec, config, base_dir, outcome.warnings);
    validate_dataset(ds);

    const std::uint64_t ds_seed = derive_seed(config.seed, hash_name(spec.name));
    SplitSpec split = config.split;
    split.seed = derive_seed(ds_seed, kSplitTag);

    const std::size_t columns = plan.names.size();
    outcome.accuracy.assign(columns, {});
    outcome.hardness_totals.assign(config.k + 1, 0);
    outcome.hardness_correct.assign(columns, std::vector<std::size_t>(config.k + 1, 0));

    const TechniqueSpec hybrid_spec = hybrid_rule_spec(config);

    const std::size_t replications = static_cast<std::size_t>(config.split.replications);
    for (std::size_t rep = 0; rep < replications; ++rep) {
        const SplitResult parts = stratified_split(ds, split, static_cast<int>(rep));
        const StandardizationStats stats = fit_standardizer(parts.train);
        const Dataset train = apply_standardizer(stats, parts.train);
        const Dataset dsel = apply_standardizer(stats, parts.dsel);
        const Dataset test = apply_standardizer(stats, parts.test);
        const Dataset merged = concatenate(train, dsel, ds.name + "/train+dsel");

        const ClassifierPool pool = bagging_generate(
            train, config.pool_size, config.perceptron, derive_seed(ds_seed, kPoolTag, rep));
        for (const auto& warning : pool.warnings) {
            outcome.warnings.push_back(spec.name + " rep " + std::to_string(rep) + ": " +
                                       warning);
        }
        if (hooks.on_pool) hooks.on_pool(spec.name, rep, pool);
        const OracleMatrix oracle = build_oracle_matrix(pool, dsel);

        RuleContext ctx;
        ctx.oracle = &oracle;
        ctx.dsel = &dsel;
        ctx.k = config.k;

        // Per-roster-entry clustering models (and one for the hybrid when its
        // rule is not in the roster).
        std::vector<std::unique_ptr<DesClusteringModel>> models(config.roster.size());
        for (std::size_t t = 0; t < config.roster.size(); ++t) {
            if (config.roster[t].name != "des-clustering") continue;
            models[t] = std::make_unique<DesClusteringModel>(des_clustering_fit(
                dsel, oracle, config.roster[t].clusters,
                derive_seed(ds_seed, kClusterTag, rep), config.roster[t].n_frac,
                config.roster[t].j_frac));
        }
        std::unique_ptr<DesClusteringModel> hybrid_model;
        if (config.hybrid.enabled && hybrid_spec.name == "des-clustering") {
            for (std::size_t t = 0; t < config.roster.size(); ++t) {
                if (config.roster[t].name == "des-clustering") {
                    hybrid_model = std::make_unique<DesClusteringModel>(*models[t]);
                    break;
                }
            }
            if (!hybrid_model) {
                hybrid_model = std::make_unique<DesClusteringModel>(des_clustering_fit(
                    dsel, oracle, hybrid_spec.clusters, derive_seed(ds_seed, kClusterTag, rep),
                    hybrid_spec.n_frac, hybrid_spec.j_frac));
            }
        }

        const Dataset& hardness_reference =
            config.hardness.reference == "dsel" ? dsel : merged;

        std::vector<std::size_t> correct(columns, 0);
        for (std::size_t q = 0; q < test.rows; ++q) {
            const auto query = test.row(q);
            const int truth = test.labels[q];
            const OutputProfile profile = output_profile(pool, query);
            const RegionOfCompetence region = knn_region(query, dsel, config.k);

            std::vector<int> predicted(columns, -1);
            for (std::size_t t = 0; t < config.roster.size(); ++t) {
                ctx.clustering = models[t].get();
                predicted[t] = apply_rule(config.roster[t], ctx, query, region, profile);
            }
            if (config.include_baselines) {
                const auto nn1 = knn_search(query, merged, 1);
                predicted[static_cast<std::size_t>(plan.one_nn)] =
                    merged.labels[nn1[0].index];
                const auto nnk = knn_search(query, merged, config.k);
                predicted[static_cast<std::size_t>(plan.k_nn)] =
                    knn_vote(nnk, merged.labels, merged.class_count);
            }
            if (config.hybrid.enabled) {
                ctx.clustering = hybrid_model.get();
                const HybridResult routed = hybrid_classify(
                    query, merged, config.k, config.hybrid.tau,
                    [&](std::span<const double> x) {
                        return apply_rule(hybrid_spec, ctx, x, region, profile);
                    });
                predicted[static_cast<std::size_t>(plan.hybrid)] = routed.label;
                if (routed.route == HybridRoute::DynamicSelection) outcome.hybrid_ds_routed++;
                outcome.hybrid_queries++;
            }

            std::size_t level = 0;
            if (config.hardness.enabled) {
                level = kdn_level(query, truth, hardness_reference, config.k);
                outcome.hardness_totals[level]++;
            }
            for (std::size_t c = 0; c < columns; ++c) {
                if (predicted[c] != truth) continue;
                correct[c]++;
                if (config.hardness.enabled) outcome.hardness_correct[c][level]++;
            }
        }
        for (std::size_t c = 0; c < columns; ++c) {
            outcome.accuracy[c].push_back(100.0 * static_cast<double>(correct[c]) /
                                          static_cast<double>(test.rows));
        }
    }
}

inline void mean_stddev(const std::vector<double>& values, double& mean, double& stddev) {
    mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (const double v : values) var += (v - mean) * (v - mean);
    stddev = std::sqrt(var / static_cast<double>(values.size()));
}

}  // namespace detail

// Run the full sweep. Relative dataset paths resolve against `base_dir` when
// given, otherwise the working directory.
inline ExperimentReport run_experiment(const ExperimentConfig& config,
                                       const std::string& base_dir = {},
                                       const RunHooks& hooks = {}) {
    validate_config(config);
    const detail::ColumnPlan plan = detail::plan_columns(config);

    std::vector<detail::DatasetOutcome> outcomes(config.datasets.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= config.datasets.size()) return;
            try {
                detail::run_dataset(config, config.datasets[i], base_dir, plan, hooks,
                                    outcomes[i]);
            } catch (const std::exception& e) {
                outcomes[i].name = config.datasets[i].name;
                outcomes[i].failed = true;
                outcomes[i].error = e.what();
            }
        }
    };
    std::size_t threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    threads = std::min(threads, config.datasets.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> workers;
        workers.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) workers.emplace_back(worker);
        for (auto& w : workers) w.join();
    }

    // Deterministic assembly: rows sorted by dataset name, independent of
    // completion order and of the order datasets appear in the config.
    std::vector<std::size_t> order(outcomes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return outcomes[a].name < outcomes[b].name;
    });

    ExperimentReport report;
    report.config_name = config.name;
    report.seed = config.seed;
    report.config_hash = config_hash(config);
    report.library_version = kLibraryVersion;
    report.k = config.k;
    report.pool_size = config.pool_size;
    report.replications = static_cast<std::size_t>(config.split.replications);
    report.table.techniques = plan.names;
    report.hardness.enabled = config.hardness.enabled;
    report.hardness.k = config.k;
    report.hardness.reference = config.hardness.reference;
    report.hybrid.enabled = config.hybrid.enabled;
    report.hybrid.rule = config.hybrid.rule;
    report.hybrid.tau = config.hybrid.tau;

    for (const std::size_t i : order) {
        const auto& outcome = outcomes[i];
        for (const auto& warning : outcome.warnings) report.warnings.push_back(warning);
        if (outcome.failed) {
            report.failures.push_back({outcome.name, outcome.error});
            continue;
        }
        report.table.datasets.push_back(outcome.name);
        for (std::size_t c = 0; c < plan.names.size(); ++c) {
            double mean = 0.0, stddev = 0.0;
            detail::mean_stddev(outcome.accuracy[c], mean, stddev);
            report.table.mean.push_back(mean);
            report.table.stddev.push_back(stddev);
        }
        if (config.hardness.enabled) {
            DatasetHardness hardness;
            hardness.dataset = outcome.name;
            hardness.totals = outcome.hardness_totals;
            for (std::size_t c = 0; c < plan.names.size(); ++c) {
                hardness.curves.push_back({plan.names[c], outcome.hardness_correct[c]});
            }
            report.hardness.per_dataset.push_back(std::move(hardness));
        }
        report.hybrid.ds_routed += outcome.hybrid_ds_routed;
        report.hybrid.total_queries += outcome.hybrid_queries;
    }

    if (!report.table.datasets.empty()) {
        report.average_ranks = friedman_ranks(report.table);
        if (config.include_baselines) {
            report.baseline = "k-nn";
            report.vs_baseline = win_tie_loss(report.table, "k-nn");
        }
    }
    return report;
}

}  // namespace dsens
