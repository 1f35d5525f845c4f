// Command-line front end: `run` executes a configured experiment sweep,
// `hardness` profiles a CSV dataset's instance hardness, `compare` runs the
// sign test between two reports, `generate` writes a synthetic dataset.
// Success exits 0; any failure prints a one-line JSON error record to stderr
// and exits nonzero.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsens/dsens.hpp"

namespace {

int do_run(const std::string& config_path, const std::string& output_dir_flag,
           bool save_pools) {
    dsens::ExperimentConfig config = dsens::load_config(config_path);
    const std::string base_dir =
        std::filesystem::path(config_path).parent_path().string();

    std::string out_dir = config.output_dir;
    if (const char* env = std::getenv("DSENS_OUTPUT_DIR"); env != nullptr && *env != '\0') {
        out_dir = env;
    }
    if (!output_dir_flag.empty()) out_dir = output_dir_flag;

    dsens::RunHooks hooks;
    if (save_pools) {
        const std::string pool_dir = (std::filesystem::path(out_dir) / "pools").string();
        std::filesystem::create_directories(pool_dir);
        hooks.on_pool = [pool_dir](const std::string& dataset, std::size_t rep,
                                   const dsens::ClassifierPool& pool) {
            const std::string path = (std::filesystem::path(pool_dir) /
                                      (dataset + "-rep" + std::to_string(rep) + ".json"))
                                         .string();
            dsens::save_pool(pool, path);
        };
    }

    const dsens::ExperimentReport report = dsens::run_experiment(config, base_dir, hooks);
    std::vector<std::string> written;
    for (const char* format : {"json", "csv", "markdown"}) {
        for (auto& path : dsens::report_render(report, format, out_dir)) {
            written.push_back(std::move(path));
        }
    }
    for (const auto& path : written) std::cout << "wrote " << path << "\n";
    for (const auto& failure : report.failures) {
        std::cout << "quarantined " << failure.dataset << ": " << failure.error << "\n";
    }
    std::cout << report.table.datasets.size() << " datasets, "
              << report.table.techniques.size() << " techniques, "
              << report.replications << " replications\n";
    return 0;
}

int do_hardness(const std::string& input, const std::string& label, std::size_t k,
                const std::string& output) {
    dsens::IngestOptions options;
    options.label_column = label;
    const dsens::IngestResult ingest = dsens::ingest_csv(input, options);
    const dsens::Dataset& ds = ingest.dataset;
    const dsens::HardnessProfile profile = dsens::hardness_profile(ds, ds, k);

    std::vector<std::size_t> counts(k + 1, 0);
    for (const std::size_t level : profile.levels) counts[level]++;

    if (!output.empty()) {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw std::runtime_error("hardness: cannot write '" + output + "'");
        out << "index,level,kdn\n";
        char buf[64];
        for (std::size_t i = 0; i < profile.levels.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%zu,%zu,%.6f", i, profile.levels[i],
                          profile.value(i));
            out << buf << "\n";
        }
    }

    nlohmann::json summary;
    summary["schema"] = "dsens-hardness/1";
    summary["dataset"] = ds.name;
    summary["instances"] = ds.rows;
    summary["rejected_rows"] = ingest.rejected_rows;
    summary["k"] = k;
    summary["bin_counts"] = counts;
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int do_compare(const std::string& path_a, const std::string& path_b, double alpha,
               const std::string& technique) {
    const auto load = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("compare: cannot open '" + path + "'");
        nlohmann::json j;
        in >> j;
        return dsens::report_from_json(j);
    };
    const dsens::ExperimentReport a = load(path_a);
    const dsens::ExperimentReport b = load(path_b);

    std::vector<std::string> techniques;
    for (const auto& name : a.table.techniques) {
        if (!technique.empty() && name != technique) continue;
        for (const auto& other : b.table.techniques) {
            if (other == name) {
                techniques.push_back(name);
                break;
            }
        }
    }
    if (techniques.empty()) {
        throw std::runtime_error("compare: no common technique" +
                                 (technique.empty() ? std::string{}
                                                    : " named '" + technique + "'"));
    }
    std::vector<std::pair<std::size_t, std::size_t>> shared;  // (row in a, row in b)
    for (std::size_t ra = 0; ra < a.table.datasets.size(); ++ra) {
        for (std::size_t rb = 0; rb < b.table.datasets.size(); ++rb) {
            if (a.table.datasets[ra] == b.table.datasets[rb]) {
                shared.push_back({ra, rb});
                break;
            }
        }
    }
    if (shared.empty()) throw std::runtime_error("compare: the reports share no dataset");

    const std::size_t critical = dsens::sign_test_critical(shared.size(), alpha);
    nlohmann::json result;
    result["schema"] = "dsens-compare/1";
    result["alpha"] = alpha;
    result["n_datasets"] = shared.size();
    result["critical_wins"] = critical;
    result["rows"] = nlohmann::json::array();
    for (const auto& name : techniques) {
        const std::size_t ca = a.table.technique_index(name);
        const std::size_t cb = b.table.technique_index(name);
        std::size_t wins = 0, ties = 0, losses = 0;
        for (const auto& [ra, rb] : shared) {
            const double va = dsens::round2(a.table.mean_at(ra, ca));
            const double vb = dsens::round2(b.table.mean_at(rb, cb));
            if (va > vb) {
                wins++;
            } else if (va < vb) {
                losses++;
            } else {
                ties++;
            }
        }
        result["rows"].push_back({{"technique", name},
                                  {"wins", wins},
                                  {"ties", ties},
                                  {"losses", losses},
                                  {"significant", wins >= critical}});
    }
    std::cout << result.dump(2) << "\n";
    return 0;
}

int do_generate(const std::string& kind_name, std::size_t samples, double noise,
                std::uint64_t seed, const std::string& output) {
    const dsens::SyntheticKind kind = dsens::synthetic_kind_from_name(kind_name);
    const dsens::Dataset ds = dsens::generate_synthetic(kind, samples, noise, seed);
    dsens::write_csv(ds, output);
    std::cout << "wrote " << output << " (" << ds.rows << " rows, " << ds.dim
              << " features)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic selection ensemble experiments"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a configured experiment sweep");
    std::string config_path;
    std::string output_dir;
    bool save_pools = false;
    run->add_option("-c,--config", config_path, "experiment config JSON")->required();
    run->add_option("-o,--output-dir", output_dir,
                    "override the output directory (also DSENS_OUTPUT_DIR)");
    run->add_flag("--save-pools", save_pools, "persist every trained pool as JSON");

    auto* hardness = app.add_subcommand("hardness", "profile a dataset's instance hardness");
    std::string hardness_input, hardness_label = "label", hardness_output;
    std::size_t hardness_k = 7;
    hardness->add_option("-i,--input", hardness_input, "CSV dataset")->required();
    hardness->add_option("--label", hardness_label, "label column name or zero-based index");
    hardness->add_option("-k", hardness_k, "neighborhood size")->check(CLI::PositiveNumber);
    hardness->add_option("-o,--output", hardness_output, "per-instance profile CSV");

    auto* compare = app.add_subcommand("compare", "sign test between two report files");
    std::string report_a, report_b, compare_technique;
    double alpha = 0.05;
    compare->add_option("report_a", report_a, "first report JSON")->required();
    compare->add_option("report_b", report_b, "second report JSON")->required();
    compare->add_option("--alpha", alpha, "significance level (0.10, 0.05, or 0.01)");
    compare->add_option("--technique", compare_technique,
                        "restrict to one technique (default: all common)");

    auto* generate = app.add_subcommand("generate", "write a synthetic dataset to CSV");
    std::string gen_kind, gen_output;
    std::size_t gen_samples = 400;
    double gen_noise = 0.2;
    std::uint64_t gen_seed = 1;
    generate->add_option("--kind", gen_kind, "banana or lithuanian")->required();
    generate->add_option("-n,--samples", gen_samples, "total sample count (even, >= 4)");
    generate->add_option("--noise", gen_noise, "Gaussian noise standard deviation");
    generate->add_option("--seed", gen_seed, "generator seed");
    generate->add_option("-o,--output", gen_output, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << std::endl;
        return e.get_exit_code() != 0 ? e.get_exit_code() : 1;
    }

    try {
        if (run->parsed()) return do_run(config_path, output_dir, save_pools);
        if (hardness->parsed()) {
            return do_hardness(hardness_input, hardness_label, hardness_k, hardness_output);
        }
        if (compare->parsed()) return do_compare(report_a, report_b, alpha, compare_technique);
        if (generate->parsed()) {
            return do_generate(gen_kind, gen_samples, gen_noise, gen_seed, gen_output);
        }
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << std::endl;
        return 1;
    }
    return 0;
}
