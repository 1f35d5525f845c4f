#pragma once

// Experiment report: the accuracy table with ranks and win/tie/loss,
// per-dataset hardness curves, hybrid routing statistics, and a provenance
// block (seed, config hash, library version). Reports carry no timestamps so
// reruns with the same seed serialize byte-identically. Renderable as JSON
// (lossless), CSV (plot data), or markdown (human summary).

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsens/evaluation.hpp"

namespace dsens {

inline constexpr const char* kReportSchema = "dsens-report/1";

struct HardnessCurveEntry {
    std::string technique;
    std::vector<std::size_t> correct;  // per level 0..k
};

struct DatasetHardness {
    std::string dataset;
    std::vector<std::size_t> totals;  // per level 0..k, summed over replications
    std::vector<HardnessCurveEntry> curves;
};

struct HardnessReport {
    bool enabled = false;
    std::size_t k = 0;
    std::string reference;
    std::vector<DatasetHardness> per_dataset;
};

struct HybridReport {
    bool enabled = false;
    std::string rule;
    double tau = 0.0;
    std::size_t ds_routed = 0;
    std::size_t total_queries = 0;
};

struct FailureRecord {
    std::string dataset;
    std::string error;
};

struct ExperimentReport {
    std::string config_name;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string library_version;
    std::size_t k = 7;
    std::size_t pool_size = 0;
    std::size_t replications = 0;

    ResultsTable table;
    std::vector<double> average_ranks;  // aligned with table.techniques
    std::string baseline;               // empty when baselines were not run
    std::vector<WinTieLoss> vs_baseline;
    HardnessReport hardness;
    HybridReport hybrid;
    std::vector<FailureRecord> failures;
    std::vector<std::string> warnings;
};

inline nlohmann::json report_to_json(const ExperimentReport& report) {
    nlohmann::json j;
    j["schema"] = kReportSchema;
    j["config_name"] = report.config_name;
    j["provenance"] = {{"seed", report.seed},
                       {"config_hash", report.config_hash},
                       {"library_version", report.library_version}};
    j["k"] = report.k;
    j["pool_size"] = report.pool_size;
    j["replications"] = report.replications;
    j["datasets"] = report.table.datasets;
    j["techniques"] = report.table.techniques;
    j["accuracy_mean"] = report.table.mean;
    j["accuracy_stddev"] = report.table.stddev;
    j["average_ranks"] = report.average_ranks;
    j["baseline"] = report.baseline;
    j["win_tie_loss"] = nlohmann::json::array();
    for (const auto& row : report.vs_baseline) {
        j["win_tie_loss"].push_back({{"technique", row.technique},
                                     {"baseline", row.baseline},
                                     {"wins", row.wins},
                                     {"ties", row.ties},
                                     {"losses", row.losses}});
    }
    j["hardness"] = {{"enabled", report.hardness.enabled},
                     {"k", report.hardness.k},
                     {"reference", report.hardness.reference},
                     {"per_dataset", nlohmann::json::array()}};
    for (const auto& ds : report.hardness.per_dataset) {
        nlohmann::json d = {{"dataset", ds.dataset},
                            {"totals", ds.totals},
                            {"curves", nlohmann::json::array()}};
        for (const auto& curve : ds.curves) {
            d["curves"].push_back({{"technique", curve.technique}, {"correct", curve.correct}});
        }
        j["hardness"]["per_dataset"].push_back(std::move(d));
    }
    j["hybrid"] = {{"enabled", report.hybrid.enabled},
                   {"rule", report.hybrid.rule},
                   {"tau", report.hybrid.tau},
                   {"ds_routed", report.hybrid.ds_routed},
                   {"total_queries", report.hybrid.total_queries}};
    j["failures"] = nlohmann::json::array();
    for (const auto& failure : report.failures) {
        j["failures"].push_back({{"dataset", failure.dataset}, {"error", failure.error}});
    }
    j["warnings"] = report.warnings;
    return j;
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
    if (j.value("schema", std::string{}) != kReportSchema) {
        throw std::runtime_error("report: missing or unsupported schema field");
    }
    ExperimentReport report;
    report.config_name = j.value("config_name", std::string{});
    const auto& prov = j.at("provenance");
    report.seed = prov.value("seed", std::uint64_t{0});
    report.config_hash = prov.value("config_hash", std::string{});
    report.library_version = prov.value("library_version", std::string{});
    report.k = j.value("k", std::size_t{7});
    report.pool_size = j.value("pool_size", std::size_t{0});
    report.replications = j.value("replications", std::size_t{0});
    report.table.datasets = j.at("datasets").get<std::vector<std::string>>();
    report.table.techniques = j.at("techniques").get<std::vector<std::string>>();
    report.table.mean = j.at("accuracy_mean").get<std::vector<double>>();
    report.table.stddev = j.at("accuracy_stddev").get<std::vector<double>>();
    report.average_ranks = j.value("average_ranks", std::vector<double>{});
    report.baseline = j.value("baseline", std::string{});
    for (const auto& row : j.value("win_tie_loss", nlohmann::json::array())) {
        WinTieLoss wtl;
        wtl.technique = row.at("technique").get<std::string>();
        wtl.baseline = row.at("baseline").get<std::string>();
        wtl.wins = row.at("wins").get<std::size_t>();
        wtl.ties = row.at("ties").get<std::size_t>();
        wtl.losses = row.at("losses").get<std::size_t>();
        report.vs_baseline.push_back(std::move(wtl));
    }
    if (j.contains("hardness")) {
        const auto& h = j.at("hardness");
        report.hardness.enabled = h.value("enabled", false);
        report.hardness.k = h.value("k", std::size_t{0});
        report.hardness.reference = h.value("reference", std::string{});
        for (const auto& d : h.value("per_dataset", nlohmann::json::array())) {
            DatasetHardness ds;
            ds.dataset = d.at("dataset").get<std::string>();
            ds.totals = d.at("totals").get<std::vector<std::size_t>>();
            for (const auto& c : d.value("curves", nlohmann::json::array())) {
                HardnessCurveEntry curve;
                curve.technique = c.at("technique").get<std::string>();
                curve.correct = c.at("correct").get<std::vector<std::size_t>>();
                ds.curves.push_back(std::move(curve));
            }
            report.hardness.per_dataset.push_back(std::move(ds));
        }
    }
    if (j.contains("hybrid")) {
        const auto& h = j.at("hybrid");
        report.hybrid.enabled = h.value("enabled", false);
        report.hybrid.rule = h.value("rule", std::string{});
        report.hybrid.tau = h.value("tau", 0.0);
        report.hybrid.ds_routed = h.value("ds_routed", std::size_t{0});
        report.hybrid.total_queries = h.value("total_queries", std::size_t{0});
    }
    for (const auto& f : j.value("failures", nlohmann::json::array())) {
        report.failures.push_back(
            {f.at("dataset").get<std::string>(), f.at("error").get<std::string>()});
    }
    report.warnings = j.value("warnings", std::vector<std::string>{});
    return report;
}

namespace detail {

inline std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return std::string(buf);
}

// Pool the per-dataset hardness tallies into one cross-dataset curve set.
struct PooledCurve {
    std::string technique;
    std::vector<std::size_t> correct;
};

inline void pool_hardness(const HardnessReport& hardness, std::vector<std::size_t>& totals,
                          std::vector<PooledCurve>& curves) {
    totals.assign(hardness.k + 1, 0);
    curves.clear();
    for (const auto& ds : hardness.per_dataset) {
        for (std::size_t level = 0; level <= hardness.k; ++level) {
            totals[level] += ds.totals[level];
        }
        for (const auto& curve : ds.curves) {
            PooledCurve* slot = nullptr;
            for (auto& existing : curves) {
                if (existing.technique == curve.technique) {
                    slot = &existing;
                    break;
                }
            }
            if (slot == nullptr) {
                curves.push_back({curve.technique, std::vector<std::size_t>(hardness.k + 1, 0)});
                slot = &curves.back();
            }
            for (std::size_t level = 0; level <= hardness.k; ++level) {
                slot->correct[level] += curve.correct[level];
            }
        }
    }
}

}  // namespace detail

// Accuracy table as CSV: dataset rows, technique columns, cells "mean".
inline std::string render_accuracy_csv(const ExperimentReport& report) {
    std::string out = "dataset";
    for (const auto& tech : report.table.techniques) out += "," + tech;
    out += "\n";
    for (std::size_t r = 0; r < report.table.rows(); ++r) {
        out += report.table.datasets[r];
        for (std::size_t c = 0; c < report.table.cols(); ++c) {
            out += "," + detail::format_fixed(report.table.mean_at(r, c), 2);
        }
        out += "\n";
    }
    return out;
}

// Hardness plot data pooled across datasets: bin,count,technique,accuracy.
// Empty bins are omitted.
inline std::string render_hardness_csv(const ExperimentReport& report) {
    std::string out = "bin,count,technique,accuracy\n";
    if (!report.hardness.enabled) return out;
    std::vector<std::size_t> totals;
    std::vector<detail::PooledCurve> curves;
    detail::pool_hardness(report.hardness, totals, curves);
    for (std::size_t level = 0; level <= report.hardness.k; ++level) {
        if (totals[level] == 0) continue;
        const std::string bin = detail::format_fixed(
            static_cast<double>(level) / static_cast<double>(report.hardness.k), 4);
        for (const auto& curve : curves) {
            const double acc =
                static_cast<double>(curve.correct[level]) / static_cast<double>(totals[level]);
            out += bin + "," + std::to_string(totals[level]) + "," + curve.technique + "," +
                   detail::format_fixed(acc, 4) + "\n";
        }
    }
    return out;
}

inline std::string render_markdown(const ExperimentReport& report) {
    std::string out;
    out += "# Experiment report: " + report.config_name + "\n\n";
    out += "seed " + std::to_string(report.seed) + ", config " + report.config_hash +
           ", library " + report.library_version + ", pool " +
           std::to_string(report.pool_size) + ", K " + std::to_string(report.k) + ", " +
           std::to_string(report.replications) + " replications\n\n";

    out += "## Average ranks\n\n";
    out += "| Technique | Avg. rank | Avg. accuracy |\n|---|---|---|\n";
    std::vector<std::size_t> order(report.table.cols());
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (report.average_ranks[a] != report.average_ranks[b]) {
            return report.average_ranks[a] < report.average_ranks[b];
        }
        return report.table.techniques[a] < report.table.techniques[b];
    });
    for (const std::size_t c : order) {
        double sum = 0.0;
        for (std::size_t r = 0; r < report.table.rows(); ++r) sum += report.table.mean_at(r, c);
        const double avg = report.table.rows() == 0
                               ? 0.0
                               : sum / static_cast<double>(report.table.rows());
        out += "| " + report.table.techniques[c] + " | " +
               detail::format_fixed(report.average_ranks[c], 3) + " | " +
               detail::format_fixed(avg, 2) + " |\n";
    }

    out += "\n## Accuracy per dataset (mean(std) %)\n\n";
    out += "| Dataset |";
    for (const auto& tech : report.table.techniques) out += " " + tech + " |";
    out += "\n|---|";
    for (std::size_t c = 0; c < report.table.cols(); ++c) out += "---|";
    out += "\n";
    for (std::size_t r = 0; r < report.table.rows(); ++r) {
        out += "| " + report.table.datasets[r] + " |";
        for (std::size_t c = 0; c < report.table.cols(); ++c) {
            out += " " + detail::format_fixed(report.table.mean_at(r, c), 2) + "(" +
                   detail::format_fixed(report.table.stddev_at(r, c), 2) + ") |";
        }
        out += "\n";
    }

    if (!report.vs_baseline.empty()) {
        out += "\n## Wins/ties/losses vs " + report.baseline + "\n\n";
        out += "| Technique | Wins | Ties | Losses |\n|---|---|---|---|\n";
        for (const auto& row : report.vs_baseline) {
            out += "| " + row.technique + " | " + std::to_string(row.wins) + " | " +
                   std::to_string(row.ties) + " | " + std::to_string(row.losses) + " |\n";
        }
    }

    if (report.hybrid.enabled && report.hybrid.total_queries > 0) {
        const double frac = static_cast<double>(report.hybrid.ds_routed) /
                            static_cast<double>(report.hybrid.total_queries);
        out += "\n## Hybrid routing\n\nrule " + report.hybrid.rule + ", tau " +
               detail::format_fixed(report.hybrid.tau, 2) + ": " +
               std::to_string(report.hybrid.ds_routed) + " of " +
               std::to_string(report.hybrid.total_queries) + " queries (" +
               detail::format_fixed(100.0 * frac, 1) + "%) routed to dynamic selection\n";
    }

    if (report.hardness.enabled) {
        std::vector<std::size_t> totals;
        std::vector<detail::PooledCurve> curves;
        detail::pool_hardness(report.hardness, totals, curves);
        out += "\n## Accuracy by hardness bin (pooled over datasets)\n\n";
        out += "| Bin | Count |";
        for (const auto& curve : curves) out += " " + curve.technique + " |";
        out += "\n|---|---|";
        for (std::size_t i = 0; i < curves.size(); ++i) out += "---|";
        out += "\n";
        for (std::size_t level = 0; level <= report.hardness.k; ++level) {
            if (totals[level] == 0) continue;
            out += "| " +
                   detail::format_fixed(static_cast<double>(level) /
                                            static_cast<double>(report.hardness.k),
                                        4) +
                   " | " + std::to_string(totals[level]) + " |";
            for (const auto& curve : curves) {
                out += " " +
                       detail::format_fixed(static_cast<double>(curve.correct[level]) /
                                                static_cast<double>(totals[level]),
                                            4) +
                       " |";
            }
            out += "\n";
        }
    }

    if (!report.failures.empty()) {
        out += "\n## Failures\n\n";
        for (const auto& failure : report.failures) {
            out += "- " + failure.dataset + ": " + failure.error + "\n";
        }
    }
    return out;
}

// Write the chosen rendering into `out_dir`; returns the paths written.
inline std::vector<std::string> report_render(const ExperimentReport& report,
                                              const std::string& format,
                                              const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto write = [&](const std::string& filename, const std::string& content) {
        const std::string path = (std::filesystem::path(out_dir) / filename).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("report: cannot write '" + path + "'");
        out << content;
        return path;
    };
    std::vector<std::string> paths;
    if (format == "json") {
        paths.push_back(write("report.json", report_to_json(report).dump(2) + "\n"));
    } else if (format == "csv") {
        paths.push_back(write("accuracy.csv", render_accuracy_csv(report)));
        if (report.hardness.enabled) {
            paths.push_back(write("hardness.csv", render_hardness_csv(report)));
        }
    } else if (format == "markdown") {
        paths.push_back(write("report.md", render_markdown(report)));
    } else {
        throw std::runtime_error("report: unknown format '" + format + "'");
    }
    return paths;
}

}  // namespace dsens
