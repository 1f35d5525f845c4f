#pragma once

// CSV ingestion and export. Comma-separated, UTF-8, optional header row.
// The label column is selected by name (requires a header) or zero-based
// index. Labels may be arbitrary strings and are encoded to dense class
// indices in order of first appearance, which keeps the encoding stable
// under re-reads of the same file.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsens/dataset.hpp"

namespace dsens {

enum class HeaderMode { Auto, Present, Absent };

struct IngestOptions {
    std::string label_column = "label";  // column name, or decimal index
    HeaderMode header = HeaderMode::Auto;
};

struct IngestResult {
    Dataset dataset;
    std::size_t rejected_rows = 0;          // rows dropped for missing/NaN features
    std::vector<std::string> label_names;   // original label strings by class index
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline bool is_missing_token(const std::string& s) {
    if (s.empty()) return true;
    if (s.size() == 3) {
        auto lower = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
        return lower(s[0]) == 'n' && lower(s[1]) == 'a' && lower(s[2]) == 'n';
    }
    return s == "?";
}

// Parses a full numeric token; anything trailing makes it non-numeric.
inline std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    const char* begin = s.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end != begin + s.size()) return std::nullopt;
    return value;
}

}  // namespace detail

// Reads a CSV file into a Dataset. Rows containing a missing or NaN/inf
// feature are dropped and counted in the result; a non-numeric token in a
// feature column is treated as a column type error and aborts the read.
inline IngestResult ingest_csv(const std::string& path, const IngestOptions& options = {}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest_csv: cannot open '" + path + "'");

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!detail::trim(line).empty()) lines.push_back(line);
    }
    if (lines.empty()) throw std::runtime_error("ingest_csv: '" + path + "' is empty");

    const auto first = detail::split_csv_line(lines.front());
    const std::size_t columns = first.size();
    if (columns < 2) throw std::runtime_error("ingest_csv: '" + path + "' needs >= 2 columns");

    // Resolve the label column. A pure decimal selector means index.
    std::optional<std::size_t> label_index;
    const bool selector_is_index =
        !options.label_column.empty() &&
        options.label_column.find_first_not_of("0123456789") == std::string::npos;
    if (selector_is_index) {
        label_index = static_cast<std::size_t>(std::stoul(options.label_column));
        if (*label_index >= columns) {
            throw std::runtime_error("ingest_csv: label column index out of range");
        }
    }

    // Header detection: by name the header must exist; by index, sniff the
    // first row, where a non-numeric, non-missing cell in a feature position
    // cannot be data.
    bool has_header = options.header == HeaderMode::Present;
    if (options.header == HeaderMode::Auto) {
        if (!selector_is_index) {
            has_header = true;
        } else {
            for (std::size_t j = 0; j < columns; ++j) {
                if (j == *label_index) continue;
                if (!detail::parse_number(first[j]) && !detail::is_missing_token(first[j])) {
                    has_header = true;
                    break;
                }
            }
        }
    }
    if (!selector_is_index) {
        if (!has_header) {
            throw std::runtime_error("ingest_csv: label column '" + options.label_column +
                                     "' requested by name but file has no header");
        }
        for (std::size_t j = 0; j < columns; ++j) {
            if (first[j] == options.label_column) {
                label_index = j;
                break;
            }
        }
        if (!label_index) {
            throw std::runtime_error("ingest_csv: no column named '" + options.label_column + "'");
        }
    }

    IngestResult result;
    Dataset& ds = result.dataset;
    ds.name = path;
    ds.dim = columns - 1;
    std::unordered_map<std::string, int> label_codes;

    for (std::size_t row = has_header ? 1 : 0; row < lines.size(); ++row) {
        const auto cells = detail::split_csv_line(lines[row]);
        if (cells.size() != columns) {
            throw std::runtime_error("ingest_csv: row " + std::to_string(row + 1) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(columns));
        }
        std::vector<double> feature_row;
        feature_row.reserve(ds.dim);
        bool reject = false;
        for (std::size_t j = 0; j < columns; ++j) {
            if (j == *label_index) continue;
            const std::string& cell = cells[j];
            if (detail::is_missing_token(cell)) {
                reject = true;
                continue;
            }
            const auto value = detail::parse_number(cell);
            if (!value) {
                throw std::runtime_error("ingest_csv: non-numeric value '" + cell +
                                         "' in feature column " + std::to_string(j) + " (row " +
                                         std::to_string(row + 1) + ")");
            }
            if (!std::isfinite(*value)) {
                reject = true;
                continue;
            }
            feature_row.push_back(*value);
        }
        if (reject) {
            result.rejected_rows++;
            continue;
        }
        const std::string& label_cell = cells[*label_index];
        auto it = label_codes.find(label_cell);
        if (it == label_codes.end()) {
            it = label_codes.emplace(label_cell, static_cast<int>(result.label_names.size())).first;
            result.label_names.push_back(label_cell);
        }
        ds.features.insert(ds.features.end(), feature_row.begin(), feature_row.end());
        ds.labels.push_back(it->second);
        ds.rows++;
    }

    ds.class_count = static_cast<int>(result.label_names.size());
    if (ds.rows == 0) throw std::runtime_error("ingest_csv: '" + path + "' has no usable rows");
    if (ds.class_count < 2) {
        throw std::runtime_error("ingest_csv: '" + path + "' has a single class");
    }
    validate_dataset(ds);
    return result;
}

// Writes a dataset as CSV with a generated header (x0..x{d-1}, label).
// Labels are written as their dense integer codes.
inline void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "' for writing");
    for (std::size_t j = 0; j < ds.dim; ++j) out << "x" << j << ",";
    out << "label\n";
    char buffer[64];
    for (std::size_t i = 0; i < ds.rows; ++i) {
        for (std::size_t j = 0; j < ds.dim; ++j) {
            std::snprintf(buffer, sizeof(buffer), "%.17g", ds.at(i, j));
            out << buffer << ",";
        }
        out << ds.labels[i] << "\n";
    }
    if (!out) throw std::runtime_error("write_csv: failed writing '" + path + "'");
}

}  // namespace dsens
