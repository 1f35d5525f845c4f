// Regenerates the CSV fixtures under data/. Every fixture is a seeded
// Gaussian mixture, so reruns are byte-identical; the files are committed and
// this tool only exists to document and reproduce them.
//
// The two-class overlap fixtures are built for a linear Bayes boundary with
// substantial class overlap: separation is the Euclidean distance between
// the class means under unit isotropic noise, so Bayes error = Phi(-sep/2).
// That overlap populates the high-hardness bins that the hardness analysis
// studies. The three-class fixture mirrors a small real dataset's shape
// (178 rows, 13 features, class counts 59/71/48) for ingest tests.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "dsens/csv_io.hpp"
#include "dsens/dataset.hpp"
#include "dsens/rng.hpp"

namespace {

dsens::Dataset gaussian_classes(const std::string& name, std::size_t dim,
                                const std::vector<std::size_t>& counts,
                                const std::vector<std::vector<double>>& means,
                                std::uint64_t seed) {
    dsens::Dataset ds;
    ds.name = name;
    ds.dim = dim;
    ds.class_count = static_cast<int>(counts.size());
    dsens::Rng rng(seed);
    for (std::size_t c = 0; c < counts.size(); ++c) {
        for (std::size_t i = 0; i < counts[c]; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                ds.features.push_back(means[c][j] + rng.next_normal());
            }
            ds.labels.push_back(static_cast<int>(c));
            ds.rows++;
        }
    }
    return ds;
}

// Two balanced classes at +/- sep/2 along the all-ones diagonal.
dsens::Dataset overlap_pair(const std::string& name, std::size_t dim, std::size_t total,
                            double separation, std::uint64_t seed) {
    const double half = separation / (2.0 * std::sqrt(static_cast<double>(dim)));
    std::vector<double> lo(dim, -half), hi(dim, half);
    return gaussian_classes(name, dim, {total / 2, total / 2}, {lo, hi}, seed);
}

}  // namespace

int main(int argc, char** argv) {
    std::string out_dir = "data";
    if (argc > 1) out_dir = argv[1];
    std::filesystem::create_directories(out_dir);

    std::vector<dsens::Dataset> fixtures;
    fixtures.push_back(overlap_pair("overlap2", 2, 400, 1.8, 101));
    fixtures.push_back(overlap_pair("overlap4", 4, 400, 2.0, 102));
    fixtures.push_back(overlap_pair("overlap6", 6, 400, 2.2, 103));
    fixtures.push_back(overlap_pair("overlap8", 8, 400, 2.4, 104));
    fixtures.push_back(overlap_pair("overlap10", 10, 400, 2.3, 105));

    // 13-dimensional, 3 classes, counts 59/71/48; each class offset along its
    // own group of coordinates.
    {
        std::vector<std::vector<double>> means(3, std::vector<double>(13, 0.0));
        for (std::size_t j = 0; j < 4; ++j) means[0][j] = 2.5;
        for (std::size_t j = 4; j < 9; ++j) means[1][j] = 2.5;
        for (std::size_t j = 9; j < 13; ++j) means[2][j] = 2.5;
        fixtures.push_back(gaussian_classes("wine", 13, {59, 71, 48}, means, 7));
    }

    for (const auto& ds : fixtures) {
        const std::string path =
            (std::filesystem::path(out_dir) / (ds.name + ".csv")).string();
        dsens::write_csv(ds, path);
        std::cout << "wrote " << path << " (" << ds.rows << " rows, " << ds.dim
                  << " features, " << ds.class_count << " classes)\n";
    }
    return 0;
}
