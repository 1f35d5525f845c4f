// Learners and their shared substrate: perceptron training, bagged pools,
// the oracle matrix, exact K-NN, k-means, and regions of competence in both
// feature and output-profile space.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <set>

#include "dsens/kmeans.hpp"
#include "dsens/knn.hpp"
#include "dsens/linear.hpp"
#include "dsens/pool.hpp"
#include "dsens/region.hpp"
#include "dsens/rng.hpp"
#include "dsens/synthetic.hpp"

using namespace dsens;

namespace {

// Two well-separated Gaussian blobs; linearly separable with margin.
Dataset blobs(std::size_t per_class, double gap, std::uint64_t seed) {
    Dataset ds;
    ds.name = "blobs";
    ds.dim = 2;
    ds.class_count = 2;
    Rng rng(seed);
    for (int cls = 0; cls < 2; ++cls) {
        const double cx = cls == 0 ? -gap / 2 : gap / 2;
        for (std::size_t i = 0; i < per_class; ++i) {
            ds.features.push_back(cx + 0.3 * rng.next_normal());
            ds.features.push_back(0.3 * rng.next_normal());
            ds.labels.push_back(cls);
            ds.rows++;
        }
    }
    return ds;
}

double training_accuracy(const LinearClassifier& model, const Dataset& ds) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ds.rows; ++i) {
        if (model.predict(ds.row(i)) == ds.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(ds.rows);
}

}  // namespace

TEST_CASE("perceptron separates linearly separable data") {
    const Dataset ds = blobs(40, 4.0, 31);
    const LinearClassifier model = train_perceptron(ds, {}, 5);
    REQUIRE(training_accuracy(model, ds) == 1.0);
}

TEST_CASE("perceptron determinism and soft outputs") {
    const Dataset ds = blobs(30, 2.0, 32);
    const LinearClassifier a = train_perceptron(ds, {}, 5);
    const LinearClassifier b = train_perceptron(ds, {}, 5);
    for (int cls = 0; cls < 2; ++cls) {
        const auto wa = a.weight_row(cls);
        const auto wb = b.weight_row(cls);
        REQUIRE(std::equal(wa.begin(), wa.end(), wb.begin()));
    }
    REQUIRE(a.bias() == b.bias());

    for (std::size_t i = 0; i < 10; ++i) {
        const auto soft = a.soft_outputs(ds.row(i));
        double sum = 0.0;
        for (const double p : soft) {
            REQUIRE(p > 0.0);
            sum += p;
        }
        REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-12));
        // Softmax is monotone in the activations, so argmax agrees.
        const auto argmax = static_cast<int>(
            std::max_element(soft.begin(), soft.end()) - soft.begin());
        REQUIRE(argmax == a.predict(ds.row(i)));
    }
}

TEST_CASE("perceptron on a single-class set is a constant classifier") {
    Dataset ds;
    ds.name = "mono";
    ds.rows = 5;
    ds.dim = 2;
    ds.class_count = 3;
    ds.features = {0, 0, 1, 1, 2, 2, 3, 3, 4, 4};
    ds.labels = {2, 2, 2, 2, 2};
    const LinearClassifier model = train_perceptron(ds, {}, 1);
    REQUIRE(model.predict(std::vector<double>{-100.0, 55.0}) == 2);
    REQUIRE(model.predict(std::vector<double>{3.0, 3.0}) == 2);
}

TEST_CASE("perceptron three-class one-vs-rest") {
    Dataset ds;
    ds.name = "three";
    ds.dim = 2;
    ds.class_count = 3;
    Rng rng(77);
    const double centers[3][2] = {{0, 0}, {6, 0}, {0, 6}};
    for (int cls = 0; cls < 3; ++cls) {
        for (int i = 0; i < 30; ++i) {
            ds.features.push_back(centers[cls][0] + 0.4 * rng.next_normal());
            ds.features.push_back(centers[cls][1] + 0.4 * rng.next_normal());
            ds.labels.push_back(cls);
            ds.rows++;
        }
    }
    const LinearClassifier model = train_perceptron(ds, {}, 9);
    REQUIRE(training_accuracy(model, ds) > 0.95);
}

TEST_CASE("bagging pool determinism and identity") {
    const Dataset ds = blobs(25, 2.5, 41);
    const ClassifierPool a = bagging_generate(ds, 8, {}, 99);
    const ClassifierPool b = bagging_generate(ds, 8, {}, 99);
    REQUIRE(a.size() == 8);
    REQUIRE(a.bag_seeds == b.bag_seeds);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto wa = a.members[i].weight_row(0);
        const auto wb = b.members[i].weight_row(0);
        REQUIRE(std::equal(wa.begin(), wa.end(), wb.begin()));
    }
    // Different bags actually differ.
    const std::set<std::uint64_t> seeds(a.bag_seeds.begin(), a.bag_seeds.end());
    REQUIRE(seeds.size() == 8);
}

TEST_CASE("oracle matrix mirrors member behavior") {
    const Dataset train = blobs(25, 2.0, 42);
    const Dataset dsel = blobs(20, 2.0, 43);
    const ClassifierPool pool = bagging_generate(train, 6, {}, 7);
    const OracleMatrix oracle = build_oracle_matrix(pool, dsel);
    REQUIRE(oracle.pool_size == 6);
    REQUIRE(oracle.samples == dsel.rows);
    REQUIRE(oracle.num_classes == 2);
    for (std::size_t i = 0; i < oracle.pool_size; ++i) {
        for (std::size_t s = 0; s < oracle.samples; ++s) {
            const int direct = pool.members[i].predict(dsel.row(s));
            REQUIRE(oracle.prediction(i, s) == direct);
            REQUIRE(oracle.is_correct(i, s) == (direct == dsel.labels[s]));
            const auto soft = oracle.soft_row(i, s);
            double sum = 0.0;
            for (const double p : soft) sum += p;
            REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-12));
        }
    }
}

TEST_CASE("pool serialization round trip") {
    const Dataset train = blobs(20, 2.0, 44);
    const ClassifierPool pool = bagging_generate(train, 4, {}, 13);
    const std::string path =
        (std::filesystem::temp_directory_path() / "dsens_test_pool.json").string();
    save_pool(pool, path);
    const ClassifierPool loaded = load_pool(path);
    REQUIRE(loaded.size() == pool.size());
    REQUIRE(loaded.seed == pool.seed);
    REQUIRE(loaded.bag_seeds == pool.bag_seeds);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        REQUIRE(loaded.members[i].bias() == pool.members[i].bias());
        for (int cls = 0; cls < 2; ++cls) {
            const auto wa = loaded.members[i].weight_row(cls);
            const auto wb = pool.members[i].weight_row(cls);
            REQUIRE(std::equal(wa.begin(), wa.end(), wb.begin()));
        }
    }
}

TEST_CASE("knn_search ordering, ties, and exclusion") {
    Dataset ref;
    ref.name = "ref";
    ref.rows = 5;
    ref.dim = 1;
    ref.class_count = 2;
    ref.features = {0.0, 1.0, -1.0, 2.0, 0.5};
    ref.labels = {0, 1, 0, 1, 0};

    const std::vector<double> query = {0.0};
    const auto neighbors = knn_search(query, ref, 3);
    REQUIRE(neighbors.size() == 3);
    REQUIRE(neighbors[0].index == 0);  // distance 0
    REQUIRE(neighbors[0].distance == 0.0);
    REQUIRE(neighbors[1].index == 4);  // distance 0.5
    // Distance 1 tie between rows 1 and 2: lower index wins.
    REQUIRE(neighbors[2].index == 1);

    const auto excluded = knn_search(query, ref, 3, 0);
    REQUIRE(excluded[0].index == 4);
    REQUIRE(excluded[1].index == 1);
    REQUIRE(excluded[2].index == 2);

    REQUIRE_THROWS_AS(knn_search(query, ref, 6), std::runtime_error);
    REQUIRE_THROWS_AS(knn_search(query, ref, 5, 0), std::runtime_error);
    REQUIRE_THROWS_AS(knn_search(query, ref, 0), std::runtime_error);
}

TEST_CASE("knn vote plurality with lowest-class ties") {
    Dataset ref;
    ref.name = "ref";
    ref.rows = 4;
    ref.dim = 1;
    ref.class_count = 3;
    ref.features = {0, 1, 2, 3};
    ref.labels = {2, 1, 2, 1};

    const auto neighbors = knn_search(std::vector<double>{0.0}, ref, 4);
    // Two votes each for classes 1 and 2: the tie goes to class 1.
    REQUIRE(knn_vote(neighbors, ref.labels, ref.class_count) == 1);

    KnnClassifier clf{&ref, 1};
    REQUIRE(clf.classify(std::vector<double>{3.1}) == 1);
    REQUIRE(clf.classify(std::vector<double>{-0.2}) == 2);
}

TEST_CASE("kmeans separates blobs and stays deterministic") {
    const Dataset ds = blobs(30, 6.0, 51);
    const ClusterModel model = kmeans_fit(ds, 2, 3);
    REQUIRE(model.k == 2);
    // Each blob maps to one cluster.
    const std::size_t first = model.assignments[0];
    for (std::size_t i = 0; i < 30; ++i) REQUIRE(model.assignments[i] == first);
    for (std::size_t i = 30; i < 60; ++i) REQUIRE(model.assignments[i] == 1 - first);
    REQUIRE(model.members[0].size() + model.members[1].size() == ds.rows);

    const ClusterModel again = kmeans_fit(ds, 2, 3);
    REQUIRE(again.centroids == model.centroids);
    REQUIRE(again.assignments == model.assignments);

    // k = 1: centroid is the global mean.
    const ClusterModel one = kmeans_fit(ds, 1, 3);
    double mx = 0.0;
    for (std::size_t i = 0; i < ds.rows; ++i) mx += ds.at(i, 0);
    REQUIRE_THAT(one.centroids[0], Catch::Matchers::WithinAbs(mx / ds.rows, 1e-9));

    REQUIRE_THROWS_AS(kmeans_fit(ds, 61, 3), std::runtime_error);
    REQUIRE_THROWS_AS(kmeans_fit(ds, 0, 3), std::runtime_error);
}

TEST_CASE("kmeans keeps every cluster populated on degenerate data") {
    Dataset ds;
    ds.name = "dup";
    ds.rows = 6;
    ds.dim = 1;
    ds.class_count = 2;
    ds.features = {1, 1, 1, 1, 1, 1};
    ds.labels = {0, 0, 0, 1, 1, 1};
    const ClusterModel model = kmeans_fit(ds, 3, 5);
    for (std::size_t c = 0; c < 3; ++c) REQUIRE(!model.members[c].empty());
    std::size_t total = 0;
    for (const auto& members : model.members) total += members.size();
    REQUIRE(total == ds.rows);
}

TEST_CASE("knn_region carries indices, distances, labels nearest-first") {
    const Dataset dsel = blobs(15, 3.0, 61);
    const std::vector<double> query = {0.0, 0.0};
    const RegionOfCompetence region = knn_region(query, dsel, 7);
    REQUIRE(region.size() == 7);
    for (std::size_t k = 1; k < region.size(); ++k) {
        REQUIRE(region.distances[k - 1] <= region.distances[k]);
    }
    for (std::size_t k = 0; k < region.size(); ++k) {
        REQUIRE(region.labels[k] == dsel.labels[region.indices[k]]);
        const double d = std::sqrt(squared_distance(query, dsel.row(region.indices[k])));
        REQUIRE_THAT(region.distances[k], Catch::Matchers::WithinAbs(d, 1e-12));
    }
    REQUIRE_THROWS_AS(knn_region(query, dsel, 31), std::runtime_error);
}

TEST_CASE("output profiles match the oracle columns") {
    const Dataset train = blobs(20, 2.0, 71);
    const Dataset dsel = blobs(12, 2.0, 72);
    const ClassifierPool pool = bagging_generate(train, 5, {}, 3);
    const OracleMatrix oracle = build_oracle_matrix(pool, dsel);
    for (std::size_t s = 0; s < dsel.rows; ++s) {
        REQUIRE(output_profile(pool, dsel.row(s)) == oracle_profile(oracle, s));
    }
}

TEST_CASE("profile similarity") {
    REQUIRE(profile_similarity({1, 2, 3}, {1, 2, 3}) == 1.0);
    REQUIRE(profile_similarity({1, 2, 3}, {0, 0, 0}) == 0.0);
    REQUIRE_THAT(profile_similarity({1, 2, 3, 4}, {1, 2, 0, 0}),
                 Catch::Matchers::WithinAbs(0.5, 1e-12));
    REQUIRE_THROWS_AS(profile_similarity({1}, {1, 2}), std::runtime_error);
    REQUIRE_THROWS_AS(profile_similarity({}, {}), std::runtime_error);
}

TEST_CASE("profile region ranks by Hamming distance") {
    const Dataset train = blobs(20, 2.5, 81);
    const Dataset dsel = blobs(15, 2.5, 82);
    const ClassifierPool pool = bagging_generate(train, 6, {}, 17);
    const OracleMatrix oracle = build_oracle_matrix(pool, dsel);

    const OutputProfile query = output_profile(pool, std::vector<double>{0.1, -0.2});
    const RegionOfCompetence region = profile_region(query, oracle, dsel, 5);
    REQUIRE(region.size() == 5);

    // Brute-force check: recompute every Hamming distance and verify the
    // region is the 5 smallest with index tie-breaks, distances sqrt(2h).
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t s = 0; s < dsel.rows; ++s) {
        std::size_t mismatches = 0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (oracle.prediction(i, s) != query[i]) ++mismatches;
        }
        all.push_back({std::sqrt(2.0 * static_cast<double>(mismatches)), s});
    }
    std::stable_sort(all.begin(), all.end());
    for (std::size_t k = 0; k < 5; ++k) {
        REQUIRE(region.indices[k] == all[k].second);
        REQUIRE_THAT(region.distances[k], Catch::Matchers::WithinAbs(all[k].first, 1e-12));
    }

    // Identical profiles everywhere: the region is the first K by index.
    OracleMatrix flat = oracle;
    std::fill(flat.predictions.begin(), flat.predictions.end(), 0);
    const OutputProfile zeros(pool.size(), 0);
    const RegionOfCompetence first = profile_region(zeros, flat, dsel, 3);
    REQUIRE(first.indices == std::vector<std::size_t>{0, 1, 2});
    REQUIRE(first.distances == std::vector<double>{0.0, 0.0, 0.0});

    REQUIRE_THROWS_AS(profile_region(zeros, flat, dsel, dsel.rows + 1), std::runtime_error);
    REQUIRE_THROWS_AS(profile_region(OutputProfile{0}, flat, dsel, 3), std::runtime_error);
}
