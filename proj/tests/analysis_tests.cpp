// Instance hardness, hardness-gated hybrid routing, and the cross-dataset
// comparison statistics.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsens/evaluation.hpp"
#include "dsens/hardness.hpp"
#include "dsens/knn.hpp"
#include "dsens/rng.hpp"
#include "dsens/synthetic.hpp"

using namespace dsens;
using Catch::Matchers::WithinAbs;

namespace {

Dataset line_dataset(const std::vector<int>& labels) {
    Dataset ds;
    ds.name = "line";
    ds.rows = labels.size();
    ds.dim = 1;
    ds.labels = labels;
    ds.class_count = 1 + *std::max_element(labels.begin(), labels.end());
    for (std::size_t i = 0; i < ds.rows; ++i) {
        ds.features.push_back(static_cast<double>(i));
    }
    return ds;
}

}  // namespace

TEST_CASE("kdn counts disagreeing neighbors") {
    // Reference on a line: positions 0..9, labels 0 for the left half and 1
    // for the right half.
    const Dataset ref = line_dataset({0, 0, 0, 0, 0, 1, 1, 1, 1, 1});

    // Deep inside the left half: all 3 neighbors agree.
    REQUIRE(kdn_level(std::vector<double>{0.2}, 0, ref, 3) == 0);
    REQUIRE(kdn(std::vector<double>{0.2}, 0, ref, 3) == 0.0);
    // Same point judged against the wrong label: full disagreement.
    REQUIRE(kdn_level(std::vector<double>{0.2}, 1, ref, 3) == 3);
    // Straddling the boundary at 4.5: neighbors 4,5,3(,6) split.
    REQUIRE(kdn_level(std::vector<double>{4.5}, 0, ref, 3) == 1);
    REQUIRE(kdn_level(std::vector<double>{4.5}, 0, ref, 4) == 2);

    // Self-exclusion: row 4's nearest neighbors without itself are 3 and 5.
    REQUIRE(kdn_level(ref.row(4), ref.labels[4], ref, 2, 4) == 1);
    // Without exclusion the sample itself dominates.
    REQUIRE(kdn_level(ref.row(4), ref.labels[4], ref, 1) == 0);

    REQUIRE_THROWS_AS(kdn_level(std::vector<double>{0.0}, 0, ref, 11), std::runtime_error);
}

TEST_CASE("hardness profile excludes self only on the same object") {
    const Dataset ref = line_dataset({0, 0, 1, 1});
    const HardnessProfile self = hardness_profile(ref, ref, 1);
    // With self-exclusion, ties go to the lower index: row 2's nearest
    // becomes row 1 across the class boundary.
    REQUIRE(self.levels == std::vector<std::size_t>{0, 0, 1, 0});

    Dataset subject = ref;
    subject.name = "copy";
    const HardnessProfile other = hardness_profile(subject, ref, 1);
    // Distinct objects: each row finds itself at distance zero.
    REQUIRE(other.levels == std::vector<std::size_t>{0, 0, 0, 0});
    REQUIRE(other.reference_name == "line");
    REQUIRE(other.k == 1);
}

TEST_CASE("hardness bins partition the test set") {
    const Dataset ref = line_dataset({0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
    Dataset test;
    test.name = "probes";
    test.rows = 4;
    test.dim = 1;
    test.class_count = 2;
    test.features = {0.2, 4.4, 4.6, 9.2};
    test.labels = {0, 0, 0, 1};

    const HardnessBins bins = bin_by_hardness(test, ref, 3);
    REQUIRE(bins.counts.size() == 4);
    REQUIRE(std::accumulate(bins.counts.begin(), bins.counts.end(), std::size_t{0}) ==
            test.rows);
    // Probe 0: neighbors 0,1,2 agree (level 0). Probe 1 at 4.4: neighbors
    // 4,5,3 -> one disagrees. Probe 2 at 4.6: neighbors 5,4,6 -> one
    // disagrees (labels 1,0,1 vs true 0 gives two disagreements). Probe 3:
    // neighbors all label 1, agree.
    REQUIRE(bins.level_of[0] == 0);
    REQUIRE(bins.level_of[1] == 1);
    REQUIRE(bins.level_of[2] == 2);
    REQUIRE(bins.level_of[3] == 0);
    REQUIRE(bins.counts == std::vector<std::size_t>{2, 1, 1, 0});
}

TEST_CASE("per-bin accuracy omits empty bins") {
    HardnessBins bins;
    bins.k = 3;
    bins.counts = {2, 1, 1, 0};
    bins.level_of = {0, 1, 2, 0};

    const std::vector<int> labels = {0, 0, 0, 1};
    const std::vector<int> good = labels;
    const auto perfect = accuracy_per_bin(good, labels, bins);
    REQUIRE(perfect.size() == 3);  // level 3 is empty and absent
    for (const auto& bin : perfect) {
        REQUIRE(bin.accuracy == 1.0);
        REQUIRE(bin.correct == bin.total);
    }
    REQUIRE(perfect[0].level == 0);
    REQUIRE(perfect[0].total == 2);

    const std::vector<int> half = {0, 1, 1, 1};
    const auto mixed = accuracy_per_bin(half, labels, bins);
    REQUIRE(mixed[0].accuracy == 1.0);
    REQUIRE(mixed[1].accuracy == 0.0);
    REQUIRE(mixed[2].accuracy == 0.0);

    REQUIRE_THROWS_AS(accuracy_per_bin({0, 0}, labels, bins), std::runtime_error);
}

TEST_CASE("two-class 1-NN fails exactly on majority-disagreeing neighborhoods") {
    // With two classes and K=1, the K-NN prediction is wrong precisely when
    // the nearest neighbor disagrees, i.e. when the disagreement level is 1.
    const Dataset ds = generate_synthetic(SyntheticKind::Banana, 200, 0.3, 77);
    const Dataset ref = generate_synthetic(SyntheticKind::Banana, 150, 0.3, 78);
    for (std::size_t i = 0; i < ds.rows; ++i) {
        const auto nb = knn_search(ds.row(i), ref, 1);
        const int predicted = knn_vote(nb, ref.labels, ref.class_count);
        const std::size_t level = kdn_level(ds.row(i), ds.labels[i], ref, 1);
        REQUIRE((predicted == ds.labels[i]) == (level == 0));
    }
}

TEST_CASE("routing hardness ignores the query label") {
    const Dataset ref = line_dataset({0, 0, 0, 1, 1, 1});
    // Neighborhood 2,3,1: labels 0,1,0 -> plurality 0, one dissenter.
    REQUIRE_THAT(routing_hardness(std::vector<double>{2.4}, ref, 3),
                 WithinAbs(1.0 / 3.0, 1e-12));

    // Permuting the label names changes nothing: the measure only counts
    // disagreement with the local plurality.
    Dataset flipped = ref;
    for (auto& label : flipped.labels) label = 1 - label;
    for (double x : {0.3, 1.7, 2.4, 3.3, 4.9}) {
        REQUIRE(routing_hardness(std::vector<double>{x}, ref, 3) ==
                routing_hardness(std::vector<double>{x}, flipped, 3));
    }
}

TEST_CASE("hybrid routes by thresholded hardness") {
    const Dataset ref = line_dataset({0, 0, 0, 0, 1, 1, 1});
    std::size_t ds_calls = 0;
    const auto ds_route = [&](std::span<const double>) {
        ++ds_calls;
        return 1;
    };

    // tau = 0: nothing satisfies hardness < 0, everything routes dynamic.
    const HybridResult all_ds = hybrid_classify(std::vector<double>{0.1}, ref, 3, 0.0, ds_route);
    REQUIRE(all_ds.route == HybridRoute::DynamicSelection);
    REQUIRE(all_ds.label == 1);
    REQUIRE(ds_calls == 1);

    // tau > 1: hardness never reaches it, everything routes K-NN.
    const HybridResult all_knn =
        hybrid_classify(std::vector<double>{3.6}, ref, 3, 1.5, ds_route);
    REQUIRE(all_knn.route == HybridRoute::Knn);
    REQUIRE(ds_calls == 1);

    // Unanimous easy neighborhood under tau = 0.4: plain K-NN answers.
    const HybridResult easy = hybrid_classify(std::vector<double>{0.1}, ref, 3, 0.4, ds_route);
    REQUIRE(easy.route == HybridRoute::Knn);
    REQUIRE(easy.hardness == 0.0);
    REQUIRE(easy.label == 0);

    // Boundary query at 3.5: neighbors 3,4,2 -> labels 0,1,0, hardness 1/3
    // stays under 0.4 and routes K-NN; with K=7 the whole set votes 4-to-3,
    // hardness 3/7 crosses the threshold and routes dynamic.
    const HybridResult near = hybrid_classify(std::vector<double>{3.5}, ref, 3, 0.4, ds_route);
    REQUIRE(near.route == HybridRoute::Knn);
    const HybridResult split = hybrid_classify(std::vector<double>{3.5}, ref, 7, 0.4, ds_route);
    REQUIRE(split.route == HybridRoute::DynamicSelection);
    REQUIRE_THAT(split.hardness, WithinAbs(3.0 / 7.0, 1e-12));
    REQUIRE(ds_calls == 2);
}

TEST_CASE("friedman average ranks") {
    // Technique A beats B on every dataset: ranks 1.0 and 2.0.
    ResultsTable table;
    table.datasets = {"d1", "d2", "d3"};
    table.techniques = {"a", "b"};
    table.mean = {90.0, 80.0, 85.0, 75.0, 70.0, 60.0};
    table.stddev.assign(6, 0.0);
    const auto ranks = friedman_ranks(table);
    REQUIRE(ranks == std::vector<double>{1.0, 2.0});

    // Exact ties split the positions: both get 1.5.
    ResultsTable tied;
    tied.datasets = {"d1"};
    tied.techniques = {"a", "b"};
    tied.mean = {88.0, 88.0};
    tied.stddev = {0.0, 0.0};
    REQUIRE(friedman_ranks(tied) == std::vector<double>{1.5, 1.5});

    // Ties happen at two-decimal precision, not raw doubles.
    tied.mean = {88.004, 88.001};
    REQUIRE(friedman_ranks(tied) == std::vector<double>{1.5, 1.5});
    tied.mean = {88.006, 88.001};
    REQUIRE(friedman_ranks(tied) == std::vector<double>{1.0, 2.0});

    // Hand-worked 3x3: per-dataset ranks (1,2,3), (2,1,3), (1.5,1.5,3).
    ResultsTable trio;
    trio.datasets = {"d1", "d2", "d3"};
    trio.techniques = {"a", "b", "c"};
    trio.mean = {90, 85, 80, 70, 75, 65, 88, 88, 60};
    trio.stddev.assign(9, 0.0);
    const auto three = friedman_ranks(trio);
    REQUIRE_THAT(three[0], WithinAbs((1.0 + 2.0 + 1.5) / 3.0, 1e-12));
    REQUIRE_THAT(three[1], WithinAbs((2.0 + 1.0 + 1.5) / 3.0, 1e-12));
    REQUIRE_THAT(three[2], WithinAbs(3.0, 1e-12));

    // Rank sums per dataset always total t(t+1)/2.
    Rng rng(11);
    ResultsTable random_table;
    random_table.techniques = {"a", "b", "c", "d", "e"};
    random_table.datasets = {"d1"};
    random_table.mean.resize(5);
    for (int trial = 0; trial < 20; ++trial) {
        for (auto& v : random_table.mean) v = 60.0 + 40.0 * rng.next_double();
        const auto r = friedman_ranks(random_table);
        const double sum = std::accumulate(r.begin(), r.end(), 0.0);
        REQUIRE_THAT(sum, WithinAbs(5.0 * 6.0 / 2.0, 1e-9));
    }

    REQUIRE_THROWS_AS(friedman_ranks(ResultsTable{}), std::runtime_error);
}

TEST_CASE("sign test critical values") {
    REQUIRE(sign_test_critical(30, 0.05) == 20);
    REQUIRE(sign_test_critical(30, 0.01) == 22);
    REQUIRE(sign_test_critical(30, 0.10) == 19);
    REQUIRE(sign_test_critical(1, 0.05) == 2);

    // More comparisons never lower the bar; stricter alpha never lowers it.
    for (std::size_t n = 1; n < 100; ++n) {
        REQUIRE(sign_test_critical(n + 1, 0.05) >= sign_test_critical(n, 0.05));
        REQUIRE(sign_test_critical(n, 0.01) >= sign_test_critical(n, 0.05));
        REQUIRE(sign_test_critical(n, 0.05) >= sign_test_critical(n, 0.10));
        // The bar is always above half and never beyond n+1.
        REQUIRE(sign_test_critical(n, 0.05) > n / 2);
    }

    REQUIRE_THROWS_AS(sign_test_critical(0, 0.05), std::runtime_error);
    REQUIRE_THROWS_AS(sign_test_critical(10, 0.2), std::runtime_error);
}

TEST_CASE("win tie loss tallies") {
    ResultsTable table;
    table.datasets = {"d1", "d2", "d3"};
    table.techniques = {"a", "baseline"};
    table.mean = {
        90.0, 80.0,   // win
        70.0, 70.004, // tie at two decimals
        60.0, 65.0,   // loss
    };
    table.stddev.assign(6, 0.0);

    const auto rows = win_tie_loss(table, "baseline");
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].technique == "a");
    REQUIRE(rows[0].wins == 1);
    REQUIRE(rows[0].ties == 1);
    REQUIRE(rows[0].losses == 1);
    REQUIRE(rows[0].wins + rows[0].ties + rows[0].losses == table.rows());

    // The baseline against itself is all ties.
    REQUIRE(rows[1].technique == "baseline");
    REQUIRE(rows[1].ties == 3);
    REQUIRE(rows[1].wins == 0);
    REQUIRE(rows[1].losses == 0);

    // Antisymmetry: a's wins over the baseline are the baseline's losses
    // against a.
    const auto inverse = win_tie_loss(table, "a");
    REQUIRE(inverse[1].wins == rows[0].losses);
    REQUIRE(inverse[1].losses == rows[0].wins);
    REQUIRE(inverse[1].ties == rows[0].ties);

    REQUIRE_THROWS_AS(win_tie_loss(table, "absent"), std::runtime_error);
}
