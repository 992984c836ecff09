#include <doctest.h>

#include <algorithm>
#include <vector>

#include "dfdr/random.hpp"
#include "dfdr/resampling.hpp"

using namespace dfdr;

namespace {

DataMatrix random_matrix(Index m, Index n_a, Index n_b, std::uint64_t seed) {
    Rng rng(seed);
    DataMatrix x;
    x.values.resize(m, n_a + n_b);
    for (Index i = 0; i < x.values.size(); ++i) x.values.data()[i] = rng.normal();
    for (Index i = 0; i < m; ++i) x.feature_ids.push_back("f" + std::to_string(i));
    for (Index j = 0; j < n_a + n_b; ++j) {
        x.subject_ids.push_back("s" + std::to_string(j));
        x.labels.push_back(j < n_a ? "A" : "B");
    }
    return x;
}

}  // namespace

TEST_CASE("permutation_null: identity permutation reproduces the observed statistics") {
    const auto x = random_matrix(6, 4, 5, 3);
    std::vector<std::vector<Index>> identity{{0, 1, 2, 3, 4, 5, 6, 7, 8}};
    const auto null = permutation_null(x, "A", "B", identity);
    const auto observed = two_sample_abs_t(x, "A", "B");
    CHECK(null == observed);
}

TEST_CASE("permutation_null: size, determinism and seed sensitivity") {
    const auto x = random_matrix(3, 3, 3, 5);
    const auto null = permutation_null(x, "A", "B", PermutationPlan{2, 42});
    CHECK(null.size() == 6);
    CHECK(permutation_null(x, "A", "B", PermutationPlan{2, 42}) == null);
    CHECK(draw_permutation({1, 1}, 0, 63) != draw_permutation({1, 2}, 0, 63));
}

TEST_CASE("permutation_null: only columns move") {
    const auto x = random_matrix(4, 3, 4, 9);
    const auto p = draw_permutation({1, 17}, 0, 7);
    std::vector<Index> sorted(p);
    std::sort(sorted.begin(), sorted.end());
    for (Index k = 0; k < 7; ++k) CHECK(sorted[static_cast<std::size_t>(k)] == k);

    // Recomputing with the relabelled subjects by hand gives the same null row.
    std::vector<std::vector<Index>> perms{p};
    const auto null = permutation_null(x, "A", "B", perms);
    Eigen::MatrixXd a(4, 3), b(4, 4);
    for (Index k = 0; k < 7; ++k) (k < 3 ? a.col(k) : b.col(k - 3)) = x.values.col(p[static_cast<std::size_t>(k)]);
    CHECK((null - welch_abs_t(a, b)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("permutation_null: subjects outside the two groups are never used") {
    auto x = random_matrix(5, 3, 3, 21);
    x.values.conservativeResize(Eigen::NoChange, 8);
    x.values.col(6).setConstant(1e6);
    x.values.col(7).setConstant(-1e6);
    x.subject_ids.insert(x.subject_ids.end(), {"c1", "c2"});
    x.labels.insert(x.labels.end(), {"C", "C"});
    const auto null = permutation_null(x, "A", "B", PermutationPlan{20, 3});
    CHECK(null.maxCoeff() < 1e3);
}

TEST_CASE("permutation_statistics: bundles observed and null") {
    const auto x = random_matrix(10, 5, 5, 1);
    const auto stats = permutation_statistics(x, "A", "B", {7, 99});
    CHECK(stats.tests() == 10);
    CHECK(stats.permutations == 7);
    CHECK(stats.null_stats.size() == 70);
    CHECK(stats.null_source(23) == 3);
    CHECK_NOTHROW(stats.validate());
}

TEST_CASE("Rng: bounded draws stay in range and cover it") {
    Rng rng(5);
    std::vector<int> counts(7, 0);
    for (int k = 0; k < 7000; ++k) {
        const auto v = rng.below(7);
        REQUIRE(v < 7);
        ++counts[v];
    }
    for (int c : counts) CHECK(c > 850);
}
