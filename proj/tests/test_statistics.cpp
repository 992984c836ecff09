#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "dfdr/error.hpp"
#include "dfdr/random.hpp"
#include "dfdr/statistics.hpp"

using namespace dfdr;

namespace {

DataMatrix two_groups(const Eigen::MatrixXd& values, Index n_a) {
    DataMatrix x;
    x.values = values;
    for (Index i = 0; i < values.rows(); ++i) x.feature_ids.push_back("f" + std::to_string(i));
    for (Index j = 0; j < values.cols(); ++j) {
        x.subject_ids.push_back("s" + std::to_string(j));
        x.labels.push_back(j < n_a ? "A" : "B");
    }
    return x;
}

// Textbook Welch statistic, written out with plain loops.
double welch_oracle(const std::vector<double>& a, const std::vector<double>& b) {
    auto mean = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    auto var = [&](const std::vector<double>& v) {
        const double mu = mean(v);
        double s = 0;
        for (double x : v) s += (x - mu) * (x - mu);
        return s / static_cast<double>(v.size() - 1);
    };
    return std::abs(mean(a) - mean(b)) /
           std::sqrt(var(a) / static_cast<double>(a.size()) + var(b) / static_cast<double>(b.size()));
}

}  // namespace

TEST_CASE("two_sample_abs_t: worked example") {
    Eigen::MatrixXd v(1, 6);
    v << 1, 2, 3, 3, 4, 5;
    const auto t = two_sample_abs_t(two_groups(v, 3), "A", "B");
    CHECK(t(0) == doctest::Approx(2.449490).epsilon(1e-6));
    CHECK(t(0) == doctest::Approx(welch_oracle({1, 2, 3}, {3, 4, 5})).epsilon(1e-14));
}

TEST_CASE("two_sample_abs_t: zero standard error") {
    Eigen::MatrixXd v(3, 4);
    v << 1, 2, 1, 2,  // equal means, positive variance
        5, 5, 5, 5,   // identical constant rows: 0
        1, 1, 2, 2;   // different constants: +inf
    const auto t = two_sample_abs_t(two_groups(v, 2), "A", "B");
    CHECK(t(0) == 0.0);
    CHECK(t(1) == 0.0);
    CHECK(std::isinf(t(2)));
}

TEST_CASE("two_sample_abs_t: unequal group sizes match the oracle") {
    Rng rng(7);
    Eigen::MatrixXd v(5, 9);
    for (Index i = 0; i < v.size(); ++i) v.data()[i] = rng.normal();
    const auto t = two_sample_abs_t(two_groups(v, 4), "A", "B");
    REQUIRE(t.size() == 5);
    for (Index i = 0; i < 5; ++i) {
        std::vector<double> a, b;
        for (Index j = 0; j < 9; ++j) (j < 4 ? a : b).push_back(v(i, j));
        CHECK(t(i) == doctest::Approx(welch_oracle(a, b)).epsilon(1e-13));
    }
}

TEST_CASE("two_sample_abs_t: symmetric in the groups and scale invariant per feature") {
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        Eigen::MatrixXd v(4, 7);
        for (Index i = 0; i < v.size(); ++i) v.data()[i] = rng.normal() * 3.0 + 1.0;
        const auto x = two_groups(v, 3);
        const auto t = two_sample_abs_t(x, "A", "B");
        CHECK((two_sample_abs_t(x, "B", "A") - t).cwiseAbs().maxCoeff() < 1e-12);
        auto scaled = x;
        scaled.values.row(2) *= 1000.0;
        scaled.values.row(0) *= 0.01;
        CHECK((two_sample_abs_t(scaled, "A", "B") - t).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("two_sample_abs_t: errors") {
    Eigen::MatrixXd v = Eigen::MatrixXd::Ones(2, 4);
    const auto x = two_groups(v, 2);
    CHECK_THROWS_AS(two_sample_abs_t(x, "A", "C"), ValidationError);
    const auto small = two_groups(v, 1);
    CHECK_THROWS_AS(two_sample_abs_t(small, "A", "B"), ValidationError);
}

TEST_CASE("validate_pvalues") {
    const std::vector<double> ok{0.01, 0.5, 1.0};
    CHECK(validate_pvalues(ok).tests() == 3);
    const std::vector<double> zeros{0, 0, 0};
    CHECK(validate_pvalues(zeros).values.sum() == 0.0);
    const std::vector<double> bad{-0.1};
    try {
        (void)validate_pvalues(bad);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("index 0") != std::string::npos);
    }
    const std::vector<double> nan{0.2, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(validate_pvalues(nan), ValidationError);
}
