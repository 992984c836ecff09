#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "dfdr/data.hpp"
#include "dfdr/error.hpp"

using namespace dfdr;

namespace {

DataMatrix parse(const std::string& matrix, const std::string& labels) {
    std::istringstream m(matrix), l(labels);
    return read_matrix(m, l);
}

const char* kLabels = "s1\tA\ns2\tA\ns3\tB\ns4\tB\n";

}  // namespace

TEST_CASE("read_matrix: small TSV") {
    const auto x = parse("gene\ts1\ts2\ts3\ts4\ng1\t1\t2\t3\t4\ng2\t-1\t0.5\t2e3\t7\ng3\t0\t0\t0\t1\n", kLabels);
    CHECK(x.features() == 3);
    CHECK(x.subjects() == 4);
    CHECK(x.group_sizes() == std::map<std::string, Index>{{"A", 2}, {"B", 2}});
    CHECK(x.values(1, 2) == 2000.0);
    CHECK(x.feature_ids[2] == "g3");
    CHECK(x.columns_in("B") == std::vector<Index>{2, 3});
}

TEST_CASE("read_matrix: errors") {
    SUBCASE("ragged row names its line") {
        try {
            parse("id\ts1\ts2\ts3\ts4\ng1\t1\t2\t3\t4\ng2\t1\t2\t3\n", kLabels);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("duplicate feature ID") {
        try {
            parse("id\ts1\ts2\ts3\ts4\ng1\t1\t2\t3\t4\ng1\t1\t2\t3\t4\n", kLabels);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("'g1'") != std::string::npos);
        }
    }
    SUBCASE("duplicate subject ID") {
        CHECK_THROWS_AS(parse("id\ts1\ts1\ts3\ts4\ng1\t1\t2\t3\t4\n", kLabels), ValidationError);
    }
    SUBCASE("missing label") {
        CHECK_THROWS_AS(parse("id\ts1\ts2\ts3\ts5\ng1\t1\t2\t3\t4\n", kLabels), ValidationError);
    }
    SUBCASE("non-numeric, NA and blank cells") {
        CHECK_THROWS_AS(parse("id\ts1\ts2\ts3\ts4\ng1\t1\tx\t3\t4\n", kLabels), ParseError);
        CHECK_THROWS_AS(parse("id\ts1\ts2\ts3\ts4\ng1\t1\tNA\t3\t4\n", kLabels), ParseError);
        CHECK_THROWS_AS(parse("id\ts1\ts2\ts3\ts4\ng1\t1\t\t3\t4\n", kLabels), ParseError);
    }
    SUBCASE("no features") { CHECK_THROWS_AS(parse("id\ts1\ts2\ts3\ts4\n", kLabels), ValidationError); }
}

TEST_CASE("preprocess: median normalization then signed log") {
    DataMatrix x;
    x.values.resize(3, 2);
    x.values << 2, -1, 4, std::numbers::e - 1.0, 6, -2;
    x.feature_ids = {"a", "b", "c"};
    x.subject_ids = {"s1", "s2"};
    x.labels = {"A", "B"};
    const auto y = preprocess(x);
    // column 0: median 4 -> [0.5, 1.0, 1.5]
    CHECK(y.values(0, 0) == doctest::Approx(std::log1p(0.5)).epsilon(1e-15));
    CHECK(y.values(1, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(y.values(2, 0) == doctest::Approx(std::log1p(1.5)).epsilon(1e-15));
    // column 1: median -1 (negative medians are allowed)
    CHECK(y.values(1, 1) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(y.values(0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(y.feature_ids == x.feature_ids);
    CHECK(y.labels == x.labels);
}

TEST_CASE("signed_log1p: fixed points and odd symmetry") {
    Eigen::ArrayXd v(4);
    v << std::numbers::e - 1.0, -(std::numbers::e - 1.0), 0.0, 3.5;
    const Eigen::ArrayXd out = signed_log1p(v);
    CHECK(out(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out(1) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(out(2) == 0.0);
    const Eigen::ArrayXd mirrored = signed_log1p(Eigen::ArrayXd(-v));
    CHECK((mirrored == -out).all());
}

TEST_CASE("preprocess: properties on random matrices") {
    Eigen::MatrixXd values = Eigen::MatrixXd::Random(7, 5) * 100.0;
    DataMatrix x{values, {"a", "b", "c", "d", "e", "f", "g"}, {"1", "2", "3", "4", "5"}, {"A", "A", "B", "B", "B"}};
    const auto y = preprocess(x);
    DataMatrix neg = x;
    neg.values = -x.values;
    const auto y_neg = preprocess(neg);
    // x / median is unchanged by negating the column (and its median), so the output is too.
    CHECK(y_neg.values.isApprox(y.values));
    for (Index j = 0; j < 5; ++j) {
        Eigen::VectorXd col = x.values.col(j);
        std::sort(col.data(), col.data() + col.size());
        const double median = col(3);
        for (Index i = 0; i < 7; ++i) {
            const double ratio = x.values(i, j) / median;
            CHECK((ratio > 0) == (y.values(i, j) > 0));
            CHECK((ratio < 0) == (y.values(i, j) < 0));
        }
    }
    CHECK(y.values.rows() == 7);
    CHECK(y.subject_ids == x.subject_ids);
}

TEST_CASE("preprocess: zero median names the subject") {
    DataMatrix x{Eigen::MatrixXd(3, 2), {"a", "b", "c"}, {"s1", "s2"}, {"A", "B"}};
    x.values << 1, 0, 2, 0, 3, 5;
    try {
        (void)preprocess(x);
        FAIL("expected PreprocessError");
    } catch (const PreprocessError& e) {
        CHECK(std::string(e.what()).find("'s2'") != std::string::npos);
    }
}
