#include "medpool/estimators.hpp"
#include "medpool/stats.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace medpool;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("t1 estimate", "[estimators]") {
    const auto e = t1_estimate(100, 2, 5, 8);
    CHECK_THAT(e.mean, WithinAbs(5.0, 1e-12));
    const double ratio = (0.75 * 100 - 0.125) / (100 + 0.25);
    CHECK_THAT(e.sd, WithinAbs(6.0 / (2 * stats::normal_quantile(ratio)), 1e-12));
    CHECK_THAT(e.se, WithinAbs(e.sd / 10.0, 1e-12));
    CHECK(e.source == EstimateSource::T1);

    // Large n: the argument tends to 0.75.
    const auto big = t1_estimate(100000000, 2, 5, 8);
    CHECK_THAT(big.sd, WithinAbs(6.0 / 1.3489795003921634, 1e-6));

    CHECK_THROWS_AS(t1_estimate(100, 3, 3, 3), std::invalid_argument);
    CHECK_THROWS_AS(t1_estimate(1, 2, 5, 8), std::invalid_argument);
    CHECK_THROWS_AS(t1_estimate(10, 5, 2, 8), std::invalid_argument);
}

TEST_CASE("t2 estimate", "[estimators]") {
    const auto e = t2_estimate(100, 0, 5, 10);
    CHECK_THAT(e.mean, WithinAbs(5.0, 1e-12));
    const double z = stats::normal_quantile(99.625 / 100.25);
    CHECK_THAT(z, WithinAbs(2.498, 1e-3));
    CHECK_THAT(e.sd, WithinAbs(10.0 / (2 * z), 1e-12));
    CHECK(e.source == EstimateSource::T2);

    const double a = 3.5, b = -2.0;
    CHECK_THAT(t2_estimate(50, a * 1 + b, a * 2 + b, a * 9 + b).mean,
               WithinAbs(a * t2_estimate(50, 1, 2, 9).mean + b, 1e-12));

    CHECK_THROWS_AS(t2_estimate(100, 4, 4, 4), std::invalid_argument);
    CHECK_THROWS_AS(t2_estimate(1, 0, 5, 10), std::invalid_argument);
}

TEST_CASE("phi inverse argument of t1 increases towards 0.75", "[estimators]") {
    double prev = 0.0;
    for (long n = 2; n < 5000; ++n) {
        const double r = (0.75 * n - 0.125) / (n + 0.25);
        CHECK(r > prev);
        CHECK(r < 0.75);
        prev = r;
    }
}

TEST_CASE("estimator means stay inside the supplied summaries", "[estimators]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> q{u(rng), u(rng), u(rng)};
        std::sort(q.begin(), q.end());
        if (q[2] == q[0]) continue;
        const auto e1 = t1_estimate(30, q[0], q[1], q[2]);
        const auto e2 = t2_estimate(30, q[0], q[1], q[2]);
        CHECK(e1.mean >= q[0]);
        CHECK(e1.mean <= q[2]);
        CHECK(e2.mean >= q[0]);
        CHECK(e2.mean <= q[2]);
        CHECK(e1.sd > 0);
        CHECK(e2.sd > 0);
    }
}

TEST_CASE("t1 sd is consistent for normal data", "[estimators]") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> z;
    std::vector<double> x(1000);
    double sum = 0;
    for (int t = 0; t < 1000; ++t) {
        for (double& v : x) v = z(rng);
        std::sort(x.begin(), x.end());
        sum += t1_estimate(1000, stats::sample_quantile(x, 0.25), stats::sample_quantile(x, 0.5),
                           stats::sample_quantile(x, 0.75))
                   .sd;
    }
    CHECK_THAT(sum / 1000, WithinAbs(1.0, 0.02));
}

TEST_CASE("t1 and t2 means are unbiased for normal data", "[estimators]") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> z;
    for (int n : {50, 200, 1000}) {
        std::vector<double> x(n);
        double b1 = 0, b2 = 0;
        const int reps = 10000;
        for (int t = 0; t < reps; ++t) {
            for (double& v : x) v = z(rng);
            const auto s = summarize_sample(x, "s");
            const auto& q = *s.quantiles;
            b1 += t1_estimate(n, *q.q1, q.median, *q.q3).mean;
            b2 += t2_estimate(n, *q.min, q.median, *q.max).mean;
        }
        CHECK(std::abs(b1 / reps) < 0.02);
        CHECK(std::abs(b2 / reps) < 0.02);
    }
}

TEST_CASE("mean and se for pooling follow the reporting precedence", "[estimators]") {
    StudySummary reported{"a", 100, 4.0, 0.5, std::nullopt};
    auto e = mean_se_for_pooling(reported);
    REQUIRE(e);
    CHECK(e->source == EstimateSource::Reported);
    CHECK(e->mean == 4.0);
    CHECK(e->se == 0.5);

    StudySummary both{"b", 100, std::nullopt, std::nullopt, QuantileSummary{0, 2, 5, 8, 30}};
    e = mean_se_for_pooling(both);
    REQUIRE(e);
    CHECK(e->source == EstimateSource::T1);
    CHECK_THAT(e->mean, WithinAbs(5.0, 1e-12));

    StudySummary range{"c", 100, std::nullopt, std::nullopt,
                       QuantileSummary{0, std::nullopt, 5, std::nullopt, 10}};
    e = mean_se_for_pooling(range);
    REQUIRE(e);
    CHECK(e->source == EstimateSource::T2);

    StudySummary bare{"d", 100, std::nullopt, std::nullopt, QuantileSummary{}};
    CHECK_FALSE(mean_se_for_pooling(bare));
    StudySummary no_n{"e", std::nullopt, std::nullopt, std::nullopt,
                      QuantileSummary{0, 2, 5, 8, 30}};
    CHECK_FALSE(mean_se_for_pooling(no_n));
}

TEST_CASE("summarize sample", "[estimators]") {
    const std::vector<double> three{3, 1, 2};
    const auto s = summarize_sample(three, "x");
    CHECK(s.id == "x");
    CHECK(*s.n == 3);
    CHECK(*s.mean == 2.0);
    CHECK_THAT(*s.se, WithinAbs(1.0 / std::sqrt(3.0), 1e-15));
    CHECK(s.quantiles->median == 2.0);
    CHECK(*s.quantiles->min == 1.0);
    CHECK(*s.quantiles->max == 3.0);

    const std::vector<double> four{1, 2, 3, 4};
    const auto f = summarize_sample(four, "y");
    CHECK(*f.quantiles->q1 == 1.75);
    CHECK(*f.quantiles->q3 == 3.25);

    const std::vector<double> flat{2, 2, 2};
    CHECK_FALSE(summarize_sample(flat, "z").se);
    const std::vector<double> one{1};
    CHECK_THROWS_AS(summarize_sample(one, "w"), std::invalid_argument);
}

TEST_CASE("study summary validation", "[estimators]") {
    StudySummary ok{"a", 10, std::nullopt, std::nullopt, QuantileSummary{1, 2, 3, 4, 5}};
    CHECK_NOTHROW(ok.validate());
    StudySummary misordered{"b", 10, std::nullopt, std::nullopt,
                            QuantileSummary{std::nullopt, 4, 3, 5, std::nullopt}};
    CHECK_THROWS_AS(misordered.validate(), std::invalid_argument);
    StudySummary empty{"c", 10, std::nullopt, std::nullopt, std::nullopt};
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
    StudySummary bad_se{"d", 10, 1.0, 0.0, std::nullopt};
    CHECK_THROWS_AS(bad_se.validate(), std::invalid_argument);
    StudySummary bad_n{"e", 0, 1.0, 1.0, std::nullopt};
    CHECK_THROWS_AS(bad_n.validate(), std::invalid_argument);
}
