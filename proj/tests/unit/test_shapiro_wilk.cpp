#include "medpool/stats.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

using namespace medpool::stats;
using Catch::Matchers::WithinAbs;

// Reference values from scipy.stats.shapiro (single-precision Fortran swilk,
// hence the loose tolerances).
TEST_CASE("shapiro-wilk against a reference implementation", "[stat-core]") {
    std::vector<double> ramp(10);
    std::iota(ramp.begin(), ramp.end(), 1.0);
    auto r = shapiro_wilk(ramp);
    CHECK_THAT(r.w, WithinAbs(0.9701646110856056, 2e-6));
    CHECK_THAT(r.p_value, WithinAbs(0.8923673061902978, 2e-5));
    CHECK(r.p_value > 0.05);

    const std::vector<double> twelve{2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8, 3.9, 4.1, 3.0, 2.2, 6.5};
    r = shapiro_wilk(twelve);
    CHECK_THAT(r.w, WithinAbs(0.9328631005448977, 2e-6));
    CHECK_THAT(r.p_value, WithinAbs(0.41144983167297666, 2e-5));

    const std::vector<double> three{1, 2, 4};
    r = shapiro_wilk(three);
    CHECK_THAT(r.w, WithinAbs(0.9642857142857142, 1e-9));
    CHECK_THAT(r.p_value, WithinAbs(0.6368868450289689, 1e-6));

    std::vector<double> expo(25);
    for (int i = 0; i < 25; ++i) expo[i] = std::exp(-2.0 + 4.0 * i / 24.0);
    r = shapiro_wilk(expo);
    CHECK_THAT(r.w, WithinAbs(0.8094700505076746, 2e-6));
    CHECK_THAT(r.p_value, WithinAbs(0.00032844423267456034, 2e-6));
}

TEST_CASE("shapiro-wilk input checks", "[stat-core]") {
    const std::vector<double> two{1, 2}, flat{3, 3, 3, 3};
    CHECK_THROWS_AS(shapiro_wilk(two), std::invalid_argument);
    CHECK_THROWS_AS(shapiro_wilk(flat), std::invalid_argument);
    CHECK_THROWS_AS(shapiro_wilk(std::vector<double>(5001, 1.0)), std::invalid_argument);
}

TEST_CASE("shapiro-wilk calibration and power", "[stat-core]") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> z;
    const int reps = 10000;
    int reject_normal = 0, reject_lognormal = 0;
    std::vector<double> x(100);
    for (int t = 0; t < reps; ++t) {
        for (double& v : x) v = z(rng);
        reject_normal += shapiro_wilk(x).p_value < 0.05;
        for (double& v : x) v = std::exp(z(rng));
        reject_lognormal += shapiro_wilk(x).p_value < 0.05;
    }
    CHECK_THAT(reject_normal / double(reps), WithinAbs(0.05, 0.01));
    CHECK(reject_lognormal / double(reps) > 0.99);
}
