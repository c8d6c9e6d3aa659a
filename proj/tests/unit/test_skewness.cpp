#include "medpool/stats.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>

using namespace medpool::stats;

TEST_CASE("bowley skewness", "[stat-core]") {
    CHECK(bowley_skewness(1, 2, 3) == 0.0);
    CHECK(bowley_skewness(1, 1, 3) == 1.0);
    CHECK(bowley_skewness(1, 3, 3) == -1.0);
    CHECK(bowley_skewness(0, 1, 4) == 0.5);
    CHECK_THROWS_AS(bowley_skewness(2, 2, 2), std::domain_error);
    CHECK_THROWS_AS(bowley_skewness(3, 2, 1), std::invalid_argument);
}

TEST_CASE("bowley skewness is affine invariant", "[stat-core]") {
    const double base = bowley_skewness(0.5, 1.25, 4.0);
    CHECK(bowley_skewness(3 * 0.5 + 7, 3 * 1.25 + 7, 3 * 4.0 + 7) == Catch::Approx(base));
}

TEST_CASE("skew level bins", "[stat-core]") {
    CHECK(classify_skew(-0.3) == SkewLevel::Low);
    CHECK(classify_skew(0.1) == SkewLevel::Low);
    CHECK(classify_skew(0.1000001) == SkewLevel::Medium);
    CHECK(classify_skew(0.2) == SkewLevel::Medium);
    CHECK(classify_skew(0.3) == SkewLevel::High);
    CHECK(classify_skew(0.4) == SkewLevel::High);
    CHECK(classify_skew(0.41) == SkewLevel::VeryHigh);
}

TEST_CASE("skew level names round-trip", "[stat-core]") {
    for (SkewLevel level : kSkewLevels) CHECK(parse_skew_level(to_string(level)) == level);
    CHECK_FALSE(parse_skew_level("extreme"));
}
