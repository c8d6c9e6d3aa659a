#include "medpool/simulation.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

using namespace medpool;
using namespace medpool::sim;

namespace {

PerformanceRecord record(double pe, stats::SkewLevel level, int index, bool covered = true) {
    PerformanceRecord r;
    r.approach = Approach::MM;
    r.scenario = Scenario::AllMediansQ1Q3;
    r.k_studies = 50;
    r.size_median = 100;
    r.tau2 = 0.25;
    r.sigma2 = 0.25;
    r.dataset_index = index;
    r.truth = 5.0;
    r.estimate = 5.0 * (1 + pe / 100);
    r.pe = pe;
    r.ape = std::abs(pe);
    r.sq_err = (r.estimate - 5.0) * (r.estimate - 5.0);
    r.covered = covered;
    r.skew_level = level;
    return r;
}

const AggregateCell& cell_for(const std::vector<AggregateCell>& cells, stats::SkewLevel level) {
    return *std::find_if(cells.begin(), cells.end(),
                         [&](const AggregateCell& c) { return c.skew_level == level; });
}

}  // namespace

TEST_CASE("single record cells", "[simulation]") {
    const std::vector<PerformanceRecord> recs{record(-4.0, stats::SkewLevel::High, 0)};
    const auto cells = aggregate(recs);
    REQUIRE(cells.size() == 4);
    const auto& c = cell_for(cells, stats::SkewLevel::High);
    CHECK(c.observed);
    CHECK(c.n_datasets == 1);
    CHECK(c.pe_med == -4.0);
    CHECK(c.pe_q1 == -4.0);
    CHECK(c.pe_q3 == -4.0);
    CHECK(c.ape_med == 4.0);
    CHECK(c.coverage == 1.0);
    for (auto level : {stats::SkewLevel::Low, stats::SkewLevel::Medium, stats::SkewLevel::VeryHigh}) {
        CHECK_FALSE(cell_for(cells, level).observed);
        CHECK(cell_for(cells, level).n_datasets == 0);
    }
}

TEST_CASE("records above the error cutoff are dropped", "[simulation]") {
    const std::vector<PerformanceRecord> recs{record(600.0, stats::SkewLevel::Low, 0),
                                              record(10.0, stats::SkewLevel::Medium, 1)};
    const auto cells = aggregate(recs);
    CHECK_FALSE(cell_for(cells, stats::SkewLevel::Low).observed);
    CHECK(cell_for(cells, stats::SkewLevel::Medium).n_datasets == 1);

    // A group whose every record is dropped still yields (unobserved) cells.
    const std::vector<PerformanceRecord> only_bad{record(-700.0, stats::SkewLevel::Low, 0)};
    const auto empty = aggregate(only_bad);
    REQUIRE(empty.size() == 4);
    for (const auto& c : empty) CHECK_FALSE(c.observed);
}

TEST_CASE("cell quartiles and coverage", "[simulation]") {
    std::vector<PerformanceRecord> recs;
    for (int i = 0; i < 4; ++i) recs.push_back(record(i + 1.0, stats::SkewLevel::Low, i, i % 2));
    std::reverse(recs.begin(), recs.end());
    const auto cells = aggregate(recs);
    const auto& c = cell_for(cells, stats::SkewLevel::Low);
    CHECK(c.pe_q1 == 1.75);
    CHECK(c.pe_med == 2.5);
    CHECK(c.pe_q3 == 3.25);
    CHECK(c.coverage == 0.5);
    CHECK(c.pe_q1 <= c.pe_med);
    CHECK(c.mse_q1 <= c.mse_med);
    CHECK(c.mse_med <= c.mse_q3);
}
