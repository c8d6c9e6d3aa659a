#include "medpool/cli.hpp"
#include "medpool/errors.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace medpool;
using namespace medpool::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = fs::path(MEDPOOL_FIXTURE_DIR) / "patient_delay_fixture.csv";

const ApproachResult& result_for(const RunReport& report, Approach approach) {
    return *std::find_if(report.results.begin(), report.results.end(),
                         [&](const ApproachResult& r) { return r.approach == approach; });
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("medpool_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("fixture structure", "[cli-io]") {
    const auto studies = parse_study_table_file(kFixture);
    REQUIRE(studies.size() == 50);
    long with_n = 0, spread = 0, quartiles = 0, both = 0;
    for (const auto& s : studies) {
        with_n += s.n.has_value();
        spread += s.has_quartiles() || s.has_range();
        quartiles += s.has_quartiles();
        both += s.has_quartiles() && s.has_range();
        CHECK(s.has_median());
    }
    CHECK(with_n == 49);
    CHECK(spread == 34);
    CHECK(quartiles == 16);
    CHECK(both == 3);
}

TEST_CASE("pool on the fixture", "[cli-io]") {
    const auto studies = parse_study_table_file(kFixture);
    PoolOptions options;
    const auto report = cmd_pool(studies, options, "digest");
    REQUIRE(report.results.size() == 4);
    CHECK(result_for(report, Approach::MM).estimate.k == 50);
    const auto& wm = result_for(report, Approach::WM);
    CHECK(wm.estimate.k == 49);
    REQUIRE(wm.excluded.size() == 1);
    CHECK(wm.excluded[0].reason == ExclusionReason::MissingSize);
    const auto& t1 = result_for(report, Approach::T1_RE);
    CHECK(t1.estimate.k == 34);
    CHECK(t1.excluded.size() == 16);
    REQUIRE(t1.heterogeneity);
    CHECK(t1.heterogeneity->p_value < 1e-4);
    CHECK(t1.heterogeneity->i2 > 90);
    CHECK(report.skew.studies == 16);
    CHECK(report.skew.level.has_value());
    CHECK(report.input_digest == "digest");
    CHECK_FALSE(report.tool_version.empty());
}

TEST_CASE("excluding the dominant study", "[cli-io]") {
    const auto studies = parse_study_table_file(kFixture);
    PoolOptions with, without;
    with.approaches = without.approaches = {Approach::MM, Approach::WM};
    without.exclude = {"outlier"};
    const auto a = cmd_pool(studies, with);
    const auto b = cmd_pool(studies, without);
    CHECK(result_for(a, Approach::WM).estimate.point != result_for(b, Approach::WM).estimate.point);
    const auto& mm = result_for(a, Approach::MM).estimate;
    const double half_width = (mm.ci_high - mm.ci_low) / 2;
    CHECK(std::abs(mm.point - result_for(b, Approach::MM).estimate.point) < half_width);
    CHECK(b.excluded_by_request == std::vector<std::string>{"outlier"});

    PoolOptions unknown;
    unknown.exclude = {"nope"};
    CHECK_THROWS_AS(cmd_pool(studies, unknown), InputError);
}

TEST_CASE("quartile subgroup", "[cli-io]") {
    const auto studies = parse_study_table_file(kFixture);
    PoolOptions options;
    options.subgroup = Subgroup::Q1Q3;
    options.approaches = {Approach::MM, Approach::WM, Approach::T1_FE};
    const auto report = cmd_pool(studies, options);
    std::vector<std::string> expected;
    double total = 0, dominant = 0, dominant_median = 0;
    for (const auto& s : studies) {
        if (!s.has_quartiles()) continue;
        expected.push_back(s.id);
        total += static_cast<double>(*s.n);
        if (static_cast<double>(*s.n) > dominant) {
            dominant = static_cast<double>(*s.n);
            dominant_median = s.quantiles->median;
        }
    }
    for (const auto& r : report.results) {
        CHECK(r.used_ids == expected);
        CHECK(r.excluded.empty());
    }
    CHECK(dominant / total > 0.69);
    CHECK(result_for(report, Approach::WM).estimate.point == dominant_median);
}

TEST_CASE("strict pooling fails loudly", "[cli-io]") {
    const auto studies = parse_study_table_file(kFixture);
    PoolOptions options;
    options.approaches = {Approach::MEANS_FE};
    // No study in the fixture reports a mean, so nothing is eligible.
    CHECK_THROWS_AS(cmd_pool(studies, options), IneligibleStudiesError);

    PoolOptions strict;
    strict.approaches = {Approach::T1_FE};
    strict.strict = true;
    try {
        cmd_pool(studies, strict);
        FAIL("expected IneligibleStudiesError");
    } catch (const IneligibleStudiesError& e) {
        CHECK(e.ids().size() == 16);
    }
}

TEST_CASE("approach names expand with the effect flag", "[cli-io]") {
    CHECK(expand_approach("mm", "both") == std::vector<Approach>{Approach::MM});
    CHECK(expand_approach("t1", "both") == std::vector<Approach>{Approach::T1_FE, Approach::T1_RE});
    CHECK(expand_approach("means", "re") == std::vector<Approach>{Approach::MEANS_RE});
    CHECK(expand_approach("T2_FE", "re") == std::vector<Approach>{Approach::T2_FE});
    CHECK_THROWS_AS(expand_approach("bland", "fe"), InputError);
    CHECK_THROWS_AS(expand_approach("t1", "mixed"), InputError);
}

TEST_CASE("report json", "[cli-io]") {
    const auto studies = parse_study_table_file(kFixture);
    const auto report = cmd_pool(studies, PoolOptions{}, "abc");
    const auto j = nlohmann::json::parse(report_to_json(report));
    CHECK(j["results"].size() == 4);
    CHECK(j["provenance"]["input_digest"] == "abc");
    CHECK(j["results"][1]["excluded"].size() == 1);
    std::ostringstream text;
    print_report(text, report);
    CHECK_THAT(text.str(), Catch::Matchers::ContainsSubstring("T1_RE"));
}

TEST_CASE("simulation settings", "[cli-io]") {
    SimOptions o;
    std::istringstream file("# demo\nreplications = 5\nseed=42\ncombos = 1/4,1/4; 1,4\n"
                            "k_studies = 15\nscenarios = mixed,means\nrecords = true\n");
    load_sim_config(o, file);
    CHECK(o.replications == 5);
    CHECK(o.seed == 42);
    CHECK(o.combos.size() == 2);
    CHECK(o.k_studies == std::vector<int>{15});
    CHECK(o.records);
    CHECK(o.grid().size() == 1 * 2 * 2 * 2 * 2);

    SimOptions back;
    std::istringstream echo(sim_settings_text(o));
    load_sim_config(back, echo);
    CHECK(sim_settings_text(back) == sim_settings_text(o));

    std::istringstream bad("replicates = 3\n");
    CHECK_THROWS_AS(load_sim_config(o, bad), InputError);
    CHECK_THROWS_AS(apply_sim_setting(o, "combos", "1/4"), InputError);
    CHECK_THROWS_AS(apply_sim_setting(o, "replications", "many"), InputError);
    apply_sim_setting(o, "combos", "2,2");
    CHECK_THROWS_AS(o.grid(), InputError);
}

TEST_CASE("simulate writes reproducible outputs", "[cli-io]") {
    SimOptions o;
    o.combos = parse_combos("1/4,1/4");
    o.k_studies = {15};
    o.size_medians = {50};
    o.replications = 10;
    o.seed = 42;
    o.records = true;
    o.output_dir = scratch("sim_a");
    const auto summary = cmd_simulate(o);
    CHECK(summary.configs == 8);
    for (const char* f : {"aggregates.csv", "records.csv", "reporting.csv", "manifest.json"}) {
        CHECK(fs::exists(o.output_dir / f));
    }
    const auto manifest = nlohmann::json::parse(slurp(o.output_dir / "manifest.json"));
    CHECK(manifest["seed"] == 42);

    SimOptions again;
    std::istringstream settings(manifest["settings"].get<std::string>());
    load_sim_config(again, settings);
    again.output_dir = scratch("sim_b");
    cmd_simulate(again);
    CHECK(slurp(o.output_dir / "aggregates.csv") == slurp(again.output_dir / "aggregates.csv"));
    CHECK(slurp(o.output_dir / "records.csv") == slurp(again.output_dir / "records.csv"));

    const auto agg = read_csv_file(o.output_dir / "aggregates.csv");
    CHECK(agg.header.front() == "approach");
    CHECK(agg.rows.size() == summary.cells);
}

TEST_CASE("plot data files", "[cli-io]") {
    SimOptions o;
    o.combos = parse_combos("1/4,1/4");
    o.k_studies = {15};
    o.size_medians = {50};
    o.replications = 5;
    o.output_dir = scratch("plot_sim");
    cmd_simulate(o);

    const auto report_path = scratch("plot_report");
    fs::create_directories(report_path);
    {
        const auto studies = parse_study_table_file(kFixture);
        std::ofstream out(report_path / "report.json");
        out << report_to_json(cmd_pool(studies, PoolOptions{}));
    }

    PlotdataInputs in;
    in.aggregates = o.output_dir / "aggregates.csv";
    in.table = kFixture;
    in.report = report_path / "report.json";
    in.output_dir = scratch("plot_out");
    const auto files = cmd_plotdata(in);
    CHECK(files.size() == 4);

    const auto coverage = read_csv_file(in.output_dir / "coverage_by_skew.csv");
    CHECK(coverage.header[0] == "approach");
    CHECK(coverage.header[6] == "coverage");

    const auto by_skew = read_csv_file(in.output_dir / "interaction_by_skew.csv");
    const auto c_metric = by_skew.column("metric"), c_log = by_skew.column("log_scale");
    for (const auto& row : by_skew.rows) {
        if (row[c_metric] == "ape" || row[c_metric] == "mse") CHECK(row[c_log] == "true");
        if (row[c_metric] == "pe") CHECK(row[c_log] == "false");
    }

    const auto forest = read_csv_file(in.output_dir / "forest.csv");
    const auto c_type = forest.column("row_type"), c_spread = forest.column("spread_type");
    int study_rows = 0, q1q3 = 0, pooled = 0;
    for (const auto& row : forest.rows) {
        if (row[c_type] == "study") {
            ++study_rows;
            q1q3 += row[c_spread] == "q1q3";
            CHECK((row[c_spread] == "q1q3" || row[c_spread] == "minmax"));
        } else {
            ++pooled;
        }
    }
    CHECK(study_rows == 34);
    CHECK(q1q3 == 16);
    CHECK(pooled == 4);

    PlotdataInputs missing;
    CHECK_THROWS_AS(cmd_plotdata(missing), InputError);
    missing.aggregates = scratch("nowhere") / "aggregates.csv";
    CHECK_THROWS_AS(cmd_plotdata(missing), InputError);
}
