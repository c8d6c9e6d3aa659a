#include "medpool/cli.hpp"
#include "medpool/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace medpool::cli {

namespace {

struct Metric {
    std::string_view name;
    std::string_view column;
    bool log_by_skew;
    bool log_by_tau2;
};

constexpr Metric kMetrics[] = {
    {"ape", "ape", true, false},
    {"pe", "pe", false, false},
    {"mse", "mse", true, true},
};

void write_interactions(const CsvTable& agg, const std::filesystem::path& dir,
                        std::vector<std::filesystem::path>& written) {
    const auto c_observed = agg.column("observed");
    const std::size_t c_approach = agg.column("approach"), c_scenario = agg.column("scenario"),
                      c_k = agg.column("k_studies"), c_size = agg.column("size_median"),
                      c_tau2 = agg.column("tau2"), c_skew = agg.column("skew_level"),
                      c_n = agg.column("n_datasets"), c_cov = agg.column("coverage");

    CsvTable by_skew, by_tau2, coverage;
    by_skew.header = {"metric", "approach", "scenario", "k_studies", "size_median", "tau2",
                      "skew_level", "median", "q1", "q3", "n_datasets", "log_scale"};
    by_tau2.header = {"metric", "approach", "scenario", "k_studies", "size_median", "skew_level",
                      "tau2", "median", "q1", "q3", "n_datasets", "log_scale"};
    coverage.header = {"approach", "scenario", "k_studies", "size_median", "tau2",
                       "skew_level", "coverage", "n_datasets"};

    for (const auto& m : kMetrics) {
        const std::string base(m.column);
        const auto c_med = agg.column(base + "_med"), c_q1 = agg.column(base + "_q1"),
                   c_q3 = agg.column(base + "_q3");
        for (const auto& row : agg.rows) {
            if (row[c_observed] != "true") continue;
            by_skew.rows.push_back({std::string(m.name), row[c_approach], row[c_scenario], row[c_k],
                                    row[c_size], row[c_tau2], row[c_skew], row[c_med], row[c_q1],
                                    row[c_q3], row[c_n], m.log_by_skew ? "true" : "false"});
            by_tau2.rows.push_back({std::string(m.name), row[c_approach], row[c_scenario], row[c_k],
                                    row[c_size], row[c_skew], row[c_tau2], row[c_med], row[c_q1],
                                    row[c_q3], row[c_n], m.log_by_tau2 ? "true" : "false"});
        }
    }
    for (const auto& row : agg.rows) {
        if (row[c_observed] != "true") continue;
        coverage.rows.push_back({row[c_approach], row[c_scenario], row[c_k], row[c_size],
                                 row[c_tau2], row[c_skew], row[c_cov], row[c_n]});
    }

    for (auto& [name, table] : {std::pair{"interaction_by_skew.csv", &by_skew},
                                std::pair{"interaction_by_tau2.csv", &by_tau2},
                                std::pair{"coverage_by_skew.csv", &coverage}}) {
        write_csv_file(dir / name, *table);
        written.push_back(dir / name);
    }
}

CsvTable forest_table(const std::vector<StudySummary>& studies, const nlohmann::json* report) {
    CsvTable t;
    t.header = {"row_type", "id",       "n",        "spread_type", "median", "lower",
                "upper",    "est_mean", "est_sd",   "est_source",  "k"};
    for (const auto& s : studies) {
        if (!s.has_quartiles() && !s.has_range()) continue;
        const auto& q = *s.quantiles;
        const bool quartiles = s.has_quartiles();
        std::vector<std::string> row{"study",
                                     s.id,
                                     s.n ? std::to_string(*s.n) : "NA",
                                     quartiles ? "q1q3" : "minmax",
                                     format_number(q.median),
                                     format_number(quartiles ? *q.q1 : *q.min),
                                     format_number(quartiles ? *q.q3 : *q.max),
                                     "NA",
                                     "NA",
                                     "NA",
                                     ""};
        StudySummary spread_only = s;
        spread_only.mean.reset();
        spread_only.se.reset();
        try {
            if (auto est = mean_se_for_pooling(spread_only)) {
                row[7] = format_number(est->mean);
                row[8] = format_number(est->sd);
                row[9] = std::string(to_string(est->source));
            }
        } catch (const std::invalid_argument&) {
            // Degenerate spread (zero IQR or range): no transformed estimate.
        }
        t.rows.push_back(std::move(row));
    }
    if (report) {
        for (const auto& r : report->at("results")) {
            t.rows.push_back({"pooled", r.at("approach").get<std::string>(), "NA",
                              r.at("target").get<std::string>(),
                              format_number(r.at("point").get<double>()),
                              format_number(r.at("ci_low").get<double>()),
                              format_number(r.at("ci_high").get<double>()), "NA", "NA", "NA",
                              std::to_string(r.at("k").get<std::size_t>())});
        }
    }
    return t;
}

}  // namespace

std::vector<std::filesystem::path> cmd_plotdata(const PlotdataInputs& inputs) {
    if (!inputs.aggregates && !inputs.table) {
        throw InputError("plotdata needs --aggregates and/or --table");
    }
    if (inputs.report && !inputs.table) throw InputError("--report needs --table");

    // Read everything before creating any output.
    std::optional<CsvTable> agg;
    if (inputs.aggregates) agg = read_csv_file(*inputs.aggregates);
    std::optional<std::vector<StudySummary>> studies;
    if (inputs.table) studies = parse_study_table_file(*inputs.table);
    std::optional<nlohmann::json> report;
    if (inputs.report) {
        std::ifstream in(*inputs.report);
        if (!in) throw InputError("cannot open " + inputs.report->string());
        try {
            report = nlohmann::json::parse(in);
            (void)report->at("results");
        } catch (const nlohmann::json::exception& e) {
            throw InputError("bad report " + inputs.report->string() + ": " + e.what());
        }
    }

    std::error_code ec;
    std::filesystem::create_directories(inputs.output_dir, ec);
    if (ec) throw InputError("cannot create " + inputs.output_dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    if (agg) write_interactions(*agg, inputs.output_dir, written);
    if (studies) {
        try {
            const auto forest = forest_table(*studies, report ? &*report : nullptr);
            write_csv_file(inputs.output_dir / "forest.csv", forest);
        } catch (const nlohmann::json::exception& e) {
            throw InputError("bad report " + inputs.report->string() + ": " + e.what());
        }
        written.push_back(inputs.output_dir / "forest.csv");
    }
    return written;
}

}  // namespace medpool::cli
