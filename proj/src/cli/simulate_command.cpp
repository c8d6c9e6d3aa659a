#include "medpool/cli.hpp"
#include "medpool/errors.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>

namespace medpool::cli {

namespace {

std::string str(auto value) { return std::string(to_string(value)); }

}  // namespace

CsvTable aggregates_table(std::span<const sim::AggregateCell> cells) {
    CsvTable t;
    t.header = {"approach", "target",  "scenario", "k_studies", "size_median", "tau2",
                "skew_level", "observed", "n_datasets", "ape_med",  "ape_q1",     "ape_q3",
                "pe_med",   "pe_q1",   "pe_q3",    "mse_med",   "mse_q1",      "mse_q3",
                "coverage", "mean_i2", "mean_tau2"};
    for (const auto& c : cells) {
        auto v = [&](double x) { return c.observed ? format_number(x) : std::string("NA"); };
        t.rows.push_back({str(c.approach), str(target_of(c.approach)), str(c.scenario),
                          std::to_string(c.k_studies), std::to_string(c.size_median),
                          sim::variance_label(c.tau2), str(c.skew_level),
                          c.observed ? "true" : "false", std::to_string(c.n_datasets),
                          v(c.ape_med), v(c.ape_q1), v(c.ape_q3), v(c.pe_med), v(c.pe_q1),
                          v(c.pe_q3), v(c.mse_med), v(c.mse_q1), v(c.mse_q3), v(c.coverage),
                          format_optional(c.mean_i2), format_optional(c.mean_tau2)});
    }
    return t;
}

CsvTable records_table(std::span<const sim::PerformanceRecord> records) {
    CsvTable t;
    t.header = {"approach", "scenario", "k_studies", "size_median", "tau2",     "sigma2",
                "dataset_index", "estimate", "ci_low", "ci_high",     "truth",    "pe",
                "ape",      "sq_err",   "covered",   "mean_skb",    "skew_level", "i2",
                "tau2_hat"};
    for (const auto& r : records) {
        t.rows.push_back({str(r.approach), str(r.scenario), std::to_string(r.k_studies),
                          std::to_string(r.size_median), sim::variance_label(r.tau2),
                          sim::variance_label(r.sigma2), std::to_string(r.dataset_index),
                          format_number(r.estimate), format_number(r.ci_low),
                          format_number(r.ci_high), format_number(r.truth), format_number(r.pe),
                          format_number(r.ape), format_number(r.sq_err),
                          r.covered ? "true" : "false", format_number(r.mean_skb),
                          str(r.skew_level), format_optional(r.i2), format_optional(r.tau2_hat)});
    }
    return t;
}

CsvTable reporting_table(std::span<const sim::ReportingTally> tallies) {
    CsvTable t;
    t.header = {"k_studies", "size_median",    "tau2",           "sigma2",
                "skew_level", "studies", "median_reports", "median_fraction"};
    for (const auto& r : tallies) {
        t.rows.push_back({std::to_string(r.k_studies), std::to_string(r.size_median),
                          sim::variance_label(r.tau2), sim::variance_label(r.sigma2),
                          str(r.skew_level), std::to_string(r.studies),
                          std::to_string(r.median_reports),
                          format_number(static_cast<double>(r.median_reports) /
                                        static_cast<double>(r.studies))});
    }
    return t;
}

SimulateSummary cmd_simulate(const SimOptions& options) {
    const auto grid = options.grid();
    std::error_code ec;
    std::filesystem::create_directories(options.output_dir, ec);
    if (ec) {
        throw InputError("cannot create output directory " + options.output_dir.string() + ": " +
                         ec.message());
    }

    const auto start = std::chrono::steady_clock::now();
    const auto result = sim::run_grid(grid, {options.workers, options.records});
    SimulateSummary summary;
    summary.configs = grid.size();
    summary.datasets = result.datasets;
    summary.cells = result.cells.size();
    summary.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::vector<std::string> files{"aggregates.csv", "reporting.csv"};
    write_csv_file(options.output_dir / "aggregates.csv", aggregates_table(result.cells));
    write_csv_file(options.output_dir / "reporting.csv", reporting_table(result.reporting));
    if (options.records) {
        write_csv_file(options.output_dir / "records.csv", records_table(result.records));
        files.push_back("records.csv");
    }

    nlohmann::ordered_json m;
    m["tool"] = "medpool";
    m["tool_version"] = MEDPOOL_VERSION;
    m["seed"] = options.seed;
    m["replications"] = options.replications;
    m["settings"] = sim_settings_text(options);
    m["rng"] = "mt19937_64, one stream per (k, size median, tau2, sigma2, replicate)";
    m["configs"] = summary.configs;
    m["datasets"] = summary.datasets;
    m["cells"] = summary.cells;
    m["elapsed_seconds"] = summary.elapsed_seconds;
    m["files"] = files;

    std::ofstream out(options.output_dir / "manifest.json");
    if (!out) throw InputError("cannot write manifest in " + options.output_dir.string());
    out << m.dump(2) << '\n';
    return summary;
}

}  // namespace medpool::cli
