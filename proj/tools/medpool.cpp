#include "medpool/cli.hpp"
#include "medpool/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace medpool;

namespace {

int run_pool(const std::string& table_path, const std::vector<std::string>& approach_names,
             const std::string& effect, const std::vector<std::string>& exclude,
             const std::string& subgroup, bool strict, bool json, const std::string& report_path) {
    std::ifstream in(table_path, std::ios::binary);
    if (!in) throw InputError("cannot open " + table_path);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    std::istringstream table(bytes.str());
    const auto studies = cli::parse_study_table(table);

    cli::PoolOptions options;
    for (const auto& name : approach_names) {
        for (Approach a : cli::expand_approach(name, effect)) options.approaches.push_back(a);
    }
    options.exclude = exclude;
    auto group = cli::parse_subgroup(subgroup);
    if (!group) throw InputError("--subgroup must be all, q1q3 or minmax");
    options.subgroup = *group;
    options.strict = strict;

    const auto report = cli::cmd_pool(studies, options, cli::digest_hex(bytes.str()));
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw InputError("cannot write " + report_path);
        out << cli::report_to_json(report) << '\n';
    }
    if (json) {
        std::cout << cli::report_to_json(report) << '\n';
    } else {
        cli::print_report(std::cout, report);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pool medians and means across studies; rerun the simulation grid."};
    app.set_version_flag("--version", MEDPOOL_VERSION);
    app.require_subcommand(1);

    // pool
    auto* pool = app.add_subcommand("pool", "Pool a study table");
    std::string table_path, effect = "both", subgroup = "all", report_path;
    std::vector<std::string> approaches, exclude;
    bool strict = false, json = false;
    pool->add_option("table", table_path, "Study table (id,n,mean,se,min,q1,median,q3,max)")
        ->required();
    pool->add_option("-a,--approach", approaches,
                     "mm, wm, t1, t2, means, or an explicit name such as t1_re (repeatable)");
    pool->add_option("--effect", effect, "fe, re or both, for t1/t2/means")
        ->check(CLI::IsMember({"fe", "re", "both"}));
    pool->add_option("--exclude", exclude, "Study id to leave out (repeatable)");
    pool->add_option("--subgroup", subgroup, "all, q1q3 or minmax")
        ->check(CLI::IsMember({"all", "q1q3", "minmax"}));
    pool->add_flag("--strict", strict, "Fail if an approach cannot use every study");
    pool->add_flag("--json", json, "Print the report as JSON");
    pool->add_option("--report", report_path, "Also write the JSON report to this file");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run the simulation grid");
    std::string config_path, combos, k_list, size_list, steps, scenarios, output_dir;
    std::optional<int> replications;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    bool records = false;
    simulate->add_option("-c,--config", config_path, "key=value config file");
    simulate->add_option("--k-studies", k_list, "e.g. 15,50");
    simulate->add_option("--size-median", size_list, "e.g. 50,100");
    simulate->add_option("--combos", combos, "tau2,sigma2 pairs separated by ';', e.g. \"1/4,1/4\"");
    simulate->add_option("--scaling-steps", steps, "mean_is_5,median_is_5");
    simulate->add_option("--scenarios", scenarios,
                         "medians_q1q3,medians_minmax,means,mixed");
    simulate->add_option("-r,--replications", replications, "Data sets per design point");
    simulate->add_option("-s,--seed", seed, "Master seed");
    simulate->add_option("-o,--output-dir", output_dir, "Output directory");
    simulate->add_option("-j,--workers", workers, "Worker threads");
    simulate->add_flag("--records", records, "Also write per-data-set records.csv");

    // plotdata
    auto* plotdata = app.add_subcommand("plotdata", "Write plot-ready data files");
    std::string agg_path, forest_table, forest_report, plot_dir = "plot_data";
    plotdata->add_option("--aggregates", agg_path, "aggregates.csv from simulate");
    plotdata->add_option("--table", forest_table, "Study table for the forest data");
    plotdata->add_option("--report", forest_report, "JSON report from pool --report");
    plotdata->add_option("-o,--output-dir", plot_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*pool) {
            return run_pool(table_path, approaches, effect, exclude, subgroup, strict, json,
                            report_path);
        }
        if (*simulate) {
            cli::SimOptions options;
            if (!config_path.empty()) cli::load_sim_config_file(options, config_path);
            auto set = [&](std::string_view key, const std::string& value) {
                if (!value.empty()) cli::apply_sim_setting(options, key, value);
            };
            set("k_studies", k_list);
            set("size_median", size_list);
            set("combos", combos);
            set("scaling_steps", steps);
            set("scenarios", scenarios);
            set("output_dir", output_dir);
            if (replications) set("replications", std::to_string(*replications));
            if (seed) set("seed", std::to_string(*seed));
            if (workers) set("workers", std::to_string(*workers));
            if (records) options.records = true;

            const auto summary = cli::cmd_simulate(options);
            std::cout << summary.configs << " configs, " << summary.datasets << " data sets, "
                      << summary.cells << " cells in " << summary.elapsed_seconds << " s -> "
                      << options.output_dir.string() << '\n';
            return 0;
        }
        if (*plotdata) {
            cli::PlotdataInputs inputs;
            if (!agg_path.empty()) inputs.aggregates = agg_path;
            if (!forest_table.empty()) inputs.table = forest_table;
            if (!forest_report.empty()) inputs.report = forest_report;
            inputs.output_dir = plot_dir;
            for (const auto& path : cli::cmd_plotdata(inputs)) std::cout << path.string() << '\n';
            return 0;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const IneligibleStudiesError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
