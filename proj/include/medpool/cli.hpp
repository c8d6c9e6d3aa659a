#pragma once

#include "medpool/estimators.hpp"
#include "medpool/pooling.hpp"
#include "medpool/simulation.hpp"
#include "medpool/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace medpool::cli {

// ---- CSV plumbing ----

/// Shortest round-trip decimal, dot separator regardless of locale.
std::string format_number(double value);
std::string format_optional(const std::optional<double>& value);  // "NA" when empty

/// Splits one CSV line; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_field(std::string_view text);

/// Strict full-string parse; nullopt on anything but a finite number.
std::optional<double> parse_number(std::string_view text);

/// Header plus rows, every row as long as the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws InputError when absent.
    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string digest_hex(std::string_view bytes);

// ---- study tables ----

inline constexpr std::string_view kStudyColumns[] = {"id", "n",      "mean", "se", "min",
                                                     "q1", "median", "q3",   "max"};

/// Reads a study table with the canonical header (column order free, extra
/// columns ignored, empty cell = absent). Throws InputError naming the data
/// row (1-based, header excluded) of the first problem found.
std::vector<StudySummary> parse_study_table(std::istream& in);
std::vector<StudySummary> parse_study_table_file(const std::filesystem::path& path);

/// Writes the canonical header and one row per study; parse_study_table
/// reads it back unchanged.
void serialize_study_table(std::ostream& out, std::span<const StudySummary> studies);

// ---- pool ----

enum class Subgroup { All, Q1Q3, MinMax };
std::optional<Subgroup> parse_subgroup(std::string_view text);
std::string_view to_string(Subgroup subgroup);

/// True when the study belongs to the subgroup: Q1Q3 = reports quartiles;
/// MinMax = reports a range and no quartiles.
bool in_subgroup(const StudySummary& study, Subgroup subgroup);

struct PoolOptions {
    std::vector<Approach> approaches;  // empty = MM, WM, T1_FE, T1_RE
    std::vector<std::string> exclude;
    Subgroup subgroup = Subgroup::All;
    bool strict = false;  // any study an approach cannot use is an error
};

/// Expands a user approach name: mm, wm, t1, t2, means (each expanded by
/// `effect` = fe, re or both) or an explicit name such as t1_re.
std::vector<Approach> expand_approach(std::string_view name, std::string_view effect);

struct Heterogeneity {
    double q_stat;
    double tau2;
    double i2;
    double p_value;
};

struct ApproachResult {
    Approach approach;
    PooledEstimate estimate;
    std::vector<std::string> used_ids;
    std::vector<StudyExclusion> excluded;
    std::optional<Heterogeneity> heterogeneity;  // inverse-variance approaches with k >= 2
};

struct SkewReport {
    std::size_t studies = 0;  // quartile-reporting studies with a nonzero IQR
    std::optional<double> mean_skb;
    std::optional<stats::SkewLevel> level;
};

struct RunReport {
    std::vector<ApproachResult> results;
    SkewReport skew;
    Subgroup subgroup = Subgroup::All;
    std::vector<std::string> excluded_by_request;
    std::size_t table_rows = 0;
    std::string input_digest;
    std::string tool_version;
};

/// Pools `studies` with every requested approach. Throws InputError for an
/// --exclude id not in the table and IneligibleStudiesError when an approach
/// has nothing to pool (or, with `strict`, any unusable study).
RunReport cmd_pool(std::span<const StudySummary> studies, const PoolOptions& options,
                   std::string input_digest = {});

std::string report_to_json(const RunReport& report);
void print_report(std::ostream& out, const RunReport& report);

// ---- simulate ----

struct SimOptions {
    std::vector<int> k_studies{15, 50};
    std::vector<int> size_medians{50, 100};
    std::vector<sim::VariancePair> combos;  // empty = all standard pairs
    std::vector<sim::ScalingStep> steps{sim::kScalingSteps[0], sim::kScalingSteps[1]};
    std::vector<sim::Scenario> scenarios{sim::kScenarios[0], sim::kScenarios[1],
                                         sim::kScenarios[2], sim::kScenarios[3]};
    int replications = 1000;
    std::uint64_t seed = 20240101;
    std::filesystem::path output_dir = "sim_out";
    unsigned workers = 1;
    bool records = false;

    std::vector<sim::SimConfig> grid() const;
};

/// Applies one `key = value` setting. Throws InputError on an unknown key or bad value.
void apply_sim_setting(SimOptions& options, std::string_view key, std::string_view value);

/// Reads a flat key=value file ('#' starts a comment) on top of `options`.
void load_sim_config(SimOptions& options, std::istream& in);
void load_sim_config_file(SimOptions& options, const std::filesystem::path& path);

/// "1/4,1/4;1,4" -> pairs.
std::vector<sim::VariancePair> parse_combos(std::string_view text);

/// The settings as a key=value text that load_sim_config reads back to the same options.
std::string sim_settings_text(const SimOptions& options);

CsvTable aggregates_table(std::span<const sim::AggregateCell> cells);
CsvTable records_table(std::span<const sim::PerformanceRecord> records);
CsvTable reporting_table(std::span<const sim::ReportingTally> tallies);

struct SimulateSummary {
    std::size_t configs = 0;
    std::size_t datasets = 0;
    std::size_t cells = 0;
    double elapsed_seconds = 0.0;
};

/// Runs the grid and writes aggregates.csv, reporting.csv, manifest.json and,
/// when requested, records.csv into options.output_dir.
SimulateSummary cmd_simulate(const SimOptions& options);

// ---- plotdata ----

struct PlotdataInputs {
    std::optional<std::filesystem::path> aggregates;  // aggregates.csv
    std::optional<std::filesystem::path> table;       // study table, for the forest file
    std::optional<std::filesystem::path> report;      // JSON pool report, for the forest file
    std::filesystem::path output_dir = "plot_data";
};

/// Writes interaction_by_skew.csv, interaction_by_tau2.csv and
/// coverage_by_skew.csv from aggregates, and forest.csv from a study table
/// (plus pooled rows from a report, when given). Returns the files written.
std::vector<std::filesystem::path> cmd_plotdata(const PlotdataInputs& inputs);

}  // namespace medpool::cli
