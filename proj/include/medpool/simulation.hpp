#pragma once

#include "medpool/estimators.hpp"
#include "medpool/pooling.hpp"
#include "medpool/stats.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace medpool::sim {

using Rng = std::mt19937_64;

enum class ScalingStep { MeanIs5, MedianIs5 };
enum class Scenario { AllMediansQ1Q3, AllMediansMinMax, AllMeans, Mixed };

inline constexpr ScalingStep kScalingSteps[] = {ScalingStep::MeanIs5, ScalingStep::MedianIs5};
inline constexpr Scenario kScenarios[] = {Scenario::AllMediansQ1Q3, Scenario::AllMediansMinMax,
                                          Scenario::AllMeans, Scenario::Mixed};

std::string_view to_string(ScalingStep step);
std::string_view to_string(Scenario scenario);
std::optional<ScalingStep> parse_scaling_step(std::string_view text);
std::optional<Scenario> parse_scenario(std::string_view text);

/// Target value of the pooled mean (MeanIs5) or median (MedianIs5).
inline constexpr double kTargetValue = 5.0;

/// Studies whose absolute percent error exceeds this are left out of aggregates.
inline constexpr double kApeCutoff = 500.0;

/// Significance level for the normality test in the mixed-reporting scenario.
inline constexpr double kNormalityAlpha = 0.05;

struct VariancePair {
    double tau2;    // between-study variance of the log-scale random effect
    double sigma2;  // within-study variance on the log scale
};

/// The thirteen design pairs, as used by the generator (see README).
std::span<const VariancePair> standard_variance_pairs();
bool is_standard_pair(double tau2, double sigma2);

/// "1/16", "1/4", "1", "4" for the design values, shortest decimal otherwise.
std::string variance_label(double value);
/// Parses "a/b" or a decimal. Throws InputError.
double parse_variance(std::string_view text);

/// One cell of the simulation grid.
struct SimConfig {
    int k_studies = 50;
    int size_median = 100;
    double tau2 = 0.25;
    double sigma2 = 0.25;
    ScalingStep scaling_step = ScalingStep::MedianIs5;
    Scenario scenario = Scenario::AllMediansQ1Q3;
    int replications = 1000;
    std::uint64_t seed = 20240101;
};

/// Grid membership check (k in {15, 50}, size median in {50, 100}, a
/// standard variance pair, replications >= 1). Throws InputError.
void validate_grid_config(const SimConfig& config);

/// The full 13 x 2 x 2 design crossed with both scaling steps and all four
/// reporting scenarios.
std::vector<SimConfig> default_grid(int replications, std::uint64_t seed);

/// Independent stream for one (design point, replicate). The scaling step and
/// scenario do not enter, so every step and scenario of a replicate sees the
/// same underlying draws.
Rng make_stream(const SimConfig& config, int replicate, std::uint64_t purpose = 0);

/// Study size: round(exp(Normal(log(size_median), 1))) redrawn until it lies
/// in [25, 100] (size_median 50) or [25, 500] (size_median 100).
int draw_study_size(int size_median, Rng& rng);

/// Multiplier m applied to the log-normal outcomes so that the marginal mean
/// (MeanIs5) or marginal median (MedianIs5) equals 5.
double compute_scale_m(ScalingStep step, double tau2, double sigma2);

struct TruthPair {
    double true_mean;
    double true_median;
};

TruthPair true_values(ScalingStep step, double tau2, double sigma2);

/// One subject's outcome m * exp(M + sigma Z), Z drawn from `unit`.
/// generate_dataset draws every subject through this.
double draw_outcome(double m_scale, double random_effect, double sigma, Rng& rng,
                    std::normal_distribution<double>& unit);

struct GeneratedStudy {
    std::vector<double> raw;
    StudySummary summary;
    double random_effect;  // log-scale study effect M_i
};

struct GeneratedDataset {
    std::vector<GeneratedStudy> studies;
    double m_scale;
    SimConfig config;
};

/// Draws M_i ~ Normal(0, tau2) per study, a study size, and outcomes
/// m * exp(M_i + sigma Z). Zero variances are accepted (point masses).
GeneratedDataset generate_dataset(const SimConfig& config, Rng& rng);

/// Redacts every study summary to what the scenario reports. The Mixed
/// scenario runs Shapiro-Wilk on each raw sample: a normal-looking sample
/// reports mean+se, otherwise the median with a fair coin choosing between
/// quartiles and range. `rng` supplies the coins.
std::vector<StudySummary> assign_reporting(const GeneratedDataset& dataset, Scenario scenario,
                                           Rng& rng);

/// Mean Bowley coefficient over studies with a nonzero IQR, taken from the
/// unredacted quartiles. Empty if no study qualifies.
std::optional<double> mean_bowley_skewness(const GeneratedDataset& dataset);

/// Approaches the grid evaluates for a scenario (both targets).
std::vector<Approach> approaches_for(Scenario scenario);

struct PerformanceRecord {
    Approach approach = Approach::MM;
    Scenario scenario = Scenario::AllMediansQ1Q3;
    int k_studies = 0;
    int size_median = 0;
    double tau2 = 0.0;
    double sigma2 = 0.0;
    int dataset_index = 0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double truth = 0.0;
    double pe = 0.0;
    double ape = 0.0;
    double sq_err = 0.0;
    bool covered = false;
    double mean_skb = 0.0;
    stats::SkewLevel skew_level = stats::SkewLevel::Low;
    std::optional<double> i2;
    std::optional<double> tau2_hat;
};

/// Pools `reported` with each approach and scores it against the matching
/// truth (true mean for mean targets, true median for median targets).
/// Approaches that fail produce no record.
std::vector<PerformanceRecord> evaluate_dataset(std::span<const StudySummary> reported,
                                                const TruthPair& truth,
                                                std::span<const Approach> approaches,
                                                const SimConfig& config, int dataset_index,
                                                double mean_skb);

struct AggregateCell {
    Approach approach = Approach::MM;
    Scenario scenario = Scenario::AllMediansQ1Q3;
    int k_studies = 0;
    int size_median = 0;
    double tau2 = 0.0;
    stats::SkewLevel skew_level = stats::SkewLevel::Low;
    bool observed = false;
    std::size_t n_datasets = 0;
    double ape_med = 0, ape_q1 = 0, ape_q3 = 0;
    double pe_med = 0, pe_q1 = 0, pe_q3 = 0;
    double mse_med = 0, mse_q1 = 0, mse_q3 = 0;
    double coverage = 0;
    std::optional<double> mean_i2;
    std::optional<double> mean_tau2;
};

/// Drops records with APE > 500, groups by (approach, scenario, k, size
/// median, tau2, skew level) and summarizes each group. Every skew level of
/// every (approach, scenario, k, size, tau2) present in `records` gets a
/// cell; empty ones are marked unobserved.
std::vector<AggregateCell> aggregate(std::span<const PerformanceRecord> records);

/// Study counts behind the mixed-reporting scenario.
struct ReportingTally {
    int k_studies = 0;
    int size_median = 0;
    double tau2 = 0.0;
    double sigma2 = 0.0;
    stats::SkewLevel skew_level = stats::SkewLevel::Low;
    std::size_t studies = 0;
    std::size_t median_reports = 0;
};

struct RunOptions {
    unsigned workers = 1;
    bool keep_records = false;
};

struct GridResult {
    std::vector<AggregateCell> cells;
    std::vector<PerformanceRecord> records;  // sorted; empty unless keep_records
    std::vector<ReportingTally> reporting;
    std::size_t datasets = 0;
};

/// Runs every config of the grid. Output is identical for any worker count.
GridResult run_grid(std::span<const SimConfig> grid, const RunOptions& options = {});

}  // namespace medpool::sim
