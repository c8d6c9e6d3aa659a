#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace medpool {

/// Five-number summary; only the median is mandatory. Present values must
/// be ordered min <= q1 <= median <= q3 <= max.
struct QuantileSummary {
    std::optional<double> min;
    std::optional<double> q1;
    double median = 0.0;
    std::optional<double> q3;
    std::optional<double> max;

    bool has_quartiles() const { return q1.has_value() && q3.has_value(); }
    bool has_range() const { return min.has_value() && max.has_value(); }

    /// Throws std::invalid_argument on an ordering violation.
    void validate() const;
};

/// Aggregates one study reports. `se` is the standard error of the mean.
struct StudySummary {
    std::string id;
    std::optional<long> n;
    std::optional<double> mean;
    std::optional<double> se;
    std::optional<QuantileSummary> quantiles;

    bool has_mean_se() const { return mean.has_value() && se.has_value(); }
    bool has_median() const { return quantiles.has_value(); }
    bool has_quartiles() const { return quantiles && quantiles->has_quartiles(); }
    bool has_range() const { return quantiles && quantiles->has_range(); }

    /// Throws std::invalid_argument naming the study on any invariant breach.
    void validate() const;
};

enum class EstimateSource { T1, T2, Reported };

std::string_view to_string(EstimateSource source);

struct MeanSdEstimate {
    double mean;
    double sd;
    double se;
    EstimateSource source;
};

/// Sample mean and SD from the median, quartiles and sample size, assuming
/// normal data: mean = (q1 + q2 + q3) / 3 and
/// sd = (q3 - q1) / (2 Phi^-1((0.75 n - 0.125) / (n + 0.25))).
MeanSdEstimate t1_estimate(long n, double q1, double q2, double q3);

/// Sample mean from the median and range, (min + 2 q2 + max) / 4, with
/// sd = (max - min) / (2 Phi^-1((n - 0.375) / (n + 0.25))).
MeanSdEstimate t2_estimate(long n, double min, double q2, double max);

/// Mean and standard error a study contributes to inverse-variance pooling:
/// a reported mean+se passes through; otherwise quartiles go through
/// t1_estimate, and only when they are absent does the range go through
/// t2_estimate (a study reporting both keeps its quartiles). Returns nullopt
/// when the study cannot supply either.
std::optional<MeanSdEstimate> mean_se_for_pooling(const StudySummary& study);

/// Full summary of a raw sample: n, mean, se (n - 1 denominator) and the
/// five-number summary with type-7 quartiles. se is left empty for a
/// constant sample. Requires at least two observations.
StudySummary summarize_sample(std::span<const double> raw, std::string id);

}  // namespace medpool
