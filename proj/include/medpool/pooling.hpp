#pragma once

#include "medpool/estimators.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace medpool {

enum class Target { Mean, Median };

enum class Approach { T1_FE, T1_RE, T2_FE, T2_RE, MEANS_FE, MEANS_RE, MM, WM };

inline constexpr Approach kAllApproaches[] = {Approach::T1_FE,    Approach::T1_RE, Approach::T2_FE,
                                              Approach::T2_RE,    Approach::MEANS_FE,
                                              Approach::MEANS_RE, Approach::MM,    Approach::WM};

Target target_of(Approach approach);
bool is_random_effects(Approach approach);
bool is_inverse_variance(Approach approach);
std::string_view to_string(Approach approach);
std::string_view to_string(Target target);
std::optional<Approach> parse_approach(std::string_view text);

/// A pooled estimate with its 95% confidence interval. Heterogeneity fields
/// are filled by the inverse-variance routines only.
struct PooledEstimate {
    Target target = Target::Mean;
    double point = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::optional<double> se;
    std::optional<double> tau2;
    std::optional<double> q_stat;
    std::optional<double> i2;
    std::size_t k = 0;
};

PooledEstimate pool_fixed(std::span<const double> effects, std::span<const double> variances);

/// DerSimonian-Laird moment estimate of the between-study variance.
double dl_tau2(std::span<const double> effects, std::span<const double> variances);

PooledEstimate pool_random(std::span<const double> effects, std::span<const double> variances);

/// Median of the study medians; the CI takes the sample quantiles at
/// 1/2 -/+ min(1/2, z / (2 sqrt(k))).
PooledEstimate pool_median_mm(std::span<const double> medians);

/// Subject-count weighted median of the study medians, with the CI at the
/// same quantile positions as pool_median_mm.
PooledEstimate pool_median_wm(std::span<const double> medians, std::span<const double> sizes);

/// Upper-tail chi-square probability of Cochran's Q on k - 1 degrees of freedom.
double heterogeneity_p_value(double q_stat, std::size_t k);

enum class ExclusionReason { NoCenter, MissingSize, MissingMeanSe, NoUsableSpread };

std::string_view describe(ExclusionReason reason);

/// A study that could not enter a given approach.
struct StudyExclusion {
    std::string id;
    ExclusionReason reason;
};

/// The per-study inputs an approach pools, after the dispatch rules.
struct ApproachInputs {
    std::vector<double> effects;    // means (mean targets) or medians (median targets)
    std::vector<double> variances;  // squared standard errors; inverse-variance approaches only
    std::vector<double> sizes;      // subject counts; WM only
    std::vector<std::string> used_ids;
    std::vector<EstimateSource> sources;  // inverse-variance approaches only
    std::vector<StudyExclusion> excluded;
};

/// Applies the dispatch rules without pooling. Studies that cannot feed the
/// approach land in `excluded` rather than raising:
///  - MM: the reported median, else the reported mean read as a median;
///  - WM: as MM, restricted to studies reporting n;
///  - T1_* / T2_*: reported mean+se as is, otherwise mean_se_for_pooling;
///  - MEANS_*: reported mean+se only.
ApproachInputs collect_inputs(std::span<const StudySummary> studies, Approach approach);

/// Pools `studies` with `approach`. Strict: throws IneligibleStudiesError if
/// any study is unusable, except studies without n under WM, which are
/// dropped. Also throws when nothing (or, for random effects, fewer than two
/// studies) remains.
PooledEstimate apply_approach(std::span<const StudySummary> studies, Approach approach);

/// Pools already-collected inputs.
PooledEstimate pool_inputs(const ApproachInputs& inputs, Approach approach);

}  // namespace medpool
