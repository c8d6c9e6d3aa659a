#include "medpool/pooling.hpp"

#include "medpool/errors.hpp"
#include "medpool/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace medpool {

Target target_of(Approach approach) {
    return approach == Approach::MM || approach == Approach::WM ? Target::Median : Target::Mean;
}

bool is_random_effects(Approach approach) {
    return approach == Approach::T1_RE || approach == Approach::T2_RE ||
           approach == Approach::MEANS_RE;
}

bool is_inverse_variance(Approach approach) {
    return target_of(approach) == Target::Mean;
}

std::string_view to_string(Approach approach) {
    switch (approach) {
        case Approach::T1_FE: return "T1_FE";
        case Approach::T1_RE: return "T1_RE";
        case Approach::T2_FE: return "T2_FE";
        case Approach::T2_RE: return "T2_RE";
        case Approach::MEANS_FE: return "MEANS_FE";
        case Approach::MEANS_RE: return "MEANS_RE";
        case Approach::MM: return "MM";
        case Approach::WM: return "WM";
    }
    return "unknown";
}

std::string_view to_string(Target target) {
    return target == Target::Mean ? "mean" : "median";
}

std::optional<Approach> parse_approach(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (Approach a : kAllApproaches) {
        if (to_string(a) == upper) return a;
    }
    return std::nullopt;
}

std::string_view describe(ExclusionReason reason) {
    switch (reason) {
        case ExclusionReason::NoCenter: return "no median or mean reported";
        case ExclusionReason::MissingSize: return "number of subjects not reported";
        case ExclusionReason::MissingMeanSe: return "mean and standard error not reported";
        case ExclusionReason::NoUsableSpread: return "no mean+se and no usable quartiles or range";
    }
    return "unknown";
}

namespace {

void check_inputs(std::span<const double> effects, std::span<const double> variances) {
    if (effects.empty()) throw std::invalid_argument("pooling: no studies");
    if (effects.size() != variances.size()) {
        throw std::invalid_argument("pooling: effects and variances differ in length");
    }
    for (double v : variances) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("pooling: variances must be positive and finite");
        }
    }
}

struct WeightedFit {
    double point;
    double sum_w;
};

WeightedFit weighted_mean(std::span<const double> effects, std::span<const double> variances,
                          double tau2) {
    double sum_w = 0.0;
    double sum_wy = 0.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        const double w = 1.0 / (variances[i] + tau2);
        sum_w += w;
        sum_wy += w * effects[i];
    }
    return {sum_wy / sum_w, sum_w};
}

double cochran_q(std::span<const double> effects, std::span<const double> variances,
                 double fixed_point) {
    double q = 0.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        const double d = effects[i] - fixed_point;
        q += d * d / variances[i];
    }
    return q;
}

double i_squared(double q, std::size_t k) {
    if (k < 2 || q <= 0.0) return 0.0;
    return std::max(0.0, (q - static_cast<double>(k - 1)) / q) * 100.0;
}

PooledEstimate finish(Target target, double point, double se, std::size_t k) {
    PooledEstimate out;
    out.target = target;
    out.point = point;
    out.se = se;
    out.ci_low = point - stats::kZ975 * se;
    out.ci_high = point + stats::kZ975 * se;
    out.k = k;
    return out;
}

double ci_half_width_position(std::size_t k) {
    return std::min(0.5, stats::kZ975 / (2.0 * std::sqrt(static_cast<double>(k))));
}

}  // namespace

PooledEstimate pool_fixed(std::span<const double> effects, std::span<const double> variances) {
    check_inputs(effects, variances);
    const auto fit = weighted_mean(effects, variances, 0.0);
    auto out = finish(Target::Mean, fit.point, std::sqrt(1.0 / fit.sum_w), effects.size());
    const double q = cochran_q(effects, variances, fit.point);
    out.q_stat = q;
    out.i2 = i_squared(q, effects.size());
    return out;
}

double dl_tau2(std::span<const double> effects, std::span<const double> variances) {
    check_inputs(effects, variances);
    if (effects.size() < 2) throw std::invalid_argument("dl_tau2: need at least two studies");

    const auto fit = weighted_mean(effects, variances, 0.0);
    double sum_w2 = 0.0;
    for (double v : variances) sum_w2 += 1.0 / (v * v);
    const double q = cochran_q(effects, variances, fit.point);
    const double denom = fit.sum_w - sum_w2 / fit.sum_w;
    return std::max(0.0, (q - static_cast<double>(effects.size() - 1)) / denom);
}

PooledEstimate pool_random(std::span<const double> effects, std::span<const double> variances) {
    check_inputs(effects, variances);
    if (effects.size() < 2) {
        throw std::invalid_argument("pool_random: need at least two studies");
    }
    const double tau2 = dl_tau2(effects, variances);
    const auto fit = weighted_mean(effects, variances, tau2);
    auto out = finish(Target::Mean, fit.point, std::sqrt(1.0 / fit.sum_w), effects.size());

    const auto fixed = weighted_mean(effects, variances, 0.0);
    const double q = cochran_q(effects, variances, fixed.point);
    out.tau2 = tau2;
    out.q_stat = q;
    out.i2 = i_squared(q, effects.size());
    return out;
}

PooledEstimate pool_median_mm(std::span<const double> medians) {
    if (medians.empty()) throw std::invalid_argument("pool_median_mm: no studies");
    std::vector<double> sorted(medians.begin(), medians.end());
    std::sort(sorted.begin(), sorted.end());

    const double d = ci_half_width_position(sorted.size());
    PooledEstimate out;
    out.target = Target::Median;
    out.point = stats::sample_quantile(sorted, 0.5);
    out.ci_low = stats::sample_quantile(sorted, 0.5 - d);
    out.ci_high = stats::sample_quantile(sorted, 0.5 + d);
    out.k = sorted.size();
    return out;
}

PooledEstimate pool_median_wm(std::span<const double> medians, std::span<const double> sizes) {
    if (medians.empty()) throw std::invalid_argument("pool_median_wm: no studies");
    for (double n : sizes) {
        if (!(n > 0.0)) throw std::invalid_argument("pool_median_wm: sizes must be positive");
    }
    const stats::WeightedSample sample(medians, sizes);

    const double d = ci_half_width_position(sample.size());
    PooledEstimate out;
    out.target = Target::Median;
    out.point = stats::weighted_quantile(sample, 0.5);
    out.ci_low = stats::weighted_quantile(sample, 0.5 - d);
    out.ci_high = stats::weighted_quantile(sample, 0.5 + d);
    out.k = sample.size();
    return out;
}

double heterogeneity_p_value(double q_stat, std::size_t k) {
    if (k < 2) throw std::invalid_argument("heterogeneity_p_value: need at least two studies");
    const boost::math::chi_squared dist(static_cast<double>(k - 1));
    return boost::math::cdf(boost::math::complement(dist, std::max(0.0, q_stat)));
}

ApproachInputs collect_inputs(std::span<const StudySummary> studies, Approach approach) {
    ApproachInputs in;
    auto exclude = [&](const StudySummary& s, ExclusionReason reason) {
        in.excluded.push_back({s.id, reason});
    };

    for (const auto& s : studies) {
        switch (approach) {
            case Approach::MM:
            case Approach::WM: {
                std::optional<double> center;
                if (s.quantiles) {
                    center = s.quantiles->median;
                } else if (s.mean) {
                    center = s.mean;
                }
                if (!center) {
                    exclude(s, ExclusionReason::NoCenter);
                    break;
                }
                if (approach == Approach::WM) {
                    if (!s.n) {
                        exclude(s, ExclusionReason::MissingSize);
                        break;
                    }
                    in.sizes.push_back(static_cast<double>(*s.n));
                }
                in.effects.push_back(*center);
                in.used_ids.push_back(s.id);
                break;
            }
            case Approach::MEANS_FE:
            case Approach::MEANS_RE: {
                if (!s.has_mean_se()) {
                    exclude(s, ExclusionReason::MissingMeanSe);
                    break;
                }
                in.effects.push_back(*s.mean);
                in.variances.push_back(*s.se * *s.se);
                in.sources.push_back(EstimateSource::Reported);
                in.used_ids.push_back(s.id);
                break;
            }
            default: {
                const auto est = mean_se_for_pooling(s);
                if (!est) {
                    exclude(s, s.n ? ExclusionReason::NoUsableSpread : ExclusionReason::MissingSize);
                    break;
                }
                in.effects.push_back(est->mean);
                in.variances.push_back(est->se * est->se);
                in.sources.push_back(est->source);
                in.used_ids.push_back(s.id);
                break;
            }
        }
    }
    return in;
}

PooledEstimate pool_inputs(const ApproachInputs& inputs, Approach approach) {
    const std::size_t k = inputs.effects.size();
    if (k == 0) {
        throw IneligibleStudiesError(std::string("no eligible studies for ") +
                                     std::string(to_string(approach)));
    }
    switch (approach) {
        case Approach::MM:
            return pool_median_mm(inputs.effects);
        case Approach::WM:
            return pool_median_wm(inputs.effects, inputs.sizes);
        default:
            if (is_random_effects(approach)) {
                if (k < 2) {
                    throw IneligibleStudiesError(std::string(to_string(approach)) +
                                                 " needs at least two eligible studies");
                }
                return pool_random(inputs.effects, inputs.variances);
            }
            return pool_fixed(inputs.effects, inputs.variances);
    }
}

PooledEstimate apply_approach(std::span<const StudySummary> studies, Approach approach) {
    if (studies.empty()) throw std::invalid_argument("apply_approach: no studies");
    const auto inputs = collect_inputs(studies, approach);

    std::vector<std::string> unusable;
    for (const auto& ex : inputs.excluded) {
        const bool wm_missing_n =
            approach == Approach::WM && ex.reason == ExclusionReason::MissingSize;
        if (!wm_missing_n) unusable.push_back(ex.id);
    }
    if (!unusable.empty()) {
        std::string what = std::string(to_string(approach)) + " cannot use " +
                           std::to_string(unusable.size()) + " stud" +
                           (unusable.size() == 1 ? "y" : "ies") + ":";
        for (const auto& id : unusable) what += " " + id;
        throw IneligibleStudiesError(what, std::move(unusable));
    }
    return pool_inputs(inputs, approach);
}

}  // namespace medpool
