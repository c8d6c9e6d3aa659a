#include "medpool/estimators.hpp"

#include "medpool/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace medpool {

void QuantileSummary::validate() const {
    // Walk the present values in order and require them to be nondecreasing.
    const std::optional<double> chain[] = {min, q1, median, q3, max};
    std::optional<double> previous;
    for (const auto& value : chain) {
        if (!value) continue;
        if (!std::isfinite(*value)) {
            throw std::invalid_argument("quantile summary contains a non-finite value");
        }
        if (previous && *value < *previous) {
            throw std::invalid_argument("quantile summary violates min <= q1 <= median <= q3 <= max");
        }
        previous = value;
    }
}

void StudySummary::validate() const {
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("study '" + id + "': " + why);
    };
    if (n && *n < 1) fail("n must be at least 1");
    if (se && !(*se > 0.0)) fail("se must be positive");
    if (mean && !std::isfinite(*mean)) fail("mean must be finite");
    if (mean.has_value() != se.has_value() && !quantiles) {
        fail("a mean needs its standard error (and vice versa) when no median is given");
    }
    if (!has_mean_se() && !has_median()) fail("neither mean+se nor a median is reported");
    if (quantiles) {
        try {
            quantiles->validate();
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }
}

std::string_view to_string(EstimateSource source) {
    switch (source) {
        case EstimateSource::T1: return "T1";
        case EstimateSource::T2: return "T2";
        case EstimateSource::Reported: return "reported";
    }
    return "unknown";
}

MeanSdEstimate t1_estimate(long n, double q1, double q2, double q3) {
    if (n < 2) throw std::invalid_argument("t1_estimate: n must be at least 2");
    if (!(q1 <= q2 && q2 <= q3)) throw std::invalid_argument("t1_estimate: quartiles out of order");
    if (q1 == q3) throw std::invalid_argument("t1_estimate: zero interquartile range");

    const double nd = static_cast<double>(n);
    const double mean = (q1 + q2 + q3) / 3.0;
    const double sd = (q3 - q1) / (2.0 * stats::normal_quantile((0.75 * nd - 0.125) / (nd + 0.25)));
    return {mean, sd, sd / std::sqrt(nd), EstimateSource::T1};
}

MeanSdEstimate t2_estimate(long n, double min, double q2, double max) {
    if (n < 2) throw std::invalid_argument("t2_estimate: n must be at least 2");
    if (!(min <= q2 && q2 <= max)) throw std::invalid_argument("t2_estimate: range out of order");
    if (min == max) throw std::invalid_argument("t2_estimate: zero range");

    const double nd = static_cast<double>(n);
    const double mean = (min + 2.0 * q2 + max) / 4.0;
    const double sd = (max - min) / (2.0 * stats::normal_quantile((nd - 0.375) / (nd + 0.25)));
    return {mean, sd, sd / std::sqrt(nd), EstimateSource::T2};
}

std::optional<MeanSdEstimate> mean_se_for_pooling(const StudySummary& study) {
    if (study.has_mean_se()) {
        const double sd = study.n ? *study.se * std::sqrt(static_cast<double>(*study.n)) : *study.se;
        return MeanSdEstimate{*study.mean, sd, *study.se, EstimateSource::Reported};
    }
    if (!study.n || *study.n < 2 || !study.quantiles) {
        return std::nullopt;
    }
    const auto& qs = *study.quantiles;
    if (qs.has_quartiles() && *qs.q1 < *qs.q3) {
        return t1_estimate(*study.n, *qs.q1, qs.median, *qs.q3);
    }
    if (qs.has_range() && *qs.min < *qs.max) {
        return t2_estimate(*study.n, *qs.min, qs.median, *qs.max);
    }
    return std::nullopt;
}

StudySummary summarize_sample(std::span<const double> raw, std::string id) {
    if (raw.size() < 2) {
        throw std::invalid_argument("summarize_sample: need at least two observations");
    }
    std::vector<double> sorted(raw.begin(), raw.end());
    std::sort(sorted.begin(), sorted.end());

    const double nd = static_cast<double>(sorted.size());
    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= nd;
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (nd - 1.0));

    StudySummary summary;
    summary.id = std::move(id);
    summary.n = static_cast<long>(sorted.size());
    summary.mean = mean;
    if (sd > 0.0) summary.se = sd / std::sqrt(nd);

    QuantileSummary qs;
    qs.min = sorted.front();
    qs.q1 = stats::sample_quantile(sorted, 0.25);
    qs.median = stats::sample_quantile(sorted, 0.5);
    qs.q3 = stats::sample_quantile(sorted, 0.75);
    qs.max = sorted.back();
    summary.quantiles = qs;
    return summary;
}

}  // namespace medpool
