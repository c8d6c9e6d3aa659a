#include "medpool/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace medpool::stats {

namespace {

void check_probability(double q) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw std::domain_error("quantile probability must lie in [0, 1]");
    }
}

// Slack when comparing a cumulative weight against an integer rank; absorbs
// the rounding left by normalizing and rescaling the weights.
constexpr double kRankTolerance = 1e-10;

}  // namespace

double sample_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) {
        throw std::invalid_argument("sample_quantile: empty sample");
    }
    check_probability(q);

    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0) {
        return sorted[lo];
    }
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile_of(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    return sample_quantile(values, q);
}

WeightedSample::WeightedSample(std::span<const double> values, std::span<const double> weights) {
    if (values.empty()) {
        throw std::invalid_argument("WeightedSample: empty sample");
    }
    if (values.size() != weights.size()) {
        throw std::invalid_argument("WeightedSample: values and weights differ in length");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("WeightedSample: weights must be finite and nonnegative");
        }
        total += w;
    }
    if (total <= 0.0) {
        throw std::invalid_argument("WeightedSample: all weights are zero");
    }

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    values_.reserve(values.size());
    weights_.reserve(values.size());
    for (std::size_t i : order) {
        values_.push_back(values[i]);
        weights_.push_back(weights[i] / total);
    }
}

double weighted_quantile(const WeightedSample& sample, double q) {
    check_probability(q);

    const auto values = sample.values();
    const auto weights = sample.weights();
    const std::size_t n = values.size();
    const double scale = static_cast<double>(n);

    std::vector<double> cumulative(n);
    double running = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        running += weights[i] * scale;
        cumulative[i] = running;
    }

    // Ordered value holding the weight mass at the centre of unit `rank`,
    // i.e. the first whose cumulative weight reaches rank - 1/2; a centre
    // falling exactly on a boundary takes the midpoint of its two neighbours.
    auto value_at_rank = [&](double rank) {
        const double centre = rank - 0.5;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(),
                                         centre - kRankTolerance);
        if (it == cumulative.end()) {
            return values.back();
        }
        const auto i = static_cast<std::size_t>(it - cumulative.begin());
        if (*it <= centre + kRankTolerance && i + 1 < n) {
            return 0.5 * (values[i] + values[i + 1]);
        }
        return values[i];
    };

    // Same rank arithmetic as sample_quantile so equal weights agree bit for bit.
    const double h = static_cast<double>(n - 1) * q;
    const double low = std::floor(h);
    const double frac = h - low;

    const double lower_value = value_at_rank(low + 1.0);
    if (frac == 0.0 || low + 1.0 >= scale) {
        return lower_value;
    }
    return lower_value + frac * (value_at_rank(low + 2.0) - lower_value);
}

}  // namespace medpool::stats
