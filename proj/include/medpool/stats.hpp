#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace medpool::stats {

/// 0.975 quantile of the standard normal distribution.
inline constexpr double kZ975 = 1.959963984540054;

/// Standard normal CDF, accurate to ~1e-16 absolute (erfc based).
double normal_cdf(double x);

/// Upper tail 1 - normal_cdf(x) without cancellation for large x.
double normal_sf(double x);

/// Inverse of normal_cdf (Wichura's AS 241, PPND16).
/// Throws std::domain_error unless 0 < p < 1.
double normal_quantile(double p);

/// Quantile of an ascending sample by linear interpolation at rank
/// h = (n - 1) q + 1 (the "type 7" definition). Throws on empty input
/// or q outside [0, 1].
double sample_quantile(std::span<const double> sorted, double q);

/// Sorts a copy and evaluates sample_quantile.
double quantile_of(std::vector<double> values, double q);

/// Values with nonnegative weights, stored in ascending value order with
/// the weights normalized to sum to 1.
class WeightedSample {
public:
    WeightedSample(std::span<const double> values, std::span<const double> weights);

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> weights() const noexcept { return weights_; }

private:
    std::vector<double> values_;
    std::vector<double> weights_;
};

/// Weighted quantile. The weights are rescaled to sum to the sample size
/// and accumulated into C_1..C_n; the target rank r = 1 + (n - 1) q is split
/// into j = floor(r) and j + 1, each mapped to the first ordered value whose
/// cumulative weight reaches j - 1/2 (the centre of unit j), and the two are
/// blended by the fractional part of r. With equal weights this is exactly
/// sample_quantile; a value holding most of the weight is returned for every
/// q whose centre falls inside its share.
double weighted_quantile(const WeightedSample& sample, double q);

/// Bowley's quartile skewness (q1 - 2 q2 + q3) / (q3 - q1).
/// Throws std::domain_error when q3 == q1, std::invalid_argument when the
/// quartiles are out of order.
double bowley_skewness(double q1, double q2, double q3);

enum class SkewLevel { Low, Medium, High, VeryHigh };

inline constexpr SkewLevel kSkewLevels[] = {SkewLevel::Low, SkewLevel::Medium,
                                            SkewLevel::High, SkewLevel::VeryHigh};

/// Low <= 0.1 < Medium <= 0.2 < High <= 0.4 < VeryHigh.
SkewLevel classify_skew(double skb);

std::string_view to_string(SkewLevel level);
std::optional<SkewLevel> parse_skew_level(std::string_view text);

struct ShapiroWilkResult {
    double w;
    double p_value;
};

/// Shapiro-Wilk normality test using Royston's approximation (AS R94),
/// valid for 3 <= n <= 5000. Input need not be sorted.
/// Throws std::invalid_argument for n out of range or a constant sample.
ShapiroWilkResult shapiro_wilk(std::span<const double> sample);

}  // namespace medpool::stats
