// Shapiro-Wilk W test for complete samples following Royston (1995),
// Algorithm AS R94: polynomial approximations for the extreme coefficients
// and a normalizing transform of W for the p-value.

#include "medpool/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace medpool::stats {

namespace {

// c[0] + c[1] x + c[2] x^2 + ...
template <std::size_t N>
double poly(const std::array<double, N>& c, double x) {
    double result = 0.0;
    for (std::size_t i = N; i-- > 0;) {
        result = result * x + c[i];
    }
    return result;
}

constexpr std::array<double, 6> kC1{0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
constexpr std::array<double, 6> kC2{0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
constexpr std::array<double, 4> kC3{0.544, -0.39978, 0.025054, -6.714e-4};
constexpr std::array<double, 4> kC4{1.3822, -0.77857, 0.062767, -0.0020322};
constexpr std::array<double, 4> kC5{-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr std::array<double, 3> kC6{-0.4803, -0.082676, 0.0030302};
constexpr std::array<double, 2> kG{-2.273, 0.459};

// Coefficients a_1..a_{n/2} for the lower half (applied to x_(n+1-i) - x_(i)).
std::vector<double> coefficients(std::size_t n) {
    const std::size_t half = n / 2;
    std::vector<double> a(half);
    if (n == 3) {
        a[0] = std::numbers::sqrt2 / 2.0;
        return a;
    }

    const double an = static_cast<double>(n);
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
        summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);

    const double a1 = poly(kC1, rsn) - m[0] / ssumm2;
    std::size_t first_scaled;
    double fac;
    if (n > 5) {
        const double a2 = -m[1] / ssumm2 + poly(kC2, rsn);
        fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                        (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
        a[1] = a2;
        first_scaled = 2;
    } else {
        fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
        first_scaled = 1;
    }
    a[0] = a1;
    for (std::size_t i = first_scaled; i < half; ++i) {
        a[i] = -m[i] / fac;
    }
    return a;
}

}  // namespace

ShapiroWilkResult shapiro_wilk(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 3 || n > 5000) {
        throw std::invalid_argument("shapiro_wilk: sample size must be between 3 and 5000");
    }

    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    if (x.back() - x.front() <= 0.0) {
        throw std::invalid_argument("shapiro_wilk: constant sample");
    }

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);

    const auto a = coefficients(n);
    double numerator = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        numerator += a[i] * (x[n - 1 - i] - x[i]);
    }
    double w = std::min(1.0, numerator * numerator / ss);

    if (n == 3) {
        // Exact distribution for n = 3.
        constexpr double six_over_pi = 6.0 / std::numbers::pi;
        const double p = six_over_pi * (std::asin(std::sqrt(w)) - std::numbers::pi / 3.0);
        return {w, std::max(p, 0.0)};
    }

    const double an = static_cast<double>(n);
    double y = std::log1p(-w);
    double mu;
    double sigma;
    if (n <= 11) {
        const double gamma = poly(kG, an);
        if (y >= gamma) {
            return {w, 1e-99};
        }
        y = -std::log(gamma - y);
        mu = poly(kC3, an);
        sigma = std::exp(poly(kC4, an));
    } else {
        const double ln_n = std::log(an);
        mu = poly(kC5, ln_n);
        sigma = std::exp(poly(kC6, ln_n));
    }
    return {w, normal_sf((y - mu) / sigma)};
}

}  // namespace medpool::stats
