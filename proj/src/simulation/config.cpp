#include "medpool/errors.hpp"
#include "medpool/simulation.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>

namespace medpool::sim {

namespace {

// Generator pairs as (tau2, sigma2). With these roles, skew levels below
// "high" do not occur at tau2 = 4 and every skew level occurs at
// tau2 = 1/16 and 1/4, which is the pattern of the published tables.
constexpr std::array<VariancePair, 13> kPairs{{
    {1.0 / 16, 1.0 / 16},
    {1.0 / 4, 1.0 / 16},
    {1.0 / 16, 1.0 / 4},
    {1.0 / 4, 1.0 / 4},
    {1.0, 1.0 / 4},
    {1.0 / 16, 1.0},
    {1.0 / 4, 1.0},
    {1.0, 1.0},
    {4.0, 1.0},
    {1.0 / 16, 4.0},
    {1.0 / 4, 4.0},
    {1.0, 4.0},
    {4.0, 4.0},
}};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::string_view to_string(ScalingStep step) {
    return step == ScalingStep::MeanIs5 ? "mean_is_5" : "median_is_5";
}

std::string_view to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::AllMediansQ1Q3: return "medians_q1q3";
        case Scenario::AllMediansMinMax: return "medians_minmax";
        case Scenario::AllMeans: return "means";
        case Scenario::Mixed: return "mixed";
    }
    return "unknown";
}

std::optional<ScalingStep> parse_scaling_step(std::string_view text) {
    for (ScalingStep s : kScalingSteps) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

std::optional<Scenario> parse_scenario(std::string_view text) {
    for (Scenario s : kScenarios) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

std::span<const VariancePair> standard_variance_pairs() { return kPairs; }

bool is_standard_pair(double tau2, double sigma2) {
    for (const auto& p : kPairs) {
        if (p.tau2 == tau2 && p.sigma2 == sigma2) return true;
    }
    return false;
}

std::string variance_label(double value) {
    if (value == 1.0 / 16) return "1/16";
    if (value == 1.0 / 4) return "1/4";
    if (value == 1.0) return "1";
    if (value == 4.0) return "4";
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), end);
}

double parse_variance(std::string_view text) {
    auto parse_number = [&](std::string_view part) {
        double v = 0.0;
        while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
        while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty()) {
            throw InputError("not a number: '" + std::string(text) + "'");
        }
        return v;
    };
    const auto slash = text.find('/');
    double value;
    if (slash == std::string_view::npos) {
        value = parse_number(text);
    } else {
        const double den = parse_number(text.substr(slash + 1));
        if (den == 0.0) throw InputError("zero denominator in '" + std::string(text) + "'");
        value = parse_number(text.substr(0, slash)) / den;
    }
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw InputError("variance must be finite and nonnegative: '" + std::string(text) + "'");
    }
    return value;
}

void validate_grid_config(const SimConfig& config) {
    if (config.k_studies != 15 && config.k_studies != 50) {
        throw InputError("k_studies must be 15 or 50");
    }
    if (config.size_median != 50 && config.size_median != 100) {
        throw InputError("size_median must be 50 or 100");
    }
    if (!is_standard_pair(config.tau2, config.sigma2)) {
        throw InputError("(tau2, sigma2) = (" + variance_label(config.tau2) + ", " +
                         variance_label(config.sigma2) + ") is not a design pair");
    }
    if (config.replications < 1) throw InputError("replications must be at least 1");
}

std::vector<SimConfig> default_grid(int replications, std::uint64_t seed) {
    std::vector<SimConfig> grid;
    for (int k : {15, 50}) {
        for (int size : {50, 100}) {
            for (const auto& pair : kPairs) {
                for (ScalingStep step : kScalingSteps) {
                    for (Scenario scenario : kScenarios) {
                        grid.push_back({k, size, pair.tau2, pair.sigma2, step, scenario,
                                        replications, seed});
                    }
                }
            }
        }
    }
    return grid;
}

Rng make_stream(const SimConfig& config, int replicate, std::uint64_t purpose) {
    std::uint64_t h = splitmix64(config.seed);
    for (std::uint64_t part :
         {static_cast<std::uint64_t>(config.k_studies), static_cast<std::uint64_t>(config.size_median),
          std::bit_cast<std::uint64_t>(config.tau2), std::bit_cast<std::uint64_t>(config.sigma2),
          static_cast<std::uint64_t>(replicate), purpose}) {
        h = splitmix64(h ^ part);
    }
    return Rng(h);
}

}  // namespace medpool::sim
