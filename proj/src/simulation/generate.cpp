#include "medpool/simulation.hpp"

#include <cmath>
#include <string>

namespace medpool::sim {

namespace {

using Unit = std::normal_distribution<double>;

int draw_size(int size_median, Rng& rng, Unit& z) {
    const int upper = size_median <= 50 ? 100 : 500;
    const double log_median = std::log(static_cast<double>(size_median));
    for (;;) {
        const double n = std::round(std::exp(log_median + z(rng)));
        if (n >= 25.0 && n <= upper) return static_cast<int>(n);
    }
}

}  // namespace

double draw_outcome(double m_scale, double random_effect, double sigma, Rng& rng, Unit& unit) {
    return m_scale * std::exp(random_effect + sigma * unit(rng));
}

int draw_study_size(int size_median, Rng& rng) {
    Unit z;
    return draw_size(size_median, rng, z);
}

double compute_scale_m(ScalingStep step, double tau2, double sigma2) {
    if (step == ScalingStep::MedianIs5) return kTargetValue;
    return kTargetValue * std::exp(-(tau2 + sigma2) / 2.0);
}

TruthPair true_values(ScalingStep step, double tau2, double sigma2) {
    const double m = compute_scale_m(step, tau2, sigma2);
    return {m * std::exp((tau2 + sigma2) / 2.0), m};
}

GeneratedDataset generate_dataset(const SimConfig& config, Rng& rng) {
    GeneratedDataset data;
    data.config = config;
    data.m_scale = compute_scale_m(config.scaling_step, config.tau2, config.sigma2);
    const double tau = std::sqrt(config.tau2);
    const double sigma = std::sqrt(config.sigma2);
    Unit z;

    data.studies.reserve(config.k_studies);
    for (int i = 0; i < config.k_studies; ++i) {
        GeneratedStudy study;
        study.random_effect = tau * z(rng);
        const int n = draw_size(config.size_median, rng, z);
        study.raw.resize(n);
        for (double& x : study.raw) {
            x = draw_outcome(data.m_scale, study.random_effect, sigma, rng, z);
        }
        study.summary = summarize_sample(study.raw, "study" + std::to_string(i + 1));
        data.studies.push_back(std::move(study));
    }
    return data;
}

std::vector<StudySummary> assign_reporting(const GeneratedDataset& dataset, Scenario scenario,
                                           Rng& rng) {
    std::vector<StudySummary> out;
    out.reserve(dataset.studies.size());
    std::bernoulli_distribution coin(0.5);

    auto medians_with = [](const StudySummary& full, bool quartiles) {
        StudySummary s;
        s.id = full.id;
        s.n = full.n;
        QuantileSummary q;
        q.median = full.quantiles->median;
        if (quartiles) {
            q.q1 = full.quantiles->q1;
            q.q3 = full.quantiles->q3;
        } else {
            q.min = full.quantiles->min;
            q.max = full.quantiles->max;
        }
        s.quantiles = q;
        return s;
    };
    auto means_only = [](const StudySummary& full) {
        StudySummary s;
        s.id = full.id;
        s.n = full.n;
        s.mean = full.mean;
        s.se = full.se;
        return s;
    };

    for (const auto& study : dataset.studies) {
        const StudySummary& full = study.summary;
        switch (scenario) {
            case Scenario::AllMediansQ1Q3: out.push_back(medians_with(full, true)); break;
            case Scenario::AllMediansMinMax: out.push_back(medians_with(full, false)); break;
            case Scenario::AllMeans: out.push_back(means_only(full)); break;
            case Scenario::Mixed: {
                bool normal = false;
                if (full.se) {
                    normal = stats::shapiro_wilk(study.raw).p_value >= kNormalityAlpha;
                }
                // A constant sample has no se and falls through to the median report.
                if (normal) {
                    out.push_back(means_only(full));
                } else {
                    out.push_back(medians_with(full, coin(rng)));
                }
                break;
            }
        }
    }
    return out;
}

std::optional<double> mean_bowley_skewness(const GeneratedDataset& dataset) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& study : dataset.studies) {
        const auto& q = *study.summary.quantiles;
        if (!(*q.q3 > *q.q1)) continue;
        sum += stats::bowley_skewness(*q.q1, q.median, *q.q3);
        ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

}  // namespace medpool::sim
