#include "medpool/errors.hpp"
#include "medpool/simulation.hpp"

#include <cmath>
#include <stdexcept>

namespace medpool::sim {

std::vector<Approach> approaches_for(Scenario scenario) {
    switch (scenario) {
        case Scenario::AllMediansQ1Q3:
            return {Approach::MM, Approach::WM, Approach::T1_FE, Approach::T1_RE};
        case Scenario::AllMediansMinMax:
            return {Approach::MM, Approach::WM, Approach::T2_FE, Approach::T2_RE};
        case Scenario::AllMeans:
            return {Approach::MM, Approach::WM, Approach::MEANS_FE, Approach::MEANS_RE};
        case Scenario::Mixed:
            // T1 and T2 dispatch identically once a study reports one spread type.
            return {Approach::MM, Approach::WM, Approach::T1_FE, Approach::T1_RE};
    }
    return {};
}

std::vector<PerformanceRecord> evaluate_dataset(std::span<const StudySummary> reported,
                                                const TruthPair& truth,
                                                std::span<const Approach> approaches,
                                                const SimConfig& config, int dataset_index,
                                                double mean_skb) {
    std::vector<PerformanceRecord> out;
    out.reserve(approaches.size());
    for (Approach approach : approaches) {
        PooledEstimate est;
        try {
            est = apply_approach(reported, approach);
        } catch (const std::exception&) {
            continue;
        }
        PerformanceRecord r;
        r.approach = approach;
        r.scenario = config.scenario;
        r.k_studies = config.k_studies;
        r.size_median = config.size_median;
        r.tau2 = config.tau2;
        r.sigma2 = config.sigma2;
        r.dataset_index = dataset_index;
        r.estimate = est.point;
        r.ci_low = est.ci_low;
        r.ci_high = est.ci_high;
        r.truth = target_of(approach) == Target::Mean ? truth.true_mean : truth.true_median;
        r.pe = (r.estimate - r.truth) / r.truth * 100.0;
        r.ape = std::abs(r.pe);
        r.sq_err = (r.estimate - r.truth) * (r.estimate - r.truth);
        r.covered = r.ci_low <= r.truth && r.truth <= r.ci_high;
        r.mean_skb = mean_skb;
        r.skew_level = stats::classify_skew(mean_skb);
        r.i2 = est.i2;
        r.tau2_hat = est.tau2;
        out.push_back(r);
    }
    return out;
}

}  // namespace medpool::sim
