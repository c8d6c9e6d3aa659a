#include "medpool/simulation.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <tuple>

namespace medpool::sim {

namespace {

using GroupKey = std::tuple<int, int, int, int, double>;  // approach, scenario, k, size, tau2

GroupKey group_of(const PerformanceRecord& r) {
    return {static_cast<int>(r.approach), static_cast<int>(r.scenario), r.k_studies,
            r.size_median, r.tau2};
}

void summarize(std::vector<double>& v, double& med, double& q1, double& q3) {
    std::sort(v.begin(), v.end());
    q1 = stats::sample_quantile(v, 0.25);
    med = stats::sample_quantile(v, 0.5);
    q3 = stats::sample_quantile(v, 0.75);
}

}  // namespace

std::vector<AggregateCell> aggregate(std::span<const PerformanceRecord> records) {
    // Skew level slots for every group seen, including groups whose records
    // are all filtered out below.
    std::map<GroupKey, std::array<std::vector<const PerformanceRecord*>, 4>> groups;
    for (const auto& r : records) {
        auto& slots = groups[group_of(r)];
        if (r.ape > kApeCutoff) continue;
        slots[static_cast<std::size_t>(r.skew_level)].push_back(&r);
    }

    std::vector<AggregateCell> cells;
    cells.reserve(groups.size() * 4);
    for (auto& [key, slots] : groups) {
        for (stats::SkewLevel level : stats::kSkewLevels) {
            auto& members = slots[static_cast<std::size_t>(level)];
            AggregateCell cell;
            cell.approach = static_cast<Approach>(std::get<0>(key));
            cell.scenario = static_cast<Scenario>(std::get<1>(key));
            cell.k_studies = std::get<2>(key);
            cell.size_median = std::get<3>(key);
            cell.tau2 = std::get<4>(key);
            cell.skew_level = level;
            cell.n_datasets = members.size();
            cell.observed = !members.empty();
            if (cell.observed) {
                // Fixed member order keeps the floating-point sums below bit-stable.
                std::sort(members.begin(), members.end(), [](const auto* a, const auto* b) {
                    return std::tie(a->sigma2, a->dataset_index) <
                           std::tie(b->sigma2, b->dataset_index);
                });
                std::vector<double> ape, pe, se;
                double covered = 0, i2_sum = 0, tau2_sum = 0;
                std::size_t i2_n = 0, tau2_n = 0;
                for (const auto* r : members) {
                    ape.push_back(r->ape);
                    pe.push_back(r->pe);
                    se.push_back(r->sq_err);
                    covered += r->covered ? 1.0 : 0.0;
                    if (r->i2) i2_sum += *r->i2, ++i2_n;
                    if (r->tau2_hat) tau2_sum += *r->tau2_hat, ++tau2_n;
                }
                summarize(ape, cell.ape_med, cell.ape_q1, cell.ape_q3);
                summarize(pe, cell.pe_med, cell.pe_q1, cell.pe_q3);
                summarize(se, cell.mse_med, cell.mse_q1, cell.mse_q3);
                cell.coverage = covered / static_cast<double>(members.size());
                if (i2_n) cell.mean_i2 = i2_sum / static_cast<double>(i2_n);
                if (tau2_n) cell.mean_tau2 = tau2_sum / static_cast<double>(tau2_n);
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

}  // namespace medpool::sim
