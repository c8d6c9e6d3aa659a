#include "medpool/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>
#include <tuple>

namespace medpool::sim {

namespace {

struct Design {
    SimConfig base;  // step and scenario unset
    std::vector<SimConfig> configs;
};

struct UnitResult {
    std::vector<PerformanceRecord> records;
    bool tallied = false;
    stats::SkewLevel level = stats::SkewLevel::Low;
    std::size_t studies = 0;
    std::size_t median_reports = 0;
    std::size_t datasets = 0;
};

using DesignKey = std::tuple<int, int, double, double, std::uint64_t, int>;

std::vector<Design> group_designs(std::span<const SimConfig> grid) {
    std::map<DesignKey, std::size_t> index;
    std::vector<Design> designs;
    for (const auto& c : grid) {
        DesignKey key{c.k_studies, c.size_median, c.tau2, c.sigma2, c.seed, c.replications};
        auto [it, inserted] = index.emplace(key, designs.size());
        if (inserted) designs.push_back({c, {}});
        designs[it->second].configs.push_back(c);
    }
    return designs;
}

UnitResult run_unit(const Design& design, int rep) {
    UnitResult out;
    for (ScalingStep step : kScalingSteps) {
        const Target target = step == ScalingStep::MeanIs5 ? Target::Mean : Target::Median;
        bool needed = false;
        for (const auto& c : design.configs) needed |= c.scaling_step == step;
        if (!needed) continue;

        SimConfig gen = design.base;
        gen.scaling_step = step;
        Rng rng = make_stream(gen, rep, 0);
        const GeneratedDataset data = generate_dataset(gen, rng);
        ++out.datasets;
        const auto skb = mean_bowley_skewness(data);
        const TruthPair truth = true_values(step, gen.tau2, gen.sigma2);

        for (const auto& c : design.configs) {
            if (c.scaling_step != step) continue;
            Rng coins = make_stream(gen, rep, 1);
            const auto reported = assign_reporting(data, c.scenario, coins);

            if (c.scenario == Scenario::Mixed && skb &&
                (!out.tallied || step == ScalingStep::MedianIs5)) {
                out.tallied = true;
                out.level = stats::classify_skew(*skb);
                out.studies = reported.size();
                out.median_reports = 0;
                for (const auto& s : reported) out.median_reports += s.has_median() ? 1 : 0;
            }
            if (!skb) continue;

            std::vector<Approach> approaches;
            for (Approach a : approaches_for(c.scenario)) {
                if (target_of(a) == target) approaches.push_back(a);
            }
            auto recs = evaluate_dataset(reported, truth, approaches, c, rep, *skb);
            out.records.insert(out.records.end(), recs.begin(), recs.end());
        }
    }
    return out;
}

}  // namespace

GridResult run_grid(std::span<const SimConfig> grid, const RunOptions& options) {
    for (const auto& c : grid) validate_grid_config(c);
    const auto designs = group_designs(grid);

    std::vector<std::pair<std::size_t, int>> units;
    for (std::size_t d = 0; d < designs.size(); ++d) {
        for (int rep = 0; rep < designs[d].base.replications; ++rep) units.emplace_back(d, rep);
    }
    std::vector<UnitResult> results(units.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < units.size(); i = next++) {
            results[i] = run_unit(designs[units[i].first], units[i].second);
        }
    };
    const unsigned n_workers = std::max(1u, options.workers);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }

    GridResult result;
    std::map<std::tuple<std::size_t, int>, ReportingTally> tallies;
    for (std::size_t i = 0; i < units.size(); ++i) {
        auto& r = results[i];
        result.datasets += r.datasets;
        result.records.insert(result.records.end(), r.records.begin(), r.records.end());
        if (r.tallied) {
            const auto& base = designs[units[i].first].base;
            auto& t = tallies[{units[i].first, static_cast<int>(r.level)}];
            t.k_studies = base.k_studies;
            t.size_median = base.size_median;
            t.tau2 = base.tau2;
            t.sigma2 = base.sigma2;
            t.skew_level = r.level;
            t.studies += r.studies;
            t.median_reports += r.median_reports;
        }
        r = UnitResult{};
    }
    for (auto& [key, t] : tallies) result.reporting.push_back(t);

    std::sort(result.records.begin(), result.records.end(), [](const auto& a, const auto& b) {
        return std::tie(a.k_studies, a.size_median, a.tau2, a.sigma2, a.scenario, a.dataset_index,
                        a.approach) < std::tie(b.k_studies, b.size_median, b.tau2, b.sigma2,
                                               b.scenario, b.dataset_index, b.approach);
    });
    result.cells = aggregate(result.records);
    if (!options.keep_records) {
        result.records.clear();
        result.records.shrink_to_fit();
    }
    return result;
}

}  // namespace medpool::sim
