#include "medpool/cli.hpp"
#include "medpool/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <locale>
#include <ostream>
#include <sstream>
#include <set>

namespace medpool::cli {

std::optional<Subgroup> parse_subgroup(std::string_view text) {
    if (text == "all") return Subgroup::All;
    if (text == "q1q3") return Subgroup::Q1Q3;
    if (text == "minmax") return Subgroup::MinMax;
    return std::nullopt;
}

std::string_view to_string(Subgroup subgroup) {
    switch (subgroup) {
        case Subgroup::All: return "all";
        case Subgroup::Q1Q3: return "q1q3";
        case Subgroup::MinMax: return "minmax";
    }
    return "all";
}

bool in_subgroup(const StudySummary& study, Subgroup subgroup) {
    switch (subgroup) {
        case Subgroup::All: return true;
        case Subgroup::Q1Q3: return study.has_quartiles();
        case Subgroup::MinMax: return study.has_range() && !study.has_quartiles();
    }
    return false;
}

std::vector<Approach> expand_approach(std::string_view name, std::string_view effect) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (auto exact = parse_approach(lower)) return {*exact};

    const bool fe = effect == "fe" || effect == "both";
    const bool re = effect == "re" || effect == "both";
    if (!fe && !re) throw InputError("--effect must be fe, re or both");
    std::vector<Approach> out;
    auto add = [&](Approach f, Approach r) {
        if (fe) out.push_back(f);
        if (re) out.push_back(r);
    };
    if (lower == "t1") {
        add(Approach::T1_FE, Approach::T1_RE);
    } else if (lower == "t2") {
        add(Approach::T2_FE, Approach::T2_RE);
    } else if (lower == "means") {
        add(Approach::MEANS_FE, Approach::MEANS_RE);
    } else {
        throw InputError("unknown approach '" + std::string(name) + "'");
    }
    return out;
}

RunReport cmd_pool(std::span<const StudySummary> studies, const PoolOptions& options,
                   std::string input_digest) {
    std::set<std::string> ids;
    for (const auto& s : studies) ids.insert(s.id);
    for (const auto& id : options.exclude) {
        if (!ids.count(id)) throw InputError("--exclude: no study with id '" + id + "'");
    }
    const std::set<std::string> dropped(options.exclude.begin(), options.exclude.end());

    std::vector<StudySummary> pool;
    for (const auto& s : studies) {
        if (!dropped.count(s.id) && in_subgroup(s, options.subgroup)) pool.push_back(s);
    }

    RunReport report;
    report.subgroup = options.subgroup;
    report.excluded_by_request.assign(dropped.begin(), dropped.end());
    report.table_rows = studies.size();
    report.input_digest = std::move(input_digest);
    report.tool_version = MEDPOOL_VERSION;

    double skb_sum = 0.0;
    for (const auto& s : pool) {
        if (!s.has_quartiles()) continue;
        const auto& q = *s.quantiles;
        if (!(*q.q3 > *q.q1)) continue;
        skb_sum += stats::bowley_skewness(*q.q1, q.median, *q.q3);
        ++report.skew.studies;
    }
    if (report.skew.studies) {
        report.skew.mean_skb = skb_sum / static_cast<double>(report.skew.studies);
        report.skew.level = stats::classify_skew(*report.skew.mean_skb);
    }

    std::vector<Approach> approaches = options.approaches;
    if (approaches.empty()) {
        approaches = {Approach::MM, Approach::WM, Approach::T1_FE, Approach::T1_RE};
    }
    for (Approach approach : approaches) {
        const std::string name(to_string(approach));
        if (pool.empty()) throw IneligibleStudiesError("no studies left to pool with " + name);
        ApproachInputs inputs = collect_inputs(pool, approach);
        if (options.strict && !inputs.excluded.empty()) {
            std::vector<std::string> bad;
            std::string what = name + " cannot use:";
            for (const auto& ex : inputs.excluded) {
                bad.push_back(ex.id);
                what += " " + ex.id + " (" + std::string(describe(ex.reason)) + ")";
            }
            throw IneligibleStudiesError(what, std::move(bad));
        }
        ApproachResult result{approach, pool_inputs(inputs, approach), inputs.used_ids,
                              inputs.excluded, std::nullopt};
        if (is_inverse_variance(approach) && inputs.effects.size() >= 2) {
            const auto& e = result.estimate;
            const double tau2 = e.tau2 ? *e.tau2 : dl_tau2(inputs.effects, inputs.variances);
            result.heterogeneity = Heterogeneity{*e.q_stat, tau2, *e.i2,
                                                 heterogeneity_p_value(*e.q_stat, e.k)};
        }
        report.results.push_back(std::move(result));
    }
    return report;
}

std::string report_to_json(const RunReport& report) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["subgroup"] = std::string(to_string(report.subgroup));
    j["table_rows"] = report.table_rows;
    j["excluded_by_request"] = report.excluded_by_request;

    ordered_json skew;
    skew["studies"] = report.skew.studies;
    skew["mean_skb"] = report.skew.mean_skb ? ordered_json(*report.skew.mean_skb) : ordered_json();
    skew["level"] = report.skew.level ? ordered_json(std::string(stats::to_string(*report.skew.level)))
                                      : ordered_json();
    j["skew"] = skew;

    auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(); };
    ordered_json results = ordered_json::array();
    for (const auto& r : report.results) {
        ordered_json e;
        e["approach"] = std::string(to_string(r.approach));
        e["target"] = std::string(to_string(r.estimate.target));
        e["k"] = r.estimate.k;
        e["point"] = r.estimate.point;
        e["ci_low"] = r.estimate.ci_low;
        e["ci_high"] = r.estimate.ci_high;
        e["se"] = opt(r.estimate.se);
        if (r.heterogeneity) {
            e["heterogeneity"] = {{"q", r.heterogeneity->q_stat},
                                  {"tau2", r.heterogeneity->tau2},
                                  {"i2", r.heterogeneity->i2},
                                  {"p_value", r.heterogeneity->p_value}};
        } else {
            e["heterogeneity"] = nullptr;
        }
        e["used_ids"] = r.used_ids;
        ordered_json ex = ordered_json::array();
        for (const auto& x : r.excluded) {
            ex.push_back({{"id", x.id}, {"reason", std::string(describe(x.reason))}});
        }
        e["excluded"] = ex;
        results.push_back(e);
    }
    j["results"] = results;
    j["provenance"] = {{"input_digest", report.input_digest},
                       {"tool_version", report.tool_version}};
    return j.dump(2);
}

namespace {

std::string brief(double value) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s.precision(6);
    s << value;
    return s.str();
}

}  // namespace

void print_report(std::ostream& out, const RunReport& report) {
    out << "studies in table: " << report.table_rows << ", subgroup: " << to_string(report.subgroup);
    if (!report.excluded_by_request.empty()) {
        out << ", excluded on request:";
        for (const auto& id : report.excluded_by_request) out << ' ' << id;
    }
    out << '\n';
    if (report.skew.mean_skb) {
        out << "mean Bowley skewness: " << brief(*report.skew.mean_skb) << " ("
            << stats::to_string(*report.skew.level) << ", " << report.skew.studies
            << " studies with quartiles)\n";
    } else {
        out << "mean Bowley skewness: NA (no studies with quartiles)\n";
    }
    for (const auto& r : report.results) {
        const auto& e = r.estimate;
        out << '\n'
            << to_string(r.approach) << " (" << to_string(e.target) << "): "
            << brief(e.point) << " [" << brief(e.ci_low) << ", "
            << brief(e.ci_high) << "], k = " << e.k << '\n';
        if (r.heterogeneity) {
            const auto& h = *r.heterogeneity;
            out << "  Q = " << brief(h.q_stat) << ", tau2 = " << brief(h.tau2)
                << ", I2 = " << brief(h.i2) << "%, p = " << brief(h.p_value)
                << '\n';
        }
        for (const auto& x : r.excluded) {
            out << "  excluded " << x.id << ": " << describe(x.reason) << '\n';
        }
    }
    out << "\ninput digest " << report.input_digest << ", medpool " << report.tool_version << '\n';
}

}  // namespace medpool::cli
