#include "medpool/cli.hpp"
#include "medpool/errors.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace medpool::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    for (;;) {
        const auto pos = text.find(sep);
        parts.push_back(trim(text.substr(0, pos)));
        if (pos == std::string_view::npos) break;
        text.remove_prefix(pos + 1);
    }
    return parts;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view text) {
    T v{};
    text = trim(text);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw InputError(std::string(key) + ": not an integer: '" + std::string(text) + "'");
    }
    return v;
}

std::vector<int> parse_int_list(std::string_view key, std::string_view text) {
    std::vector<int> out;
    for (auto part : split(text, ',')) out.push_back(parse_integer<int>(key, part));
    return out;
}

template <typename T>
std::string join(const std::vector<T>& items, auto&& render, std::string_view sep = ",") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += render(items[i]);
    }
    return out;
}

}  // namespace

std::vector<sim::VariancePair> parse_combos(std::string_view text) {
    std::vector<sim::VariancePair> out;
    for (auto item : split(text, ';')) {
        if (item.empty()) continue;
        const auto parts = split(item, ',');
        if (parts.size() != 2) {
            throw InputError("combos: expected 'tau2,sigma2', got '" + std::string(item) + "'");
        }
        out.push_back({sim::parse_variance(parts[0]), sim::parse_variance(parts[1])});
    }
    if (out.empty()) throw InputError("combos: empty list");
    return out;
}

void apply_sim_setting(SimOptions& o, std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "k_studies") {
        o.k_studies = parse_int_list(key, value);
    } else if (key == "size_median") {
        o.size_medians = parse_int_list(key, value);
    } else if (key == "combos") {
        o.combos = value == "all" ? std::vector<sim::VariancePair>{} : parse_combos(value);
    } else if (key == "scaling_steps") {
        o.steps.clear();
        for (auto part : split(value, ',')) {
            auto step = sim::parse_scaling_step(part);
            if (!step) throw InputError("scaling_steps: unknown step '" + std::string(part) + "'");
            o.steps.push_back(*step);
        }
    } else if (key == "scenarios") {
        o.scenarios.clear();
        for (auto part : split(value, ',')) {
            auto scenario = sim::parse_scenario(part);
            if (!scenario) throw InputError("scenarios: unknown scenario '" + std::string(part) + "'");
            o.scenarios.push_back(*scenario);
        }
    } else if (key == "replications") {
        o.replications = parse_integer<int>(key, value);
        if (o.replications < 1) throw InputError("replications must be at least 1");
    } else if (key == "seed") {
        o.seed = parse_integer<std::uint64_t>(key, value);
    } else if (key == "output_dir") {
        if (value.empty()) throw InputError("output_dir is empty");
        o.output_dir = std::string(value);
    } else if (key == "workers") {
        o.workers = parse_integer<unsigned>(key, value);
        if (o.workers < 1) throw InputError("workers must be at least 1");
    } else if (key == "records") {
        if (value == "true" || value == "1") {
            o.records = true;
        } else if (value == "false" || value == "0") {
            o.records = false;
        } else {
            throw InputError("records must be true or false");
        }
    } else {
        throw InputError("unknown config key '" + std::string(key) + "'");
    }
}

void load_sim_config(SimOptions& options, std::istream& in) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        try {
            apply_sim_setting(options, trim(view.substr(0, eq)), view.substr(eq + 1));
        } catch (const InputError& e) {
            throw InputError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void load_sim_config_file(SimOptions& options, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config " + path.string());
    load_sim_config(options, in);
}

std::vector<sim::SimConfig> SimOptions::grid() const {
    std::vector<sim::VariancePair> pairs = combos;
    if (pairs.empty()) {
        const auto std_pairs = sim::standard_variance_pairs();
        pairs.assign(std_pairs.begin(), std_pairs.end());
    }
    std::vector<sim::SimConfig> out;
    for (int k : k_studies) {
        for (int size : size_medians) {
            for (const auto& p : pairs) {
                for (auto step : steps) {
                    for (auto scenario : scenarios) {
                        sim::SimConfig c{k, size, p.tau2, p.sigma2, step, scenario, replications, seed};
                        sim::validate_grid_config(c);
                        out.push_back(c);
                    }
                }
            }
        }
    }
    if (out.empty()) throw InputError("the simulation grid is empty");
    return out;
}

std::string sim_settings_text(const SimOptions& o) {
    auto num = [](int v) { return std::to_string(v); };
    std::ostringstream out;
    out << "k_studies = " << join(o.k_studies, num) << '\n';
    out << "size_median = " << join(o.size_medians, num) << '\n';
    out << "combos = "
        << (o.combos.empty() ? std::string("all")
                             : join(o.combos,
                                    [](const sim::VariancePair& p) {
                                        return sim::variance_label(p.tau2) + "," +
                                               sim::variance_label(p.sigma2);
                                    },
                                    ";"))
        << '\n';
    out << "scaling_steps = "
        << join(o.steps, [](sim::ScalingStep s) { return std::string(sim::to_string(s)); }) << '\n';
    out << "scenarios = "
        << join(o.scenarios, [](sim::Scenario s) { return std::string(sim::to_string(s)); })
        << '\n';
    out << "replications = " << o.replications << '\n';
    out << "seed = " << o.seed << '\n';
    out << "output_dir = " << o.output_dir.string() << '\n';
    out << "workers = " << o.workers << '\n';
    out << "records = " << (o.records ? "true" : "false") << '\n';
    return out.str();
}

}  // namespace medpool::cli
