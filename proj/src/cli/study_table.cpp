#include "medpool/cli.hpp"
#include "medpool/errors.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

namespace medpool::cli {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return std::string(s);
}

}  // namespace

std::vector<StudySummary> parse_study_table(std::istream& in) {
    CsvTable table = read_csv(in);
    for (auto& h : table.header) h = trim(h);

    std::array<std::size_t, std::size(kStudyColumns)> col{};
    for (std::size_t c = 0; c < col.size(); ++c) {
        try {
            col[c] = table.column(kStudyColumns[c]);
        } catch (const InputError&) {
            throw InputError("malformed header: missing column '" +
                             std::string(kStudyColumns[c]) + "'");
        }
    }

    std::vector<StudySummary> studies;
    std::set<std::string> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = "row " + std::to_string(r + 1);
        auto number = [&](std::size_t c) -> std::optional<double> {
            const std::string cell = trim(row[col[c]]);
            if (cell.empty()) return std::nullopt;
            auto v = parse_number(cell);
            if (!v) {
                throw InputError(where + ": column '" + std::string(kStudyColumns[c]) +
                                 "' is not a number: '" + cell + "'");
            }
            return v;
        };

        StudySummary s;
        s.id = trim(row[col[0]]);
        if (s.id.empty()) throw InputError(where + ": empty id");
        if (!seen.insert(s.id).second) throw InputError(where + ": duplicate id '" + s.id + "'");
        if (auto n = number(1)) {
            if (*n < 1 || std::floor(*n) != *n) {
                throw InputError(where + ": n must be a positive integer");
            }
            s.n = static_cast<long>(*n);
        }
        s.mean = number(2);
        s.se = number(3);
        const auto min = number(4), q1 = number(5), median = number(6), q3 = number(7),
                   max = number(8);
        if (median) {
            s.quantiles = QuantileSummary{min, q1, *median, q3, max};
        } else if (min || q1 || q3 || max) {
            throw InputError(where + ": spread reported without a median");
        }
        try {
            s.validate();
        } catch (const std::invalid_argument& e) {
            throw InputError(where + ": " + e.what());
        }
        studies.push_back(std::move(s));
    }
    return studies;
}

std::vector<StudySummary> parse_study_table_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    return parse_study_table(in);
}

void serialize_study_table(std::ostream& out, std::span<const StudySummary> studies) {
    CsvTable table;
    table.header.assign(std::begin(kStudyColumns), std::end(kStudyColumns));
    for (const auto& s : studies) {
        const auto* q = s.quantiles ? &*s.quantiles : nullptr;
        table.rows.push_back({
            s.id,
            s.n ? std::to_string(*s.n) : "",
            s.mean ? format_number(*s.mean) : "",
            s.se ? format_number(*s.se) : "",
            q && q->min ? format_number(*q->min) : "",
            q && q->q1 ? format_number(*q->q1) : "",
            q ? format_number(q->median) : "",
            q && q->q3 ? format_number(*q->q3) : "",
            q && q->max ? format_number(*q->max) : "",
        });
    }
    write_csv(out, table);
}

}  // namespace medpool::cli
