#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rwc/csv.hpp"
#include "rwc/feasibility.hpp"
#include "rwc/scenario.hpp"

namespace rwc {

/// 100 * part / whole, or 0 when whole is 0.
inline double percent(std::int64_t part, std::int64_t whole) noexcept {
    return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

struct OptOutDemographics {
    std::int64_t persistent = 0;  // students opting out in at least half the scenarios
    std::array<std::int64_t, kRaceCount> by_race{};
    std::array<std::int64_t, 3> by_ses{};

    [[nodiscard]] double race_percent(Race r) const noexcept {
        return percent(by_race[static_cast<std::size_t>(r)], persistent);
    }
    [[nodiscard]] double ses_percent(int category) const noexcept {
        return percent(by_ses[static_cast<std::size_t>(category)], persistent);
    }
};

struct RezoneReport {
    std::size_t scenarios = 0;
    double dissimilarity = 0.0;
    double standard_error = 0.0;

    std::int64_t rezoned_lower_ses = 0;
    std::int64_t rezoned_students = 0;
    std::int64_t rezoned_blocks = 0;
    std::int64_t lower_ses_total = 0;
    std::int64_t student_total = 0;
    std::int64_t block_total = 0;

    double average_opt_outs = 0.0;  // students per scenario
    double opt_out_rate = 0.0;      // fraction of students
    double average_driving_minutes = 0.0;

    std::vector<double> enrollment_change;            // per school, mean(new - old) over scenarios
    std::vector<std::optional<double>> block_opt_out;  // per block; empty blocks have no rate
    OptOutDemographics demographics;
    double label_follow_rate = 0.0;  // share of labels attending the status-quo school

    [[nodiscard]] double rezoned_lower_ses_percent() const noexcept { return percent(rezoned_lower_ses, lower_ses_total); }
    [[nodiscard]] double rezoned_students_percent() const noexcept { return percent(rezoned_students, student_total); }
    [[nodiscard]] double rezoned_blocks_percent() const noexcept { return percent(rezoned_blocks, block_total); }
};

inline double label_follow_rate(const District& d) {
    if (d.students().empty()) return 0.0;
    std::int64_t follow = 0;
    for (const auto& st : d.students())
        if (st.actual_school == d.status_quo_school_of(st.id)) ++follow;
    return static_cast<double>(follow) / static_cast<double>(d.students().size());
}

inline RezoneReport rezone_report(const Zoning& old_zoning, const Zoning& new_zoning, const ScenarioTable& table,
                                  const District& d) {
    if (old_zoning.size() != d.block_count() || new_zoning.size() != d.block_count())
        throw DomainError("zonings must cover every block");
    const auto nn = d.students().size();
    const auto ns = d.school_count();
    const auto scenarios = table.scenario_count();

    RezoneReport r;
    r.scenarios = scenarios;
    r.lower_ses_total = d.lower_ses_total();
    r.student_total = static_cast<std::int64_t>(nn);
    r.block_total = static_cast<std::int64_t>(d.block_count());
    const auto obj = saa_objective(new_zoning, table, d);
    r.dissimilarity = obj.mean;
    r.standard_error = obj.standard_error;

    for (const auto& blk : d.blocks()) {
        if (old_zoning[blk.id] == new_zoning[blk.id]) continue;
        ++r.rezoned_blocks;
        for (StudentId n : blk.resident_students) {
            ++r.rezoned_students;
            if (d.student(n).ses_category == kLowerSes) ++r.rezoned_lower_ses;
        }
    }

    std::vector<std::int64_t> opt_outs(nn, 0);
    std::vector<std::int64_t> change(ns, 0);
    std::int64_t total_opt_outs = 0;
    double minutes = 0.0;
    for (std::size_t i = 0; i < scenarios; ++i) {
        const auto now = realize(new_zoning, table, i, d);
        const auto before = realize(old_zoning, table, i, d);
        for (const auto& st : d.students()) {
            const SchoolId attended = now.attended[st.id];
            if (attended != new_zoning[st.block]) {
                ++opt_outs[st.id];
                ++total_opt_outs;
            }
            minutes += d.block(st.block).travel_time[attended];
            ++change[attended];
            --change[before.attended[st.id]];
        }
    }
    const double cells = static_cast<double>(scenarios) * static_cast<double>(nn);
    r.average_opt_outs = static_cast<double>(total_opt_outs) / static_cast<double>(scenarios);
    r.opt_out_rate = nn == 0 ? 0.0 : static_cast<double>(total_opt_outs) / cells;
    r.average_driving_minutes = nn == 0 ? 0.0 : minutes / cells;
    r.enrollment_change.resize(ns);
    for (std::size_t s = 0; s < ns; ++s)
        r.enrollment_change[s] = static_cast<double>(change[s]) / static_cast<double>(scenarios);

    r.block_opt_out.resize(d.block_count());
    for (const auto& blk : d.blocks()) {
        if (blk.resident_students.empty()) continue;
        std::int64_t sum = 0;
        for (StudentId n : blk.resident_students) sum += opt_outs[n];
        r.block_opt_out[blk.id] = static_cast<double>(sum) /
                                  (static_cast<double>(scenarios) * static_cast<double>(blk.resident_students.size()));
    }

    for (const auto& st : d.students()) {
        if (2 * opt_outs[st.id] < static_cast<std::int64_t>(scenarios)) continue;
        ++r.demographics.persistent;
        ++r.demographics.by_race[static_cast<std::size_t>(st.race)];
        ++r.demographics.by_ses[static_cast<std::size_t>(st.ses_category)];
    }
    r.label_follow_rate = label_follow_rate(d);
    return r;
}

/// Rows are zoned schools, columns attended schools.
struct AttendanceMatrix {
    std::vector<std::vector<std::int64_t>> counts;

    [[nodiscard]] std::int64_t row_total(SchoolId s) const {
        std::int64_t t = 0;
        for (auto c : counts.at(s)) t += c;
        return t;
    }

    /// Row-normalized shares; a zone with no students yields a row of zeros.
    [[nodiscard]] std::vector<std::vector<double>> shares() const {
        std::vector<std::vector<double>> out(counts.size());
        for (SchoolId s = 0; s < counts.size(); ++s) {
            const auto t = row_total(s);
            out[s].assign(counts[s].size(), 0.0);
            if (t == 0) continue;
            for (std::size_t k = 0; k < counts[s].size(); ++k)
                out[s][k] = static_cast<double>(counts[s][k]) / static_cast<double>(t);
        }
        return out;
    }
};

inline AttendanceMatrix attendance_matrix(const District& d, const Zoning& zoning,
                                          const AttendanceRealization& attended) {
    if (attended.attended.size() != d.students().size())
        throw DomainError("realization does not cover every student");
    const auto ns = d.school_count();
    AttendanceMatrix m;
    m.counts.assign(ns, std::vector<std::int64_t>(ns, 0));
    for (const auto& st : d.students()) ++m.counts[zoning[st.block]][attended.attended.at(st.id)];
    return m;
}

/// Attendance given by the enrollment labels.
inline AttendanceRealization label_realization(const District& d, const Zoning& zoning) {
    AttendanceRealization r;
    r.attended.reserve(d.students().size());
    for (const auto& st : d.students()) {
        r.attended.push_back(st.actual_school);
        if (st.actual_school == zoning[st.block]) ++r.follow_count;
    }
    return r;
}

enum class MapOverlay { none, opt_out_rate, ses };

inline MapOverlay parse_overlay(std::string_view s) {
    if (s == "none") return MapOverlay::none;
    if (s == "opt-out-rate") return MapOverlay::opt_out_rate;
    if (s == "ses") return MapOverlay::ses;
    throw ConfigError("unknown overlay '" + std::string(s) + "' (expected none, opt-out-rate or ses)");
}

/// FeatureCollection with one rectangle per block. The opt-out overlay needs a table and
/// uses the same per-block rates as rezone_report against the status quo.
inline nlohmann::json export_geojson(const District& d, const Zoning& zoning, MapOverlay overlay,
                                     const ScenarioTable* table = nullptr) {
    if (zoning.size() != d.block_count()) throw DomainError("zoning does not cover every block");
    std::vector<std::optional<double>> rates;
    if (overlay == MapOverlay::opt_out_rate) {
        if (table == nullptr) throw ConfigError("opt-out-rate overlay requires a scenario table");
        rates = rezone_report(Zoning::status_quo(d), zoning, *table, d).block_opt_out;
    }
    nlohmann::json features = nlohmann::json::array();
    for (const auto& blk : d.blocks()) {
        const auto& c = blk.cell;
        nlohmann::json props = {{"block_id", blk.id}, {"school_id", zoning[blk.id]}};
        if (overlay == MapOverlay::ses) props["ses_index"] = blk.ses_index;
        if (overlay == MapOverlay::opt_out_rate) {
            if (rates[blk.id]) props["opt_out_rate"] = *rates[blk.id];
            else props["opt_out_rate"] = nullptr;
        }
        features.push_back({
            {"type", "Feature"},
            {"geometry",
             {{"type", "Polygon"},
              {"coordinates", {{{c.x0, c.y0}, {c.x1, c.y0}, {c.x1, c.y1}, {c.x0, c.y1}, {c.x0, c.y0}}}}}},
            {"properties", std::move(props)},
        });
    }
    return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

// Tabular writers. Numbers use fixed precision so reports are stable and diffable.

inline std::string report_header() {
    std::string h =
        "method,scenarios,dissimilarity,standard_error,rezoned_lower_ses,rezoned_lower_ses_pct,"
        "rezoned_students,rezoned_students_pct,rezoned_blocks,rezoned_blocks_pct,avg_opt_outs,"
        "opt_out_pct,avg_driving_minutes,persistent_opt_outs";
    for (std::size_t k = 0; k < kRaceCount; ++k) h += ",opt_out_" + std::string(race_name(static_cast<Race>(k))) + "_pct";
    for (int s = 0; s < 3; ++s) h += ",opt_out_ses" + std::to_string(s) + "_pct";
    h += ",label_follow_pct";
    return h;
}

/// One report row. `deterministic` rows (method R, status quo) print '-' for the scenario
/// count and standard error; `baseline` rows print '-' for the rezoning columns.
inline std::string report_row(std::string_view method, const RezoneReport& r, bool deterministic, bool baseline) {
    using csv::format_fixed;
    std::string row(method);
    auto add = [&](const std::string& v) { row += ',' + v; };
    add(deterministic ? "-" : std::to_string(r.scenarios));
    add(format_fixed(r.dissimilarity, 6));
    add(deterministic ? "-" : format_fixed(r.standard_error, 8));
    if (baseline) {
        for (int k = 0; k < 6; ++k) add("-");
    } else {
        add(std::to_string(r.rezoned_lower_ses));
        add(format_fixed(r.rezoned_lower_ses_percent(), 2));
        add(std::to_string(r.rezoned_students));
        add(format_fixed(r.rezoned_students_percent(), 2));
        add(std::to_string(r.rezoned_blocks));
        add(format_fixed(r.rezoned_blocks_percent(), 2));
    }
    add(format_fixed(r.average_opt_outs, 2));
    add(format_fixed(100.0 * r.opt_out_rate, 2));
    add(format_fixed(r.average_driving_minutes, 2));
    add(std::to_string(r.demographics.persistent));
    for (std::size_t k = 0; k < kRaceCount; ++k) add(format_fixed(r.demographics.race_percent(static_cast<Race>(k)), 2));
    for (int s = 0; s < 3; ++s) add(format_fixed(r.demographics.ses_percent(s), 2));
    add(format_fixed(100.0 * r.label_follow_rate, 2));
    return row;
}

inline std::string enrollment_table(const RezoneReport& r, const District& d) {
    std::string out = "school_id,current_enrollment,mean_change\n";
    for (const auto& s : d.schools())
        out += std::to_string(s.id) + ',' + std::to_string(s.current_enrollment) + ',' +
               csv::format_fixed(r.enrollment_change[s.id], 4) + '\n';
    return out;
}

inline std::string block_table(const RezoneReport& r, const District& d, const Zoning& old_zoning,
                               const Zoning& new_zoning) {
    std::string out = "block_id,old_school,new_school,residents,opt_out_rate\n";
    for (const auto& blk : d.blocks()) {
        out += std::to_string(blk.id) + ',' + std::to_string(old_zoning[blk.id]) + ',' +
               std::to_string(new_zoning[blk.id]) + ',' + std::to_string(blk.resident_students.size()) + ',';
        out += r.block_opt_out[blk.id] ? csv::format_fixed(*r.block_opt_out[blk.id], 6) : std::string("-");
        out += '\n';
    }
    return out;
}

inline std::string matrix_table(const AttendanceMatrix& m) {
    std::string out = "zoned\\attended";
    for (std::size_t s = 0; s < m.counts.size(); ++s) out += ',' + std::to_string(s);
    out += '\n';
    for (std::size_t s = 0; s < m.counts.size(); ++s) {
        out += std::to_string(s);
        for (auto c : m.counts[s]) out += ',' + std::to_string(c);
        out += '\n';
    }
    return out;
}

}  // namespace rwc
