#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rwc/atomic_file.hpp"
#include "rwc/csv.hpp"
#include "rwc/district.hpp"
#include "rwc/hash.hpp"

namespace rwc {

inline constexpr std::string_view kBlocksHeader =
    "id,centroid_x,centroid_y,status_quo_school,travel_time,ses_index,cell_x0,cell_y0,cell_x1,cell_y1";
inline constexpr std::string_view kSchoolsHeader =
    "id,campus_block,is_magnet,current_enrollment,rating_overall,rating_test,rating_progress,"
    "rating_equity,choice_zones";
inline constexpr std::string_view kStudentsHeader =
    "id,block,ses_category,race,grade,actual_school,new_to_system,has_sibling,"
    "attended_same_school_as_sibling,opted_out_before,opted_out_to_magnet_before,"
    "attended_multiple_schools";
inline constexpr std::string_view kAdjacencyHeader = "block_a,block_b";
inline constexpr std::string_view kZoningHeader = "block_id,school_id";

/// Body text (header plus rows, no provenance comments) of the four district files.
struct DistrictTables {
    std::string blocks;
    std::string schools;
    std::string students;
    std::string adjacency;
};

inline DistrictTables district_tables(const District& d) {
    using csv::format_double;
    DistrictTables t;
    t.blocks = std::string(kBlocksHeader) + "\n";
    for (const auto& b : d.blocks()) {
        std::string times;
        for (std::size_t s = 0; s < b.travel_time.size(); ++s)
            times += (s ? ";" : "") + format_double(b.travel_time[s]);
        t.blocks += std::to_string(b.id) + "," + format_double(b.centroid.x) + "," +
                    format_double(b.centroid.y) + "," + std::to_string(b.status_quo_school) + "," +
                    times + "," + format_double(b.ses_index) + "," + format_double(b.cell.x0) + "," +
                    format_double(b.cell.y0) + "," + format_double(b.cell.x1) + "," +
                    format_double(b.cell.y1) + "\n";
    }
    t.schools = std::string(kSchoolsHeader) + "\n";
    for (const auto& s : d.schools()) {
        std::string zones;
        for (std::size_t k = 0; k < s.choice_zones.size(); ++k)
            zones += (k ? ";" : "") + std::to_string(s.choice_zones[k]);
        t.schools += std::to_string(s.id) + "," + std::to_string(s.campus_block) + "," +
                     (s.is_magnet ? "1" : "0") + "," + std::to_string(s.current_enrollment);
        for (double r : s.ratings) t.schools += "," + format_double(r);
        t.schools += "," + zones + "\n";
    }
    t.students = std::string(kStudentsHeader) + "\n";
    for (const auto& st : d.students()) {
        const auto& h = st.history;
        auto flag = [](bool v) { return v ? std::string(",1") : std::string(",0"); };
        t.students += std::to_string(st.id) + "," + std::to_string(st.block) + "," +
                      std::to_string(st.ses_category) + "," + std::string(race_name(st.race)) + "," +
                      std::to_string(st.grade) + "," + std::to_string(st.actual_school) +
                      flag(h.new_to_system) + flag(h.has_sibling) +
                      flag(h.attended_same_school_as_sibling) + flag(h.opted_out_before) +
                      flag(h.opted_out_to_magnet_before) + flag(h.attended_multiple_schools) + "\n";
    }
    t.adjacency = std::string(kAdjacencyHeader) + "\n";
    for (const auto& b : d.blocks()) {
        auto nbs = b.neighbors;
        std::sort(nbs.begin(), nbs.end());
        for (BlockId nb : nbs)
            if (nb > b.id) t.adjacency += std::to_string(b.id) + "," + std::to_string(nb) + "\n";
    }
    return t;
}

/// Content fingerprint of a district, independent of provenance comments.
inline std::uint64_t district_fingerprint(const District& d) {
    const auto t = district_tables(d);
    Fnv1a h;
    h.update(t.blocks);
    h.update(t.schools);
    h.update(t.students);
    h.update(t.adjacency);
    return h.digest();
}

inline std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

inline std::uint64_t parse_hex64(std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw FormatError("bad fingerprint '" + std::string(s) + "'");
    return v;
}

/// Writes blocks.csv, schools.csv, students.csv and adjacency.csv into `dir`. Each file
/// starts with a provenance comment carrying the district fingerprint and `provenance`.
inline void write_district(const std::filesystem::path& dir, const District& d,
                           const std::string& provenance = {}) {
    const auto t = district_tables(d);
    const std::string comment = "# rwc district fingerprint=" + hex64(district_fingerprint(d)) +
                                (provenance.empty() ? "" : " " + provenance) + "\n";
    write_file_atomic(dir / "blocks.csv", comment + t.blocks);
    write_file_atomic(dir / "schools.csv", comment + t.schools);
    write_file_atomic(dir / "students.csv", comment + t.students);
    write_file_atomic(dir / "adjacency.csv", comment + t.adjacency);
}

inline Race parse_race(std::string_view name) {
    for (std::size_t r = 0; r < kRaceCount; ++r)
        if (race_name(static_cast<Race>(r)) == name) return static_cast<Race>(r);
    throw FormatError("unknown race '" + std::string(name) + "'");
}

inline District read_district(const std::filesystem::path& dir) {
    using csv::parse_flag;
    using csv::parse_number;
    std::vector<Block> blocks;
    {
        csv::Reader in(dir / "blocks.csv", kBlocksHeader);
        for (std::size_t r = 0; r < in.row_count(); ++r) {
            const auto f = in.row(r);
            Block b;
            b.id = parse_number<BlockId>(f[0], "block id");
            b.centroid = {parse_number<double>(f[1], "centroid_x"),
                          parse_number<double>(f[2], "centroid_y")};
            b.status_quo_school = parse_number<SchoolId>(f[3], "status_quo_school");
            for (auto t : csv::split(f[4], ';'))
                b.travel_time.push_back(parse_number<double>(t, "travel_time"));
            b.ses_index = parse_number<double>(f[5], "ses_index");
            b.cell = {parse_number<double>(f[6], "cell_x0"), parse_number<double>(f[7], "cell_y0"),
                      parse_number<double>(f[8], "cell_x1"), parse_number<double>(f[9], "cell_y1")};
            blocks.push_back(std::move(b));
        }
    }
    {
        csv::Reader in(dir / "adjacency.csv", kAdjacencyHeader);
        for (std::size_t r = 0; r < in.row_count(); ++r) {
            const auto f = in.row(r);
            const auto a = parse_number<BlockId>(f[0], "block_a");
            const auto b = parse_number<BlockId>(f[1], "block_b");
            if (a >= blocks.size() || b >= blocks.size())
                throw FormatError("adjacency references unknown block");
            blocks[a].neighbors.push_back(b);
            blocks[b].neighbors.push_back(a);
        }
        for (auto& b : blocks) std::sort(b.neighbors.begin(), b.neighbors.end());
    }
    std::vector<School> schools;
    std::size_t zone_count = 0;
    {
        csv::Reader in(dir / "schools.csv", kSchoolsHeader);
        for (std::size_t r = 0; r < in.row_count(); ++r) {
            const auto f = in.row(r);
            School s;
            s.id = parse_number<SchoolId>(f[0], "school id");
            s.campus_block = parse_number<BlockId>(f[1], "campus_block");
            s.is_magnet = parse_flag(f[2], "is_magnet");
            s.current_enrollment = parse_number<std::int64_t>(f[3], "current_enrollment");
            for (std::size_t k = 0; k < kRatingKinds; ++k)
                s.ratings[k] = parse_number<double>(f[4 + k], "rating");
            for (auto z : csv::split(f[8], ';')) {
                s.choice_zones.push_back(parse_number<ChoiceZoneId>(z, "choice zone"));
                zone_count = std::max<std::size_t>(zone_count, s.choice_zones.back() + 1);
            }
            schools.push_back(std::move(s));
        }
    }
    std::vector<Student> students;
    {
        csv::Reader in(dir / "students.csv", kStudentsHeader);
        for (std::size_t r = 0; r < in.row_count(); ++r) {
            const auto f = in.row(r);
            Student st;
            st.id = parse_number<StudentId>(f[0], "student id");
            st.block = parse_number<BlockId>(f[1], "block");
            st.ses_category = parse_number<int>(f[2], "ses_category");
            st.race = parse_race(f[3]);
            st.grade = parse_number<int>(f[4], "grade");
            st.actual_school = parse_number<SchoolId>(f[5], "actual_school");
            st.history.new_to_system = parse_flag(f[6], "new_to_system");
            st.history.has_sibling = parse_flag(f[7], "has_sibling");
            st.history.attended_same_school_as_sibling = parse_flag(f[8], "attended_same_school");
            st.history.opted_out_before = parse_flag(f[9], "opted_out_before");
            st.history.opted_out_to_magnet_before = parse_flag(f[10], "opted_out_to_magnet_before");
            st.history.attended_multiple_schools = parse_flag(f[11], "attended_multiple_schools");
            students.push_back(st);
        }
    }
    return District(std::move(blocks), std::move(schools), std::move(students), zone_count);
}

/// Two-column zoning file. The provenance comment records the district fingerprint.
inline std::string zoning_text(const Zoning& z, std::uint64_t district_fp,
                               const std::string& provenance = {}) {
    std::string out = "# rwc zoning district=" + hex64(district_fp) +
                      (provenance.empty() ? "" : " " + provenance) + "\n";
    out += std::string(kZoningHeader) + "\n";
    for (std::size_t b = 0; b < z.size(); ++b)
        out += std::to_string(b) + "," + std::to_string(z[static_cast<BlockId>(b)]) + "\n";
    return out;
}

inline void write_zoning(const std::filesystem::path& path, const Zoning& z,
                         std::uint64_t district_fp, const std::string& provenance = {}) {
    write_file_atomic(path, zoning_text(z, district_fp, provenance));
}

struct LoadedZoning {
    Zoning zoning;
    std::optional<std::uint64_t> district_fingerprint;
};

inline LoadedZoning read_zoning(const std::filesystem::path& path) {
    csv::Reader in(path, kZoningHeader);
    std::vector<SchoolId> a(in.row_count(), 0);
    std::vector<char> seen(in.row_count(), 0);
    for (std::size_t r = 0; r < in.row_count(); ++r) {
        const auto f = in.row(r);
        const auto b = csv::parse_number<BlockId>(f[0], "block_id");
        if (b >= a.size() || seen[b]) throw FormatError(path.string() + ": block ids must be 0..B-1, once each");
        seen[b] = 1;
        a[b] = csv::parse_number<SchoolId>(f[1], "school_id");
    }
    LoadedZoning out{Zoning(std::move(a)), std::nullopt};
    if (auto fp = csv::comment_value(in.comments(), "district"); !fp.empty())
        out.district_fingerprint = parse_hex64(fp);
    return out;
}

}  // namespace rwc
