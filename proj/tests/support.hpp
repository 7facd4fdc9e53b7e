#pragma once

#include <unistd.h>

#include <array>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rwc/rwc.hpp"

namespace rwc::test {

struct StudentSpec {
    StudentSpec(BlockId b = 0, int s = 1, std::optional<SchoolId> a = std::nullopt, Race r = Race::white)
        : block(b), ses(s), actual(a), race(r) {}

    BlockId block = 0;
    int ses = 1;
    std::optional<SchoolId> actual;  // defaults to the status-quo school
    Race race = Race::white;
};

/// Rectangular grid district with rook adjacency. Block r*cols+c sits at (c*0.5, r*0.5) km.
/// Travel times follow the generator's proxy unless `travel` overrides them.
struct GridSpec {
    std::size_t rows = 1;
    std::size_t cols = 1;
    std::vector<BlockId> campuses;
    std::vector<SchoolId> status_quo;  // one per block
    std::vector<StudentSpec> students;
    std::vector<bool> magnets;                         // default: none
    std::optional<std::vector<std::int64_t>> enrollment;  // default: tally of labels
    std::function<double(BlockId, SchoolId)> travel;   // minutes
    std::vector<std::array<double, kRatingKinds>> ratings;
    std::vector<std::vector<ChoiceZoneId>> choice_zones;  // default: everyone in zone 0
};

inline District grid_district(const GridSpec& g) {
    const auto nb = g.rows * g.cols;
    const auto ns = g.campuses.size();
    std::vector<Block> blocks(nb);
    for (std::size_t r = 0; r < g.rows; ++r)
        for (std::size_t c = 0; c < g.cols; ++c) {
            auto& b = blocks[r * g.cols + c];
            b.id = static_cast<BlockId>(r * g.cols + c);
            b.centroid = {0.5 * static_cast<double>(c), 0.5 * static_cast<double>(r)};
            b.cell = {b.centroid.x - 0.25, b.centroid.y - 0.25, b.centroid.x + 0.25, b.centroid.y + 0.25};
            if (c > 0) b.neighbors.push_back(b.id - 1);
            if (c + 1 < g.cols) b.neighbors.push_back(b.id + 1);
            if (r > 0) b.neighbors.push_back(static_cast<BlockId>(b.id - g.cols));
            if (r + 1 < g.rows) b.neighbors.push_back(static_cast<BlockId>(b.id + g.cols));
            b.status_quo_school = g.status_quo.at(b.id);
            b.ses_index = static_cast<double>(b.id);
        }
    for (auto& b : blocks) {
        b.travel_time.resize(ns);
        for (SchoolId s = 0; s < ns; ++s)
            b.travel_time[s] = g.travel ? g.travel(b.id, s)
                                        : proxy_travel_minutes(distance(b.centroid, blocks[g.campuses[s]].centroid));
    }
    std::vector<Student> students;
    for (std::size_t n = 0; n < g.students.size(); ++n) {
        const auto& sp = g.students[n];
        Student st;
        st.id = static_cast<StudentId>(n);
        st.block = sp.block;
        st.ses_category = sp.ses;
        st.race = sp.race;
        st.grade = static_cast<int>(n % 12);
        st.actual_school = sp.actual.value_or(g.status_quo.at(sp.block));
        students.push_back(st);
    }
    std::vector<School> schools(ns);
    std::size_t zones = 1;
    for (SchoolId s = 0; s < ns; ++s) {
        schools[s].id = s;
        schools[s].campus_block = g.campuses[s];
        schools[s].is_magnet = !g.magnets.empty() && g.magnets[s];
        if (!g.ratings.empty()) schools[s].ratings = g.ratings[s];
        schools[s].choice_zones = g.choice_zones.empty() ? std::vector<ChoiceZoneId>{0} : g.choice_zones[s];
        for (auto z : schools[s].choice_zones) zones = std::max<std::size_t>(zones, z + 1);
    }
    if (g.enrollment) {
        for (SchoolId s = 0; s < ns; ++s) schools[s].current_enrollment = g.enrollment->at(s);
    } else {
        for (const auto& st : students) ++schools[st.actual_school].current_enrollment;
    }
    return District(std::move(blocks), std::move(schools), std::move(students), zones);
}

/// Scenario table whose entries come from a callback (scenario, student, zoned) -> school.
inline ScenarioTable table_from(const District& d, std::size_t scenarios,
                                const std::function<SchoolId(std::size_t, StudentId, SchoolId)>& f) {
    ScenarioTable t(scenarios, d.students().size(), d.school_count(), 0, 0, district_fingerprint(d));
    for (std::size_t i = 0; i < scenarios; ++i)
        for (const auto& st : d.students())
            for (SchoolId s = 0; s < d.school_count(); ++s) t.set(i, st.id, s, f(i, st.id, s));
    return t;
}

inline ScenarioTable follow_table(const District& d, std::size_t scenarios = 1) {
    return table_from(d, scenarios, [](std::size_t, StudentId, SchoolId s) { return s; });
}

// Exact rational arithmetic for oracles.
struct Fraction {
    __int128 num = 0;
    __int128 den = 1;

    static __int128 gcd(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            const auto t = a % b;
            a = b;
            b = t;
        }
        return a;
    }
    static Fraction make(__int128 n, __int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const auto g = gcd(n, d);
        return g == 0 ? Fraction{0, 1} : Fraction{n / g, d / g};
    }
    friend Fraction operator+(Fraction a, Fraction b) { return make(a.num * b.den + b.num * a.den, a.den * b.den); }
    friend Fraction operator-(Fraction a, Fraction b) { return make(a.num * b.den - b.num * a.den, a.den * b.den); }
    friend bool operator==(Fraction a, Fraction b) { return a.num == b.num && a.den == b.den; }
    [[nodiscard]] Fraction abs() const { return {num < 0 ? -num : num, den}; }
    [[nodiscard]] double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Direct summation of the dissimilarity index over exact fractions.
inline Fraction dissimilarity_oracle(const std::vector<std::int64_t>& total, const std::vector<std::int64_t>& lower,
                                     std::int64_t g, std::int64_t n) {
    Fraction sum;
    for (std::size_t s = 0; s < total.size(); ++s)
        sum = sum + (Fraction::make(lower[s], g) - Fraction::make(total[s] - lower[s], n - g)).abs();
    return Fraction::make(sum.num, sum.den * 2);
}

/// Whether every school's blocks form one union-find component containing its campus.
inline bool contiguous_by_union_find(const Zoning& z, const District& d) {
    std::vector<BlockId> parent(d.block_count());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<BlockId(BlockId)> find = [&](BlockId x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& b : d.blocks())
        for (BlockId o : b.neighbors)
            if (z[b.id] == z[o]) parent[find(b.id)] = find(o);
    for (const auto& s : d.schools()) {
        if (z[s.campus_block] != s.id) return false;
        for (const auto& b : d.blocks())
            if (z[b.id] == s.id && find(b.id) != find(s.campus_block)) return false;
    }
    return true;
}

/// Small random grid district: contiguous status quo grown from random campuses, and
/// students with both SES groups present.
inline District random_small_district(std::mt19937_64& rng, std::size_t max_side = 4, std::size_t max_schools = 3,
                                      std::size_t max_students = 12) {
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
    };
    GridSpec g;
    g.rows = pick(1, max_side);
    g.cols = pick(2, max_side);
    const auto nb = g.rows * g.cols;
    const auto ns = pick(1, std::min(max_schools, nb));
    std::vector<BlockId> all(nb);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    g.campuses.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(ns));
    // Multi-source BFS in random neighbor order keeps every zone connected.
    g.status_quo.assign(nb, static_cast<SchoolId>(ns));
    std::deque<BlockId> q;
    for (SchoolId s = 0; s < ns; ++s) {
        g.status_quo[g.campuses[s]] = s;
        q.push_back(g.campuses[s]);
    }
    while (!q.empty()) {
        const auto b = q.front();
        q.pop_front();
        const auto r = b / g.cols, c = b % g.cols;
        std::vector<BlockId> nbrs;
        if (c > 0) nbrs.push_back(b - 1);
        if (c + 1 < g.cols) nbrs.push_back(b + 1);
        if (r > 0) nbrs.push_back(static_cast<BlockId>(b - g.cols));
        if (r + 1 < g.rows) nbrs.push_back(static_cast<BlockId>(b + g.cols));
        std::shuffle(nbrs.begin(), nbrs.end(), rng);
        for (auto o : nbrs)
            if (g.status_quo[o] == ns) {
                g.status_quo[o] = g.status_quo[b];
                q.push_back(o);
            }
    }
    const auto students = pick(2, max_students);
    for (std::size_t k = 0; k < students; ++k) {
        StudentSpec sp;
        sp.block = static_cast<BlockId>(rng() % nb);
        sp.ses = k == 0 ? 0 : k == 1 ? 2 : static_cast<int>(rng() % 3);
        sp.race = static_cast<Race>(rng() % kRaceCount);
        sp.actual = static_cast<SchoolId>(rng() % ns);
        g.students.push_back(sp);
    }
    return grid_district(g);
}

/// Uniformly random total zoning (not necessarily feasible).
inline Zoning random_zoning(std::mt19937_64& rng, const District& d) {
    std::vector<SchoolId> a(d.block_count());
    for (auto& s : a) s = static_cast<SchoolId>(rng() % d.school_count());
    return Zoning(std::move(a));
}

/// Fresh empty directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto p = std::filesystem::temp_directory_path() /
                   ("rwc-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

/// Default synthetic district, generated once per process.
inline const District& default_district() {
    static const District d = generate_labeled_district(GenParams{});
    return d;
}

}  // namespace rwc::test
