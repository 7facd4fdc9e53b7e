#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rwc/error.hpp"

namespace rwc {

using BlockId = std::uint32_t;
using SchoolId = std::uint32_t;
using StudentId = std::uint32_t;
using ChoiceZoneId = std::uint32_t;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

/// Axis-aligned polygonal cell of a block, in km.
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;
};

struct Block {
    BlockId id = 0;
    Point centroid;
    std::vector<BlockId> neighbors;
    SchoolId status_quo_school = 0;
    std::vector<double> travel_time;  // minutes, one entry per school
    std::vector<StudentId> resident_students;
    double ses_index = 0.0;
    Rect cell;
};

enum class RatingKind : std::uint8_t { overall = 0, test = 1, progress = 2, equity = 3 };
inline constexpr std::size_t kRatingKinds = 4;

struct School {
    SchoolId id = 0;
    BlockId campus_block = 0;
    bool is_magnet = false;
    std::int64_t current_enrollment = 0;
    std::array<double, kRatingKinds> ratings{5.0, 5.0, 5.0, 5.0};
    std::vector<ChoiceZoneId> choice_zones;

    [[nodiscard]] double rating(RatingKind k) const noexcept {
        return ratings[static_cast<std::size_t>(k)];
    }
};

enum class Race : std::uint8_t {
    black = 0,
    white,
    asian,
    native,
    hispanic,
    pacific_islander,
    multiple,
};
inline constexpr std::size_t kRaceCount = 7;

inline std::string_view race_name(Race r) noexcept {
    static constexpr std::array<std::string_view, kRaceCount> names{
        "black", "white", "asian", "native", "hispanic", "pacific_islander", "multiple"};
    return names[static_cast<std::size_t>(r)];
}

struct History {
    bool new_to_system = false;
    bool has_sibling = false;
    bool attended_same_school_as_sibling = false;
    bool opted_out_before = false;
    bool opted_out_to_magnet_before = false;
    bool attended_multiple_schools = false;

    friend bool operator==(const History&, const History&) = default;
};

inline constexpr int kLowerSes = 0;

struct Student {
    StudentId id = 0;
    BlockId block = 0;
    int ses_category = 0;  // 0 = lower, 1 = medium, 2 = higher
    Race race = Race::white;
    int grade = 0;
    SchoolId actual_school = 0;
    History history;
};

namespace detail {

/// Number of blocks reachable from `start` moving only through blocks accepted by `inside`.
template <class Inside>
std::size_t reachable_count(std::span<const Block> blocks, BlockId start, Inside&& inside,
                            std::vector<char>& seen, std::vector<BlockId>& stack) {
    seen.assign(blocks.size(), 0);
    stack.clear();
    if (!inside(start)) return 0;
    seen[start] = 1;
    stack.push_back(start);
    std::size_t count = 0;
    while (!stack.empty()) {
        const BlockId b = stack.back();
        stack.pop_back();
        ++count;
        for (BlockId nb : blocks[b].neighbors) {
            if (!seen[nb] && inside(nb)) {
                seen[nb] = 1;
                stack.push_back(nb);
            }
        }
    }
    return count;
}

}  // namespace detail

/// Immutable world model. Construction validates every structural invariant and
/// rebuilds each block's resident list from the student table.
class District {
public:
    District() = default;

    District(std::vector<Block> blocks, std::vector<School> schools, std::vector<Student> students,
             std::size_t choice_zone_count)
        : blocks_(std::move(blocks)),
          schools_(std::move(schools)),
          students_(std::move(students)),
          choice_zone_count_(choice_zone_count) {
        for (auto& b : blocks_) b.resident_students.clear();
        for (const auto& st : students_) {
            if (st.block >= blocks_.size())
                throw DomainError("student " + std::to_string(st.id) + " lives in unknown block " +
                                  std::to_string(st.block));
            blocks_[st.block].resident_students.push_back(st.id);
        }
        lower_ses_total_ = static_cast<std::int64_t>(std::count_if(
            students_.begin(), students_.end(),
            [](const Student& s) { return s.ses_category == kLowerSes; }));
        validate();
    }

    [[nodiscard]] std::span<const Block> blocks() const noexcept { return blocks_; }
    [[nodiscard]] std::span<const School> schools() const noexcept { return schools_; }
    [[nodiscard]] std::span<const Student> students() const noexcept { return students_; }
    [[nodiscard]] const Block& block(BlockId b) const { return blocks_.at(b); }
    [[nodiscard]] const School& school(SchoolId s) const { return schools_.at(s); }
    [[nodiscard]] const Student& student(StudentId n) const { return students_.at(n); }

    [[nodiscard]] std::size_t block_count() const noexcept { return blocks_.size(); }
    [[nodiscard]] std::size_t school_count() const noexcept { return schools_.size(); }
    [[nodiscard]] std::size_t choice_zone_count() const noexcept { return choice_zone_count_; }

    /// N
    [[nodiscard]] std::int64_t student_count() const noexcept {
        return static_cast<std::int64_t>(students_.size());
    }
    /// Size of the lower-SES target group.
    [[nodiscard]] std::int64_t lower_ses_total() const noexcept { return lower_ses_total_; }

    /// Zoned school of a student under the status-quo zoning.
    [[nodiscard]] SchoolId status_quo_school_of(StudentId n) const {
        return blocks_[students_.at(n).block].status_quo_school;
    }

    /// Straight-line distance in km from a block centroid to a school campus centroid.
    [[nodiscard]] double travel_distance(BlockId b, SchoolId s) const {
        return distance(blocks_.at(b).centroid, blocks_[schools_.at(s).campus_block].centroid);
    }

    [[nodiscard]] bool in_same_choice_zone(SchoolId a, SchoolId b) const {
        const auto& za = schools_.at(a).choice_zones;
        const auto& zb = schools_.at(b).choice_zones;
        return std::any_of(za.begin(), za.end(), [&](ChoiceZoneId z) {
            return std::find(zb.begin(), zb.end(), z) != zb.end();
        });
    }

private:
    void validate() const {
        const auto nb = blocks_.size();
        const auto ns = schools_.size();
        if (ns == 0) throw DomainError("district has no schools");
        for (std::size_t b = 0; b < nb; ++b) {
            const Block& blk = blocks_[b];
            const auto where = "block " + std::to_string(b);
            if (blk.id != b) throw DomainError(where + ": identifier must equal its index");
            if (blk.status_quo_school >= ns) throw DomainError(where + ": unknown status-quo school");
            if (blk.travel_time.size() != ns)
                throw DomainError(where + ": travel_time needs one entry per school");
            for (double t : blk.travel_time)
                if (!std::isfinite(t) || t <= 0.0)
                    throw DomainError(where + ": travel times must be finite and positive");
            for (BlockId other : blk.neighbors) {
                if (other >= nb) throw DomainError(where + ": unknown neighbor");
                if (other == b) throw DomainError(where + ": adjacency must be irreflexive");
                const auto& back = blocks_[other].neighbors;
                if (std::find(back.begin(), back.end(), static_cast<BlockId>(b)) == back.end())
                    throw DomainError(where + ": adjacency must be symmetric");
            }
        }
        std::vector<char> campus_taken(nb, 0);
        for (std::size_t s = 0; s < ns; ++s) {
            const School& sch = schools_[s];
            const auto where = "school " + std::to_string(s);
            if (sch.id != s) throw DomainError(where + ": identifier must equal its index");
            if (sch.campus_block >= nb) throw DomainError(where + ": unknown campus block");
            if (campus_taken[sch.campus_block]) throw DomainError(where + ": campus block shared");
            campus_taken[sch.campus_block] = 1;
            if (blocks_[sch.campus_block].status_quo_school != s)
                throw DomainError(where + ": campus block must be zoned to the school");
            if (sch.current_enrollment < 0) throw DomainError(where + ": negative enrollment");
            if (sch.choice_zones.empty()) throw DomainError(where + ": belongs to no choice zone");
            for (ChoiceZoneId z : sch.choice_zones)
                if (z >= choice_zone_count_) throw DomainError(where + ": unknown choice zone");
        }
        for (std::size_t n = 0; n < students_.size(); ++n) {
            const Student& st = students_[n];
            const auto where = "student " + std::to_string(n);
            if (st.id != n) throw DomainError(where + ": identifier must equal its index");
            if (st.ses_category < 0 || st.ses_category > 2)
                throw DomainError(where + ": SES category must be 0, 1 or 2");
            if (st.actual_school >= ns) throw DomainError(where + ": unknown actual school");
            if (static_cast<std::size_t>(st.race) >= kRaceCount)
                throw DomainError(where + ": unknown race");
        }
        if (!students_.empty() && (lower_ses_total_ == 0 || lower_ses_total_ == student_count()))
            throw DomainError("lower-SES group must be a proper non-empty subset of students");
        // Status-quo zones are connected and anchored at the campus.
        std::vector<char> seen;
        std::vector<BlockId> stack;
        std::vector<std::size_t> zone_size(ns, 0);
        for (const auto& blk : blocks_) ++zone_size[blk.status_quo_school];
        for (std::size_t s = 0; s < ns; ++s) {
            const auto reached = detail::reachable_count(
                blocks_, schools_[s].campus_block,
                [&](BlockId b) { return blocks_[b].status_quo_school == s; }, seen, stack);
            if (reached != zone_size[s])
                throw DomainError("status-quo zone of school " + std::to_string(s) +
                                  " is not contiguous");
        }
    }

    std::vector<Block> blocks_;
    std::vector<School> schools_;
    std::vector<Student> students_;
    std::size_t choice_zone_count_ = 0;
    std::int64_t lower_ses_total_ = 0;
};

/// One school per block; the decision vector of the redistricting problem.
class Zoning {
public:
    Zoning() = default;
    explicit Zoning(std::vector<SchoolId> assignment) : assignment_(std::move(assignment)) {}

    static Zoning status_quo(const District& d) {
        std::vector<SchoolId> a(d.block_count());
        for (const auto& b : d.blocks()) a[b.id] = b.status_quo_school;
        return Zoning(std::move(a));
    }

    [[nodiscard]] SchoolId operator[](BlockId b) const { return assignment_[b]; }
    [[nodiscard]] SchoolId at(BlockId b) const { return assignment_.at(b); }
    void assign(BlockId b, SchoolId s) { assignment_.at(b) = s; }
    [[nodiscard]] std::size_t size() const noexcept { return assignment_.size(); }
    [[nodiscard]] std::span<const SchoolId> assignment() const noexcept { return assignment_; }

    /// Zoned school of a student under this zoning.
    [[nodiscard]] SchoolId school_of(const District& d, StudentId n) const {
        return assignment_.at(d.student(n).block);
    }

    friend bool operator==(const Zoning&, const Zoning&) = default;
    friend auto operator<=>(const Zoning& a, const Zoning& b) {
        return a.assignment_ <=> b.assignment_;
    }

private:
    std::vector<SchoolId> assignment_;
};

struct FeasibilityParams {
    double alpha = 0.15;  // maximum relative change in school population
    double tau = 0.5;     // maximum relative increase in travel time

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
        if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0,1]");
    }
};

/// Per-school totals and lower-SES counts.
struct SchoolCounts {
    std::vector<std::int64_t> total;
    std::vector<std::int64_t> lower_ses;

    SchoolCounts() = default;
    explicit SchoolCounts(std::size_t schools) : total(schools, 0), lower_ses(schools, 0) {}

    [[nodiscard]] std::size_t size() const noexcept { return total.size(); }
    friend bool operator==(const SchoolCounts&, const SchoolCounts&) = default;
};

}  // namespace rwc
