#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rwc/district.hpp"

namespace rwc {

/// Realized choice functions A_n^i(s): the school student n attends in scenario i
/// when zoned to school s.
///
/// Storage is dense over (scenario, student, candidate). Without a candidate cap every
/// school is a candidate and the candidate index equals the school id. With a cap, each
/// student carries its own candidate list (its nearest r schools) and lookups outside
/// that list are rejected.
class ScenarioTable {
public:
    using Entry = std::uint16_t;

    ScenarioTable() = default;

    ScenarioTable(std::size_t scenarios, std::size_t students, std::size_t schools,
                  std::uint64_t seed, std::uint64_t model_fingerprint,
                  std::uint64_t district_fingerprint,
                  std::vector<std::vector<SchoolId>> candidates = {})
        : scenarios_(scenarios),
          students_(students),
          schools_(schools),
          seed_(seed),
          model_fingerprint_(model_fingerprint),
          district_fingerprint_(district_fingerprint) {
        if (scenarios == 0) throw DomainError("scenario count must be at least 1");
        if (schools == 0 || schools > std::numeric_limits<Entry>::max())
            throw DomainError("school count out of range for a scenario table");
        if (candidates.empty()) {
            width_ = schools;
        } else {
            if (candidates.size() != students)
                throw DomainError("candidate lists must cover every student");
            width_ = candidates.front().size();
            if (width_ == 0 || width_ > schools) throw DomainError("invalid candidate cap");
            candidates_.reserve(students * width_);
            for (const auto& row : candidates) {
                if (row.size() != width_) throw DomainError("candidate lists differ in length");
                for (SchoolId s : row) {
                    if (s >= schools) throw DomainError("candidate school out of range");
                    candidates_.push_back(static_cast<Entry>(s));
                }
            }
        }
        choices_.assign(scenarios_ * students_ * width_, 0);
    }

    [[nodiscard]] std::size_t scenario_count() const noexcept { return scenarios_; }
    [[nodiscard]] std::size_t student_count() const noexcept { return students_; }
    [[nodiscard]] std::size_t school_count() const noexcept { return schools_; }
    [[nodiscard]] std::size_t candidates_per_student() const noexcept { return width_; }
    [[nodiscard]] bool capped() const noexcept { return !candidates_.empty(); }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t model_fingerprint() const noexcept { return model_fingerprint_; }
    [[nodiscard]] std::uint64_t district_fingerprint() const noexcept { return district_fingerprint_; }
    /// Hash of the run configuration that produced the table; 0 when not recorded.
    [[nodiscard]] std::uint64_t config_hash() const noexcept { return config_hash_; }
    void set_config_hash(std::uint64_t h) noexcept { config_hash_ = h; }

    /// Candidate school at position k of student n's list.
    [[nodiscard]] SchoolId candidate(StudentId n, std::size_t k) const {
        return capped() ? candidates_[n * width_ + k] : static_cast<SchoolId>(k);
    }

    /// Whether A_n^i(s) is stored for this student and zoned school.
    [[nodiscard]] bool supports(StudentId n, SchoolId s) const {
        if (s >= schools_ || n >= students_) return false;
        return !capped() || slot_of(n, s) < width_;
    }

    [[nodiscard]] SchoolId at(std::size_t scenario, StudentId n, SchoolId zoned) const {
        if (!capped()) return choices_[(scenario * students_ + n) * width_ + zoned];
        const auto k = slot_of(n, zoned);
        if (k >= width_)
            throw DomainError("scenario table has no entry for student " + std::to_string(n) +
                              " zoned to school " + std::to_string(zoned));
        return choices_[(scenario * students_ + n) * width_ + k];
    }

    /// Sets the choice at candidate position k.
    void set(std::size_t scenario, StudentId n, std::size_t k, SchoolId chosen) {
        if (chosen >= schools_) throw DomainError("chosen school out of range");
        choices_.at((scenario * students_ + n) * width_ + k) = static_cast<Entry>(chosen);
    }

    [[nodiscard]] std::span<const Entry> raw_choices() const noexcept { return choices_; }
    [[nodiscard]] std::span<Entry> raw_choices() noexcept { return choices_; }
    [[nodiscard]] std::span<const Entry> raw_candidates() const noexcept { return candidates_; }

    friend bool operator==(const ScenarioTable&, const ScenarioTable&) = default;

private:
    [[nodiscard]] std::size_t slot_of(StudentId n, SchoolId s) const {
        const auto* row = candidates_.data() + n * width_;
        const auto* hit = std::find(row, row + width_, static_cast<Entry>(s));
        return static_cast<std::size_t>(hit - row);
    }

    std::size_t scenarios_ = 0;
    std::size_t students_ = 0;
    std::size_t schools_ = 0;
    std::size_t width_ = 0;
    std::uint64_t seed_ = 0;
    std::uint64_t model_fingerprint_ = 0;
    std::uint64_t district_fingerprint_ = 0;
    std::uint64_t config_hash_ = 0;
    std::vector<Entry> candidates_;
    std::vector<Entry> choices_;
};

struct AttendanceRealization {
    std::vector<SchoolId> attended;
    std::int64_t follow_count = 0;
};

/// Attendance of every student under a zoning in one scenario: a pure table lookup.
inline AttendanceRealization realize(const Zoning& zoning, const ScenarioTable& table,
                                     std::size_t scenario, const District& district) {
    if (scenario >= table.scenario_count())
        throw DomainError("scenario index " + std::to_string(scenario) + " out of range");
    if (table.student_count() != district.students().size())
        throw DomainError("scenario table was built for a different student population");
    AttendanceRealization out;
    out.attended.resize(table.student_count());
    for (const auto& st : district.students()) {
        const SchoolId zoned = zoning.at(st.block);
        const SchoolId chosen = table.at(scenario, st.id, zoned);
        out.attended[st.id] = chosen;
        if (chosen == zoned) ++out.follow_count;
    }
    return out;
}

}  // namespace rwc
