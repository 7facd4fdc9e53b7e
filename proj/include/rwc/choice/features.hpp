#pragma once

#include <array>
#include <string>
#include <vector>

#include "rwc/district.hpp"

namespace rwc {

using FeatureVector = std::vector<double>;

/// Builds the per-student context vector: a static part (demographics, block composition,
/// geography, history) followed by a dynamic part that depends only on the candidate zoned
/// school. Block composition uses residence only, never attendance outcomes.
class Featurizer {
public:
    explicit Featurizer(const District& district) : district_(&district) {
        const auto nb = district.block_count();
        block_race_.assign(nb, {});
        for (const auto& st : district.students()) {
            ++block_race_[st.block][static_cast<std::size_t>(st.race)];
            ++race_total_[static_cast<std::size_t>(st.race)];
        }
        build_names();
    }

    [[nodiscard]] std::size_t dimension() const noexcept { return names_.size(); }
    [[nodiscard]] std::size_t static_dimension() const noexcept { return static_dim_; }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }

    /// Offset of a named feature, for tests and diagnostics.
    [[nodiscard]] std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return i;
        throw DomainError("no feature named '" + name + "'");
    }

    [[nodiscard]] FeatureVector operator()(StudentId n, SchoolId zoned) const {
        FeatureVector x;
        x.reserve(dimension());
        append_static(n, x);
        append_dynamic(zoned, x);
        return x;
    }

    /// Writes the static part once; callers overwrite the dynamic tail per candidate.
    void append_static(StudentId n, FeatureVector& x) const {
        const District& d = *district_;
        const Student& st = d.student(n);
        const Block& blk = d.block(st.block);
        const auto ns = d.school_count();
        const double total = static_cast<double>(d.student_count());
        x.push_back(static_cast<double>(st.ses_category));
        x.push_back(static_cast<double>(st.grade));
        for (std::size_t r = 0; r < kRaceCount; ++r) x.push_back(static_cast<std::size_t>(st.race) == r ? 1.0 : 0.0);
        const double residents = static_cast<double>(blk.resident_students.size());
        x.push_back(residents);
        x.push_back(total > 0.0 ? residents / total : 0.0);
        for (std::size_t r = 0; r < kRaceCount; ++r) x.push_back(static_cast<double>(block_race_[st.block][r]));
        for (std::size_t r = 0; r < kRaceCount; ++r)
            x.push_back(race_total_[r] > 0 ? static_cast<double>(block_race_[st.block][r]) /
                                                 static_cast<double>(race_total_[r])
                                           : 0.0);
        for (std::size_t s = 0; s < ns; ++s) x.push_back(blk.travel_time[s]);
        for (SchoolId s = 0; s < ns; ++s) x.push_back(d.travel_distance(st.block, s));
        for (const auto& sch : d.schools()) x.push_back(sch.is_magnet ? 1.0 : 0.0);
        const auto& h = st.history;
        for (bool f : {h.new_to_system, h.has_sibling, h.attended_same_school_as_sibling, h.opted_out_before,
                       h.opted_out_to_magnet_before, h.attended_multiple_schools})
            x.push_back(f ? 1.0 : 0.0);
    }

    void append_dynamic(SchoolId zoned, FeatureVector& x) const {
        const District& d = *district_;
        const auto ns = d.school_count();
        if (zoned >= ns) throw DomainError("zoned school out of range");
        const School& z = d.school(zoned);
        for (SchoolId s = 0; s < ns; ++s) x.push_back(s == zoned ? 1.0 : 0.0);
        x.push_back(z.is_magnet ? 1.0 : 0.0);
        for (ChoiceZoneId o = 0; o < d.choice_zone_count(); ++o)
            x.push_back(std::find(z.choice_zones.begin(), z.choice_zones.end(), o) != z.choice_zones.end() ? 1.0
                                                                                                             : 0.0);
        for (SchoolId s = 0; s < ns; ++s) x.push_back(d.in_same_choice_zone(s, zoned) ? 1.0 : 0.0);
        for (std::size_t k = 0; k < kRatingKinds; ++k)
            for (const auto& sch : d.schools()) x.push_back(sch.ratings[k] / z.ratings[k]);
    }

private:
    void build_names() {
        const District& d = *district_;
        const auto ns = d.school_count();
        auto per_school = [&](const std::string& stem) {
            for (std::size_t s = 0; s < ns; ++s) names_.push_back(stem + "[" + std::to_string(s) + "]");
        };
        names_ = {"ses_category", "grade"};
        for (std::size_t r = 0; r < kRaceCount; ++r)
            names_.push_back("race=" + std::string(race_name(static_cast<Race>(r))));
        names_.push_back("block_students");
        names_.push_back("block_student_share");
        for (std::size_t r = 0; r < kRaceCount; ++r)
            names_.push_back("block_race_count=" + std::string(race_name(static_cast<Race>(r))));
        for (std::size_t r = 0; r < kRaceCount; ++r)
            names_.push_back("block_race_share=" + std::string(race_name(static_cast<Race>(r))));
        per_school("travel_time");
        per_school("travel_distance");
        per_school("is_magnet");
        for (const char* f : {"new_to_system", "has_sibling", "attended_same_school_as_sibling", "opted_out_before",
                              "opted_out_to_magnet_before", "attended_multiple_schools"})
            names_.emplace_back(f);
        static_dim_ = names_.size();
        per_school("zoned");
        names_.emplace_back("zoned_is_magnet");
        for (std::size_t o = 0; o < d.choice_zone_count(); ++o)
            names_.push_back("zoned_in_choice_zone[" + std::to_string(o) + "]");
        per_school("same_choice_zone");
        for (const char* k : {"overall", "test", "progress", "equity"}) per_school(std::string("rating_ratio_") + k);
    }

    const District* district_;
    std::vector<std::array<std::int64_t, kRaceCount>> block_race_;
    std::array<std::int64_t, kRaceCount> race_total_{};
    std::vector<std::string> names_;
    std::size_t static_dim_ = 0;
};

inline FeatureVector featurize(const Student& student, SchoolId zoned, const District& district) {
    return Featurizer(district)(student.id, zoned);
}

}  // namespace rwc
