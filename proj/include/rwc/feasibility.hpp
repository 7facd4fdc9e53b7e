#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rwc/district.hpp"
#include "rwc/scenario_table.hpp"

namespace rwc {

inline SchoolCounts counts_under_attendance(std::span<const Student> students,
                                            std::size_t school_count,
                                            std::span<const SchoolId> attended) {
    if (attended.size() != students.size())
        throw DomainError("attendance map must cover every student");
    SchoolCounts counts(school_count);
    for (const auto& st : students) {
        const SchoolId s = attended[st.id];
        if (s >= school_count) throw DomainError("unknown school " + std::to_string(s));
        ++counts.total[s];
        if (st.ses_category == kLowerSes) ++counts.lower_ses[s];
    }
    return counts;
}

inline SchoolCounts counts_under_attendance(const District& district,
                                            std::span<const SchoolId> attended) {
    return counts_under_attendance(district.students(), district.school_count(), attended);
}

/// Result of one constraint family: empty violation list means pass.
template <class Violation>
struct Check {
    std::vector<Violation> violations;

    [[nodiscard]] bool passed() const noexcept { return violations.empty(); }
    explicit operator bool() const noexcept { return passed(); }
};

/// Inclusive integer enrollment window [lower, upper] for one school.
struct PopulationBounds {
    std::int64_t lower = 0;
    std::int64_t upper = 0;
};

/// alpha is quantized to 1e-9 and the bounds ceil(c(1-alpha)), floor(c(1+alpha)) are taken
/// in integer arithmetic, so a bound that is an exact integer is never lost to rounding.
inline PopulationBounds population_bounds(std::int64_t current_enrollment, double alpha) {
    constexpr std::int64_t kScale = 1'000'000'000;
    const auto a = static_cast<std::int64_t>(std::llround(alpha * static_cast<double>(kScale)));
    const std::int64_t lo_num = current_enrollment * (kScale - a);
    const std::int64_t hi_num = current_enrollment * (kScale + a);
    return {(lo_num + kScale - 1) / kScale, hi_num / kScale};
}

struct PopulationViolation {
    SchoolId school = 0;
    std::int64_t total = 0;
    PopulationBounds bounds;
};

inline Check<PopulationViolation> check_population_bounds(const SchoolCounts& counts,
                                                          const District& district,
                                                          const FeasibilityParams& params) {
    Check<PopulationViolation> out;
    for (const auto& sch : district.schools()) {
        const auto bounds = population_bounds(sch.current_enrollment, params.alpha);
        const auto total = counts.total.at(sch.id);
        if (total < bounds.lower || total > bounds.upper)
            out.violations.push_back({sch.id, total, bounds});
    }
    return out;
}

/// Inclusive travel-time cap with a relative tolerance for float inputs.
inline constexpr double kTravelTolerance = 1e-9;

inline bool travel_time_allowed(const Block& block, SchoolId school, double tau) {
    const double bound = (1.0 + tau) * block.travel_time[block.status_quo_school];
    return block.travel_time[school] <= bound * (1.0 + kTravelTolerance);
}

struct TravelViolation {
    BlockId block = 0;
    SchoolId school = 0;
    double minutes = 0.0;
    double bound = 0.0;
};

inline Check<TravelViolation> check_travel_time(const Zoning& zoning, const District& district,
                                                const FeasibilityParams& params) {
    Check<TravelViolation> out;
    for (const auto& blk : district.blocks()) {
        const SchoolId s = zoning.at(blk.id);
        if (!travel_time_allowed(blk, s, params.tau))
            out.violations.push_back({blk.id, s, blk.travel_time[s],
                                      (1.0 + params.tau) * blk.travel_time[blk.status_quo_school]});
    }
    return out;
}

/// A school's zone is contiguous when its blocks induce a connected subgraph that
/// contains the school's campus block. Failing schools are listed.
inline Check<SchoolId> check_contiguity(const Zoning& zoning, const District& district) {
    Check<SchoolId> out;
    std::vector<std::size_t> zone_size(district.school_count(), 0);
    for (std::size_t b = 0; b < zoning.size(); ++b) ++zone_size.at(zoning[b]);
    std::vector<char> seen;
    std::vector<BlockId> stack;
    for (const auto& sch : district.schools()) {
        const auto reached = detail::reachable_count(
            district.blocks(), sch.campus_block,
            [&](BlockId b) { return zoning[b] == sch.id; }, seen, stack);
        if (reached == 0 || reached != zone_size[sch.id]) out.violations.push_back(sch.id);
    }
    return out;
}

struct FeasibilityReport {
    bool total_assignment = true;
    Check<TravelViolation> travel;
    Check<SchoolId> contiguity;
    /// Scenario index and violation for every population breach.
    std::vector<std::pair<std::size_t, PopulationViolation>> population;

    [[nodiscard]] bool passed() const noexcept {
        return total_assignment && travel.passed() && contiguity.passed() && population.empty();
    }
    explicit operator bool() const noexcept { return passed(); }

    [[nodiscard]] std::string summary() const {
        if (passed()) return "feasible";
        std::string s;
        auto add = [&](const std::string& part) { s += (s.empty() ? "" : "; ") + part; };
        if (!total_assignment) add("zoning is not a total map onto known schools");
        if (!travel.passed())
            add(std::to_string(travel.violations.size()) + " travel-time violation(s), first at block " +
                std::to_string(travel.violations.front().block));
        if (!contiguity.passed())
            add("non-contiguous zone for school " + std::to_string(contiguity.violations.front()));
        if (!population.empty())
            add(std::to_string(population.size()) + " population-bound violation(s), first: school " +
                std::to_string(population.front().second.school) + " in scenario " +
                std::to_string(population.front().first));
        return s;
    }
};

/// Conjunction of one-school-per-block, travel time, contiguity, and population bounds
/// under every scenario's realized attendance.
inline FeasibilityReport is_feasible(const Zoning& zoning, const District& district,
                                     const FeasibilityParams& params, const ScenarioTable& table) {
    FeasibilityReport rep;
    if (zoning.size() != district.block_count()) {
        rep.total_assignment = false;
        return rep;
    }
    for (std::size_t b = 0; b < zoning.size(); ++b)
        if (zoning[b] >= district.school_count()) rep.total_assignment = false;
    if (!rep.total_assignment) return rep;
    rep.travel = check_travel_time(zoning, district, params);
    rep.contiguity = check_contiguity(zoning, district);
    for (std::size_t i = 0; i < table.scenario_count(); ++i) {
        const auto realized = realize(zoning, table, i, district);
        const auto counts = counts_under_attendance(district, realized.attended);
        for (auto& v : check_population_bounds(counts, district, params).violations)
            rep.population.emplace_back(i, v);
    }
    return rep;
}

}  // namespace rwc
