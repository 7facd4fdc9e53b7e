#pragma once

#include <chrono>
#include <string>

#include "rwc/optimizer/result.hpp"

namespace rwc {

inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Exact minimum of the SAA objective over all feasible zonings, by enumerating every
/// assignment of schools to blocks in lexicographic order. The first zoning reaching the
/// minimum wins ties.
inline SolveResult brute_force_optimize(const District& d, const ScenarioTable& table,
                                        const FeasibilityParams& params) {
    params.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const auto nb = d.block_count();
    const auto ns = d.school_count();
    std::uint64_t space = 1;
    for (std::size_t b = 0; b < nb; ++b) {
        if (space > kBruteForceLimit / ns)
            throw DomainError("instance too large for enumeration: " + std::to_string(ns) + "^" +
                              std::to_string(nb) + " zonings exceed the limit of " +
                              std::to_string(kBruteForceLimit));
        space *= ns;
    }
    const DissimilarityScale scale(d.lower_ses_total(), d.student_count());
    std::vector<SchoolId> a(nb, 0);
    bool found = false;
    std::int64_t best_num = 0;
    Zoning best;
    SearchStats stats;
    for (std::uint64_t k = 0; k < space; ++k) {
        if (k > 0) {
            std::size_t pos = nb;
            while (pos > 0) {
                --pos;
                if (++a[pos] < ns) break;
                a[pos] = 0;
            }
        }
        ++stats.iterations;
        const Zoning z(a);
        if (!check_contiguity(z, d).passed() || !check_travel_time(z, d, params).passed()) {
            ++stats.rejected_structure;
            continue;
        }
        std::int64_t num = 0;
        bool ok = true;
        for (std::size_t i = 0; i < table.scenario_count() && ok; ++i) {
            const auto counts = counts_under_attendance(d, realize(z, table, i, d).attended);
            ok = check_population_bounds(counts, d, params).passed();
            if (ok) num += dissimilarity_numerator(counts, scale);
        }
        if (!ok) {
            ++stats.rejected_population;
            continue;
        }
        ++stats.proposals;
        if (!found || num < best_num) {
            found = true;
            best_num = num;
            best = z;
        }
    }
    if (!found) throw ConfigError("no feasible zoning exists for these parameters");
    SolveResult res;
    res.zoning = best;
    res.objective = saa_objective(best, table, d);
    res.params = params;
    res.stats = stats;
    res.rezoned_students = rezoned_student_count(best, Zoning::status_quo(d), d);
    res.certificate = is_feasible(best, d, params, table);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace rwc
