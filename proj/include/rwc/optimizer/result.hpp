#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "rwc/feasibility.hpp"
#include "rwc/scenario.hpp"

namespace rwc {

struct SearchStats {
    std::size_t iterations = 0;
    std::size_t proposals = 0;  // candidate moves that passed the structural checks
    std::size_t accepted = 0;
    std::size_t improvements = 0;  // new incumbents
    std::size_t rejected_structure = 0;  // campus, contiguity, travel time or table coverage
    std::size_t rejected_population = 0;
    std::size_t rejected_metropolis = 0;
    std::size_t restarts = 0;
    bool hit_time_limit = false;
};

struct SolveResult {
    Zoning zoning;
    SaaObjective objective;
    double wall_seconds = 0.0;
    SearchStats stats;
    FeasibilityParams params;  // effective, after any alpha widening
    bool alpha_widened = false;
    std::int64_t rezoned_students = 0;
    FeasibilityReport certificate;
};

inline std::int64_t rezoned_student_count(const Zoning& a, const Zoning& b, const District& d) {
    std::int64_t n = 0;
    for (const auto& blk : d.blocks())
        if (a[blk.id] != b[blk.id]) n += static_cast<std::int64_t>(blk.resident_students.size());
    return n;
}

/// Smallest alpha (on the 1e-9 grid, at least `alpha`) under which the zoning meets the
/// population bounds in every scenario. Throws when no alpha in [0,1] suffices.
inline double minimal_feasible_alpha(const Zoning& zoning, const District& d, const ScenarioTable& table,
                                     double alpha) {
    double need = alpha;
    for (std::size_t i = 0; i < table.scenario_count(); ++i) {
        const auto counts = counts_under_attendance(d, realize(zoning, table, i, d).attended);
        for (const auto& s : d.schools()) {
            const auto c = counts.total[s.id];
            if (s.current_enrollment == 0) {
                if (c != 0)
                    throw ConfigError("population bound: school " + std::to_string(s.id) +
                                      " has no current enrollment but receives students in scenario " +
                                      std::to_string(i));
                continue;
            }
            const double ratio = static_cast<double>(c) / static_cast<double>(s.current_enrollment);
            need = std::max(need, std::abs(ratio - 1.0));
        }
    }
    if (need > 1.0) throw ConfigError("population bound: no alpha in [0,1] admits the zoning");
    double widened = std::ceil(need * 1e9) / 1e9;
    FeasibilityParams p{std::min(widened, 1.0), 1.0};
    for (int guard = 0; guard < 8; ++guard) {
        bool ok = true;
        for (std::size_t i = 0; i < table.scenario_count() && ok; ++i) {
            const auto counts = counts_under_attendance(d, realize(zoning, table, i, d).attended);
            ok = check_population_bounds(counts, d, p).passed();
        }
        if (ok) return p.alpha;
        p.alpha = std::min(1.0, p.alpha + 1e-9);
    }
    return p.alpha;
}

}  // namespace rwc
