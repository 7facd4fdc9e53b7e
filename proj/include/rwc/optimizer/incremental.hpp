#pragma once

#include <cstdint>
#include <vector>

#include "rwc/dissimilarity.hpp"
#include "rwc/feasibility.hpp"
#include "rwc/optimizer/moves.hpp"
#include "rwc/scenario_table.hpp"

namespace rwc {

/// Per-scenario school counts and integer dissimilarity numerators for one zoning,
/// updated in place as blocks move. Only students of the moved block change attendance.
class IncrementalObjective {
public:
    struct MoveEffect {
        std::int64_t delta_numerator = 0;  // change of the scenario-summed numerator
        bool population_ok = true;         // every touched school stays within its bounds
    };

    IncrementalObjective(const District& d, const ScenarioTable& table, Zoning start,
                         const FeasibilityParams& params)
        : district_(&d),
          table_(&table),
          zoning_(std::move(start)),
          scale_(d.lower_ses_total(), d.student_count()),
          schools_(d.school_count()),
          scenarios_(table.scenario_count()) {
        if (zoning_.size() != d.block_count()) throw DomainError("zoning does not cover every block");
        if (table.student_count() != d.students().size() || table.school_count() != schools_)
            throw DomainError("scenario table does not match the district");
        bounds_.reserve(schools_);
        for (const auto& s : d.schools()) bounds_.push_back(population_bounds(s.current_enrollment, params.alpha));
        total_.assign(scenarios_ * schools_, 0);
        lower_.assign(scenarios_ * schools_, 0);
        for (const auto& st : d.students()) {
            const SchoolId z = zoning_[st.block];
            for (std::size_t i = 0; i < scenarios_; ++i) {
                const auto a = table.at(i, st.id, z);
                ++total_[i * schools_ + a];
                if (st.ses_category == kLowerSes) ++lower_[i * schools_ + a];
            }
        }
        for (std::size_t i = 0; i < scenarios_; ++i)
            for (std::size_t s = 0; s < schools_; ++s)
                numerator_ += scale_.term(total_[i * schools_ + s], lower_[i * schools_ + s]);
    }

    [[nodiscard]] const Zoning& zoning() const noexcept { return zoning_; }
    [[nodiscard]] std::int64_t numerator() const noexcept { return numerator_; }
    [[nodiscard]] double mean() const noexcept { return to_mean(numerator_); }
    [[nodiscard]] double to_mean(std::int64_t numerator) const noexcept {
        return static_cast<double>(numerator) /
               (static_cast<double>(scenarios_) * static_cast<double>(scale_.denominator()));
    }

    /// Whether every scenario's counts respect the population bounds.
    [[nodiscard]] bool population_feasible() const {
        for (std::size_t i = 0; i < scenarios_; ++i)
            for (std::size_t s = 0; s < schools_; ++s) {
                const auto c = total_[i * schools_ + s];
                if (c < bounds_[s].lower || c > bounds_[s].upper) return false;
            }
        return true;
    }

    [[nodiscard]] MoveEffect evaluate(const Move& m) { return visit(m, false); }

    void apply(const Move& m) {
        const auto effect = visit(m, true);
        numerator_ += effect.delta_numerator;
        zoning_.assign(m.block, m.to);
    }

private:
    MoveEffect visit(const Move& m, bool commit) {
        MoveEffect eff;
        const auto& residents = district_->block(m.block).resident_students;
        for (std::size_t i = 0; i < scenarios_; ++i) {
            touched_.clear();
            for (StudentId n : residents) {
                const auto before = table_->at(i, n, m.from);
                const auto after = table_->at(i, n, m.to);
                if (before == after) continue;
                const int lower = district_->student(n).ses_category == kLowerSes ? 1 : 0;
                bump(before, -1, -lower);
                bump(after, +1, +lower);
            }
            for (const auto& t : touched_) {
                const auto idx = i * schools_ + t.school;
                const auto c = total_[idx], g = lower_[idx];
                const auto c2 = c + t.dc, g2 = g + t.dg;
                eff.delta_numerator += scale_.term(c2, g2) - scale_.term(c, g);
                if (c2 < bounds_[t.school].lower || c2 > bounds_[t.school].upper) eff.population_ok = false;
                if (commit) {
                    total_[idx] = c2;
                    lower_[idx] = g2;
                }
            }
        }
        return eff;
    }

    struct Touch {
        SchoolId school;
        std::int64_t dc;
        std::int64_t dg;
    };

    void bump(SchoolId s, std::int64_t dc, std::int64_t dg) {
        for (auto& t : touched_)
            if (t.school == s) {
                t.dc += dc;
                t.dg += dg;
                return;
            }
        touched_.push_back({s, dc, dg});
    }

    const District* district_;
    const ScenarioTable* table_;
    Zoning zoning_;
    DissimilarityScale scale_;
    std::size_t schools_;
    std::size_t scenarios_;
    std::vector<PopulationBounds> bounds_;
    std::vector<std::int64_t> total_;
    std::vector<std::int64_t> lower_;
    std::int64_t numerator_ = 0;
    std::vector<Touch> touched_;
};

/// Change in mean SAA dissimilarity caused by a move, by incremental count updates.
inline double objective_delta(const Zoning& zoning, const Move& move, const ScenarioTable& table,
                              const District& district) {
    FeasibilityParams loose{1.0, 1.0};
    IncrementalObjective state(district, table, zoning, loose);
    return state.to_mean(state.evaluate(move).delta_numerator);
}

}  // namespace rwc
