#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "rwc/optimizer/incremental.hpp"
#include "rwc/optimizer/moves.hpp"
#include "rwc/optimizer/result.hpp"

namespace rwc {

enum class Method { R, FR, RWC };

inline std::string_view method_name(Method m) noexcept {
    switch (m) {
        case Method::R: return "R";
        case Method::FR: return "FR";
        default: return "RWC";
    }
}

inline Method parse_method(std::string_view s) {
    if (s == "R") return Method::R;
    if (s == "FR") return Method::FR;
    if (s == "RWC") return Method::RWC;
    throw ConfigError("unknown method '" + std::string(s) + "' (expected R, FR or RWC)");
}

struct SolverConfig {
    FeasibilityParams params;
    std::size_t scenarios = 30;
    double time_limit = 600.0;  // seconds, per run
    std::size_t restarts = 4;
    std::size_t max_iterations = 200'000;  // per restart
    double initial_temperature = 2e-3;
    double cooling = 0.95;
    std::size_t moves_per_temperature = 1'000;
    std::uint64_t seed = 1;
    Method method = Method::RWC;
    bool auto_widen_alpha = true;
    std::size_t workers = 1;

    void validate() const {
        params.validate();
        if (!(time_limit > 0.0)) throw ConfigError("time_limit must be positive");
        if (!(cooling > 0.0 && cooling < 1.0)) throw ConfigError("cooling factor must lie in (0,1)");
        if (!(initial_temperature >= 0.0)) throw ConfigError("initial temperature must be non-negative");
        if (moves_per_temperature == 0) throw ConfigError("moves_per_temperature must be positive");
        if (restarts == 0) throw ConfigError("restarts must be at least 1");
        if (scenarios == 0) throw ConfigError("scenario count must be at least 1");
    }
};

/// Hooks into the search; called from the worker running `restart`.
struct SearchObserver {
    std::function<void(std::size_t restart, const Zoning&)> on_accept;
    std::function<void(std::size_t restart, const Zoning&)> on_incumbent;
};

namespace detail {

struct Incumbent {
    Zoning zoning;
    std::int64_t numerator = 0;
    std::int64_t rezoned = 0;

    /// Lower objective, then fewer rezoned students, then lexicographic order.
    [[nodiscard]] bool better_than(const Incumbent& o) const {
        if (numerator != o.numerator) return numerator < o.numerator;
        if (rezoned != o.rezoned) return rezoned < o.rezoned;
        return zoning < o.zoning;
    }
};

}  // namespace detail

/// Simulated annealing over single-block boundary moves. Every visited zoning satisfies
/// all hard constraints: moves that would break contiguity, the travel-time cap, or a
/// population bound in any scenario are never taken. Each restart starts from the status
/// quo with its own seed; the best incumbent across restarts is returned.
///
/// Runs are deterministic for a given seed as long as the iteration budget, not the time
/// limit, ends the search.
inline SolveResult local_search_optimize(const District& d, const ScenarioTable& table, const SolverConfig& config,
                                         const SearchObserver& observer = {}) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const auto deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                   std::chrono::duration<double>(config.time_limit));
    const Zoning start = Zoning::status_quo(d);

    FeasibilityParams params = config.params;
    bool widened = false;
    {
        const auto rep = is_feasible(start, d, params, table);
        if (!rep.total_assignment || !rep.travel.passed() || !rep.contiguity.passed())
            throw ConfigError("status quo is infeasible: " + rep.summary());
        if (!rep.population.empty()) {
            if (!config.auto_widen_alpha)
                throw ConfigError("status quo is infeasible: " + rep.summary());
            params.alpha = minimal_feasible_alpha(start, d, table, params.alpha);
            widened = true;
        }
    }

    const std::size_t restarts = config.restarts;
    std::vector<detail::Incumbent> best(restarts);
    std::vector<SearchStats> stats(restarts);
    std::vector<std::exception_ptr> errors(restarts);

    auto run = [&](std::size_t r) {
        std::mt19937_64 rng(derive_seed(config.seed, r));
        auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        IncrementalObjective state(d, table, start, params);
        auto sizes = zone_sizes(start, d.school_count());
        ZoneConnectivity conn(d);
        std::int64_t rezoned = 0;
        detail::Incumbent inc{start, state.numerator(), 0};
        SearchStats& st = stats[r];
        double temperature = config.initial_temperature;
        const auto nb = d.block_count();
        std::vector<SchoolId> targets;
        for (std::size_t it = 0; it < config.max_iterations; ++it) {
            if ((it & 1023) == 0 && std::chrono::steady_clock::now() > deadline) {
                st.hit_time_limit = true;
                break;
            }
            ++st.iterations;
            if (it > 0 && it % config.moves_per_temperature == 0) temperature *= config.cooling;
            const auto b = static_cast<BlockId>(rng() % nb);
            const Block& blk = d.block(b);
            const SchoolId from = state.zoning()[b];
            targets.clear();
            for (BlockId nbid : blk.neighbors) {
                const SchoolId to = state.zoning()[nbid];
                if (to != from && std::find(targets.begin(), targets.end(), to) == targets.end())
                    targets.push_back(to);
            }
            if (targets.empty()) continue;
            std::sort(targets.begin(), targets.end());
            const Move mv{b, from, targets[rng() % targets.size()]};
            bool structural = travel_time_allowed(blk, mv.to, params.tau);
            if (structural && table.capped())
                for (StudentId n : blk.resident_students) structural = structural && table.supports(n, mv.to);
            structural = structural && conn.survives_removal(state.zoning(), from, b, sizes[from]);
            if (!structural) {
                ++st.rejected_structure;
                continue;
            }
            ++st.proposals;
            const auto eff = state.evaluate(mv);
            if (!eff.population_ok) {
                ++st.rejected_population;
                continue;
            }
            const double delta = state.to_mean(eff.delta_numerator);
            if (delta > 0.0 && !(temperature > 0.0 && unit() < std::exp(-delta / temperature))) {
                ++st.rejected_metropolis;
                continue;
            }
            state.apply(mv);
            --sizes[mv.from];
            ++sizes[mv.to];
            const auto residents = static_cast<std::int64_t>(blk.resident_students.size());
            const bool was_home = mv.from == blk.status_quo_school;
            const bool now_home = mv.to == blk.status_quo_school;
            if (was_home && !now_home) rezoned += residents;
            if (!was_home && now_home) rezoned -= residents;
            ++st.accepted;
            if (observer.on_accept) observer.on_accept(r, state.zoning());
            if (state.numerator() < inc.numerator ||
                (state.numerator() == inc.numerator &&
                 (rezoned < inc.rezoned || (rezoned == inc.rezoned && state.zoning() < inc.zoning)))) {
                inc = {state.zoning(), state.numerator(), rezoned};
                ++st.improvements;
                if (observer.on_incumbent) observer.on_incumbent(r, inc.zoning);
            }
        }
        best[r] = std::move(inc);
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, restarts));
    if (workers == 1) {
        for (std::size_t r = 0; r < restarts; ++r) run(r);
    } else {
        std::mutex m;
        std::size_t next = 0;
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                while (true) {
                    std::size_t r;
                    {
                        std::lock_guard lock(m);
                        if (next == restarts) return;
                        r = next++;
                    }
                    try {
                        run(r);
                    } catch (...) {
                        errors[r] = std::current_exception();
                    }
                }
            });
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::size_t pick = 0;
    for (std::size_t r = 1; r < restarts; ++r)
        if (best[r].better_than(best[pick])) pick = r;
    SolveResult res;
    res.zoning = best[pick].zoning;
    res.objective = saa_objective(res.zoning, table, d);
    res.params = params;
    res.alpha_widened = widened;
    res.rezoned_students = rezoned_student_count(res.zoning, start, d);
    for (const auto& s : stats) {
        res.stats.iterations += s.iterations;
        res.stats.proposals += s.proposals;
        res.stats.accepted += s.accepted;
        res.stats.improvements += s.improvements;
        res.stats.rejected_structure += s.rejected_structure;
        res.stats.rejected_population += s.rejected_population;
        res.stats.rejected_metropolis += s.rejected_metropolis;
        res.stats.hit_time_limit = res.stats.hit_time_limit || s.hit_time_limit;
    }
    res.stats.restarts = restarts;
    res.certificate = is_feasible(res.zoning, d, params, table);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace rwc
