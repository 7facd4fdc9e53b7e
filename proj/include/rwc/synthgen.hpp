#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rwc/district.hpp"
#include "rwc/hash.hpp"

namespace rwc {

/// Coefficients of the latent-utility process that produces historical labels.
/// `zoned_bonus` and `magnet` are overwritten by calibration when targets are active.
struct GroundTruth {
    double travel_per_minute = 0.25;
    double magnet = 0.0;
    double same_choice_zone = 0.8;
    double rating_ratio = 0.8;
    double zoned_bonus = 3.0;
    double magnet_history = 2.5;   // student previously opted out to a magnet
    double opt_out_history = 1.2;  // student previously opted out; lowers the zoned bonus
    std::array<double, 3> zoned_shift_by_ses{0.0, 0.0, 0.0};
};

struct GenParams {
    std::size_t n_blocks = 400;
    std::size_t n_schools = 8;
    std::size_t n_magnets = 2;
    std::size_t n_students = 3000;
    std::size_t n_choice_zones = 3;
    double ses_correlation_length = 1.5;  // km
    double follow_rate_target = 0.65;
    double magnet_share_target = 0.20;  // <= 0 disables magnet calibration
    double block_size_km = 0.5;
    double empty_block_fraction = 0.08;
    std::uint64_t seed = 1;
    GroundTruth truth;

    void validate() const {
        if (n_schools == 0) throw ConfigError("n_schools must be at least 1");
        if (n_blocks < n_schools) throw ConfigError("n_schools cannot exceed n_blocks");
        if (n_magnets > n_schools) throw ConfigError("n_magnets cannot exceed n_schools");
        if (n_students < 2) throw ConfigError("n_students must be at least 2");
        if (n_choice_zones == 0 || n_choice_zones > n_schools)
            throw ConfigError("n_choice_zones must lie in [1, n_schools]");
        if (!(follow_rate_target > 0.0 && follow_rate_target < 1.0))
            throw ConfigError("follow_rate_target must lie in (0,1)");
        if (!(ses_correlation_length > 0.0)) throw ConfigError("ses_correlation_length must be positive");
        if (!(block_size_km > 0.0)) throw ConfigError("block_size_km must be positive");
        if (!(empty_block_fraction >= 0.0 && empty_block_fraction < 1.0))
            throw ConfigError("empty_block_fraction must lie in [0,1)");
    }
};

/// Driving-time proxy: straight-line km at 30 km/h plus two minutes.
inline double proxy_travel_minutes(double km) noexcept { return km / 30.0 * 60.0 + 2.0; }

namespace detail {

inline std::vector<SchoolId> farthest_point_order(const std::vector<Point>& pts, std::size_t k,
                                                  std::size_t first) {
    std::vector<SchoolId> chosen{static_cast<SchoolId>(first)};
    std::vector<double> mind(pts.size(), std::numeric_limits<double>::infinity());
    while (chosen.size() < k) {
        const auto last = chosen.back();
        for (std::size_t i = 0; i < pts.size(); ++i) mind[i] = std::min(mind[i], distance(pts[i], pts[last]));
        std::size_t best = 0;
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (mind[i] > mind[best]) best = i;
        chosen.push_back(static_cast<SchoolId>(best));
    }
    return chosen;
}

inline std::array<double, kRaceCount> race_mix(int ses_category) {
    // black, white, asian, native, hispanic, pacific_islander, multiple
    switch (ses_category) {
        case 0: return {0.45, 0.15, 0.02, 0.02, 0.30, 0.01, 0.05};
        case 1: return {0.27, 0.38, 0.05, 0.01, 0.23, 0.01, 0.05};
        default: return {0.12, 0.60, 0.10, 0.01, 0.11, 0.01, 0.05};
    }
}

}  // namespace detail

/// Builds a district on a jittered grid with a spatially blurred SES field, population-
/// weighted school sites, contiguous capacity-balanced status-quo zones and overlapping
/// choice zones. Every student initially attends the zoned school; simulate_history
/// replaces those placeholder labels.
///
/// Random draws come from one generator in this order: blocks (jitter, SES noise,
/// population weight, emptiness), schools (first site, magnet order, ratings), students
/// (block, race, grade, history).
inline District generate_district(const GenParams& params) {
    params.validate();
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const std::size_t nb = params.n_blocks;
    const std::size_t ns = params.n_schools;
    const double h = params.block_size_km;
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(nb))));

    // Blocks.
    std::vector<Block> blocks(nb);
    std::vector<double> noise(nb), weight(nb);
    for (std::size_t k = 0; k < nb; ++k) {
        const auto r = k / cols, c = k % cols;
        Block& b = blocks[k];
        b.id = static_cast<BlockId>(k);
        b.cell = {static_cast<double>(c) * h, static_cast<double>(r) * h,
                  static_cast<double>(c + 1) * h, static_cast<double>(r + 1) * h};
        const double jx = (unit(rng) - 0.5) * 0.5 * h;
        const double jy = (unit(rng) - 0.5) * 0.5 * h;
        b.centroid = {(static_cast<double>(c) + 0.5) * h + jx, (static_cast<double>(r) + 0.5) * h + jy};
        noise[k] = gauss(rng);
        weight[k] = std::exp(0.5 * gauss(rng));
        if (unit(rng) < params.empty_block_fraction) weight[k] = 0.0;
        if (c > 0) b.neighbors.push_back(static_cast<BlockId>(k - 1));
        if (c + 1 < cols && k + 1 < nb) b.neighbors.push_back(static_cast<BlockId>(k + 1));
        if (r > 0) b.neighbors.push_back(static_cast<BlockId>(k - cols));
        if (k + cols < nb) b.neighbors.push_back(static_cast<BlockId>(k + cols));
        std::sort(b.neighbors.begin(), b.neighbors.end());
    }
    if (std::all_of(weight.begin(), weight.end(), [](double w) { return w == 0.0; })) weight[0] = 1.0;
    {
        const double two_l2 = 2.0 * params.ses_correlation_length * params.ses_correlation_length;
        for (std::size_t a = 0; a < nb; ++a) {
            double acc = 0.0;
            for (std::size_t j = 0; j < nb; ++j) {
                const double d = distance(blocks[a].centroid, blocks[j].centroid);
                acc += std::exp(-d * d / two_l2) * noise[j];
            }
            blocks[a].ses_index = acc;
        }
    }

    // Schools: sites from a population-weighted Lloyd iteration seeded by farthest points.
    std::vector<Point> centroids(nb);
    for (std::size_t k = 0; k < nb; ++k) centroids[k] = blocks[k].centroid;
    const std::size_t first_site = std::uniform_int_distribution<std::size_t>(0, nb - 1)(rng);
    std::vector<Point> centers;
    for (auto b : detail::farthest_point_order(centroids, ns, first_site)) centers.push_back(centroids[b]);
    for (int iter = 0; iter < 15; ++iter) {
        std::vector<double> sx(ns, 0.0), sy(ns, 0.0), sw(ns, 0.0);
        for (std::size_t k = 0; k < nb; ++k) {
            std::size_t best = 0;
            for (std::size_t s = 1; s < ns; ++s)
                if (distance(centroids[k], centers[s]) < distance(centroids[k], centers[best])) best = s;
            const double w = weight[k] + 0.05;
            sx[best] += w * centroids[k].x;
            sy[best] += w * centroids[k].y;
            sw[best] += w;
        }
        for (std::size_t s = 0; s < ns; ++s)
            if (sw[s] > 0.0) centers[s] = {sx[s] / sw[s], sy[s] / sw[s]};
    }
    std::vector<School> schools(ns);
    std::vector<char> is_campus(nb, 0);
    for (std::size_t s = 0; s < ns; ++s) {
        std::size_t best = nb;
        for (std::size_t k = 0; k < nb; ++k) {
            if (is_campus[k]) continue;
            if (best == nb || distance(centroids[k], centers[s]) < distance(centroids[best], centers[s]))
                best = k;
        }
        is_campus[best] = 1;
        schools[s].id = static_cast<SchoolId>(s);
        schools[s].campus_block = static_cast<BlockId>(best);
    }
    std::vector<Point> sites(ns);
    for (std::size_t s = 0; s < ns; ++s) sites[s] = centroids[schools[s].campus_block];
    if (params.n_magnets > 0) {
        const auto first = std::uniform_int_distribution<std::size_t>(0, ns - 1)(rng);
        for (auto s : detail::farthest_point_order(sites, params.n_magnets, first)) schools[s].is_magnet = true;
    }
    {
        double mean = 0.0, sq = 0.0;
        for (const auto& b : blocks) mean += b.ses_index;
        mean /= static_cast<double>(nb);
        for (const auto& b : blocks) sq += (b.ses_index - mean) * (b.ses_index - mean);
        const double sd = std::sqrt(sq / static_cast<double>(nb)) + 1e-12;
        auto clamp_round = [](double v) { return std::round(std::clamp(v, 2.0, 10.0) * 10.0) / 10.0; };
        for (auto& sch : schools) {
            const double z = (blocks[sch.campus_block].ses_index - mean) / sd;
            const double base = 6.0 + 1.0 * z + 0.7 * gauss(rng);
            sch.ratings[0] = clamp_round(base);
            sch.ratings[1] = clamp_round(base + 0.8 * gauss(rng));
            sch.ratings[2] = clamp_round(5.5 + 1.5 * gauss(rng));
            sch.ratings[3] = clamp_round(5.5 - 0.5 * z + 1.2 * gauss(rng));
        }
    }

    // Choice zones: schools join the zone of the nearest zone seed, and the second
    // nearest as well when it is almost as close.
    {
        const auto seeds = detail::farthest_point_order(sites, params.n_choice_zones, 0);
        for (auto& sch : schools) {
            std::vector<std::pair<double, ChoiceZoneId>> d;
            for (std::size_t z = 0; z < seeds.size(); ++z)
                d.emplace_back(distance(sites[sch.id], sites[seeds[z]]), static_cast<ChoiceZoneId>(z));
            std::sort(d.begin(), d.end());
            sch.choice_zones.push_back(d[0].second);
            if (d.size() > 1 && d[1].first <= 1.3 * d[0].first) sch.choice_zones.push_back(d[1].second);
            std::sort(sch.choice_zones.begin(), sch.choice_zones.end());
        }
    }

    // Students.
    std::vector<Student> students(params.n_students);
    std::vector<std::size_t> per_block(nb, 0);
    {
        std::discrete_distribution<std::size_t> pick_block(weight.begin(), weight.end());
        for (auto& st : students) {
            st.block = static_cast<BlockId>(pick_block(rng));
            ++per_block[st.block];
        }
    }
    // SES terciles are cut on the student-weighted distribution of the block index.
    {
        std::vector<std::size_t> order(nb);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return blocks[a].ses_index < blocks[b].ses_index; });
        std::vector<int> category(nb, 0);
        const double n = static_cast<double>(params.n_students);
        double cum = 0.0;
        for (auto k : order) {
            const double mid = cum + 0.5 * static_cast<double>(per_block[k]);
            category[k] = std::clamp(static_cast<int>(3.0 * mid / n), 0, 2);
            cum += static_cast<double>(per_block[k]);
        }
        for (std::size_t n_id = 0; n_id < students.size(); ++n_id) {
            auto& st = students[n_id];
            st.id = static_cast<StudentId>(n_id);
            st.ses_category = category[st.block];
        }
    }
    for (auto& st : students) {
        const auto mix = detail::race_mix(st.ses_category);
        st.race = static_cast<Race>(std::discrete_distribution<int>(mix.begin(), mix.end())(rng));
        st.grade = std::uniform_int_distribution<int>(0, 5)(rng);
        auto& hist = st.history;
        hist.new_to_system = unit(rng) < (st.grade == 0 ? 0.85 : 0.08);
        const bool magnet_taste = unit(rng) < 0.22;
        const bool choosy = unit(rng) < 0.30;
        hist.has_sibling = unit(rng) < 0.35;
        const double u_same = unit(rng), u_opt = unit(rng), u_mag = unit(rng), u_multi = unit(rng);
        if (!hist.new_to_system) {
            hist.attended_same_school_as_sibling = hist.has_sibling && u_same < 0.75;
            hist.opted_out_to_magnet_before = magnet_taste && u_mag < 0.7;
            hist.opted_out_before = hist.opted_out_to_magnet_before || u_opt < (choosy ? 0.7 : 0.08);
            hist.attended_multiple_schools = u_multi < (choosy ? 0.3 : 0.08);
        }
    }

    // Capacity-balanced region growing from the campus blocks.
    std::vector<std::int64_t> remaining(ns);
    const auto capacity = static_cast<std::int64_t>(params.n_students / ns);
    std::vector<int> zone(nb, -1);
    std::vector<std::set<std::pair<double, BlockId>>> frontier(ns);
    auto key = [&](BlockId b, std::size_t s) {
        return std::make_pair(distance(centroids[b], sites[s]), b);
    };
    auto attach = [&](BlockId b, std::size_t s) {
        zone[b] = static_cast<int>(s);
        remaining[s] -= static_cast<std::int64_t>(per_block[b]);
        for (std::size_t t = 0; t < ns; ++t) frontier[t].erase(key(b, t));
        for (BlockId nb_id : blocks[b].neighbors)
            if (zone[nb_id] < 0) frontier[s].insert(key(nb_id, s));
    };
    for (std::size_t s = 0; s < ns; ++s) remaining[s] = capacity;
    for (std::size_t s = 0; s < ns; ++s) attach(schools[s].campus_block, s);
    for (std::size_t placed = ns; placed < nb; ++placed) {
        std::size_t best = ns;
        for (std::size_t s = 0; s < ns; ++s) {
            if (frontier[s].empty()) continue;
            if (best == ns || remaining[s] > remaining[best]) best = s;
        }
        if (best == ns) throw ConfigError("block graph is disconnected");
        attach(frontier[best].begin()->second, best);
    }
    for (std::size_t k = 0; k < nb; ++k) {
        blocks[k].status_quo_school = static_cast<SchoolId>(zone[k]);
        blocks[k].travel_time.resize(ns);
        for (std::size_t s = 0; s < ns; ++s)
            blocks[k].travel_time[s] = proxy_travel_minutes(distance(centroids[k], sites[s]));
    }
    for (auto& st : students) {
        st.actual_school = blocks[st.block].status_quo_school;
        ++schools[st.actual_school].current_enrollment;
    }

    if (params.n_magnets > 0) {
        const std::size_t r = std::min<std::size_t>(12, ns);
        for (const auto& b : blocks) {
            std::vector<SchoolId> order(ns);
            std::iota(order.begin(), order.end(), 0);
            std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r), order.end(),
                              [&](SchoolId x, SchoolId y) {
                                  return std::pair(b.travel_time[x], x) < std::pair(b.travel_time[y], y);
                              });
            if (std::none_of(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r),
                             [&](SchoolId s) { return schools[s].is_magnet; }))
                throw ConfigError("n_magnets too small: block " + std::to_string(b.id) +
                                  " has no magnet among its 12 nearest schools");
        }
    }
    return District(std::move(blocks), std::move(schools), std::move(students), params.n_choice_zones);
}

namespace detail {

/// Deterministic part of the ground-truth utility of school s for a student zoned to `zoned`.
inline double truth_utility(const District& d, const Student& st, SchoolId zoned, SchoolId s,
                            const GroundTruth& gt) {
    const Block& b = d.block(st.block);
    const School& sch = d.school(s);
    double u = -gt.travel_per_minute * b.travel_time[s];
    if (sch.is_magnet) {
        u += gt.magnet;
        if (st.history.opted_out_to_magnet_before) u += gt.magnet_history;
    }
    if (s == zoned) {
        u += gt.zoned_bonus + gt.zoned_shift_by_ses[static_cast<std::size_t>(st.ses_category)];
        if (st.history.opted_out_before) u -= gt.opt_out_history;
    } else if (d.in_same_choice_zone(s, zoned)) {
        u += gt.same_choice_zone;
    }
    u += gt.rating_ratio * sch.rating(RatingKind::overall) / d.school(zoned).rating(RatingKind::overall);
    return u;
}

struct ChoiceShares {
    double follow = 0.0;
    double magnet_opt_out = 0.0;
};

/// Expected follow and magnet opt-out shares under the logit choice probabilities.
inline ChoiceShares expected_shares(const District& d, const GroundTruth& gt) {
    ChoiceShares out;
    std::vector<double> u(d.school_count());
    for (const auto& st : d.students()) {
        const SchoolId zoned = d.status_quo_school_of(st.id);
        double mx = -std::numeric_limits<double>::infinity();
        for (SchoolId s = 0; s < u.size(); ++s) mx = std::max(mx, u[s] = truth_utility(d, st, zoned, s, gt));
        double z = 0.0;
        for (double& v : u) z += (v = std::exp(v - mx));
        out.follow += u[zoned] / z;
        for (SchoolId s = 0; s < u.size(); ++s)
            if (s != zoned && d.school(s).is_magnet) out.magnet_opt_out += u[s] / z;
    }
    const double n = static_cast<double>(d.students().size());
    out.follow /= n;
    out.magnet_opt_out /= n;
    return out;
}

/// Bisection on the zoned-school bonus so the expected follow share hits the target.
inline double calibrate_zoned_bonus(const District& d, GroundTruth gt, double target) {
    double lo = -30.0, hi = 40.0;
    for (int it = 0; it < 50; ++it) {
        gt.zoned_bonus = 0.5 * (lo + hi);
        (expected_shares(d, gt).follow < target ? lo : hi) = gt.zoned_bonus;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Calibrated ground-truth coefficients for a district: the zoned bonus matches the
/// follow-rate target and, when enabled and attainable, the magnet coefficient matches
/// the magnet opt-out share.
inline GroundTruth calibrate_ground_truth(const District& d, const GenParams& params) {
    GroundTruth gt = params.truth;
    const bool any_magnet = std::any_of(d.schools().begin(), d.schools().end(),
                                        [](const School& s) { return s.is_magnet; });
    if (params.magnet_share_target > 0.0 && any_magnet &&
        params.magnet_share_target < 0.95 * (1.0 - params.follow_rate_target)) {
        auto share_at = [&](double magnet) {
            GroundTruth g = gt;
            g.magnet = magnet;
            g.zoned_bonus = detail::calibrate_zoned_bonus(d, g, params.follow_rate_target);
            return std::pair(detail::expected_shares(d, g).magnet_opt_out, g);
        };
        double lo = -15.0, hi = 15.0;
        for (int it = 0; it < 30; ++it) {
            const double mid = 0.5 * (lo + hi);
            (share_at(mid).first < params.magnet_share_target ? lo : hi) = mid;
        }
        return share_at(0.5 * (lo + hi)).second;
    }
    gt.zoned_bonus = detail::calibrate_zoned_bonus(d, gt, params.follow_rate_target);
    return gt;
}

/// Draws every student's attended school from the calibrated latent-utility process
/// (Gumbel noise, argmax) and resets school enrollments to the labelled attendance.
inline District simulate_history(const District& d, const GenParams& params) {
    const GroundTruth gt = calibrate_ground_truth(d, params);
    std::mt19937_64 rng(derive_seed(params.seed, 0x4849535429ULL));
    std::uniform_real_distribution<double> unit(std::numeric_limits<double>::min(), 1.0);
    std::vector<Student> students(d.students().begin(), d.students().end());
    for (auto& st : students) {
        const SchoolId zoned = d.status_quo_school_of(st.id);
        SchoolId best = 0;
        double best_u = -std::numeric_limits<double>::infinity();
        for (SchoolId s = 0; s < d.school_count(); ++s) {
            const double u = detail::truth_utility(d, st, zoned, s, gt) - std::log(-std::log(unit(rng)));
            if (u > best_u) {
                best_u = u;
                best = s;
            }
        }
        st.actual_school = best;
    }
    std::vector<School> schools(d.schools().begin(), d.schools().end());
    for (auto& s : schools) s.current_enrollment = 0;
    for (const auto& st : students) ++schools[st.actual_school].current_enrollment;
    std::vector<Block> blocks(d.blocks().begin(), d.blocks().end());
    return District(std::move(blocks), std::move(schools), std::move(students), d.choice_zone_count());
}

/// generate_district followed by simulate_history.
inline District generate_labeled_district(const GenParams& params) {
    return simulate_history(generate_district(params), params);
}

}  // namespace rwc
