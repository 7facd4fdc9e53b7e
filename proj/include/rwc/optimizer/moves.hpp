#pragma once

#include <algorithm>
#include <vector>

#include "rwc/district.hpp"
#include "rwc/feasibility.hpp"

namespace rwc {

/// Reassignment of a single block from one school's zone to another's.
struct Move {
    BlockId block = 0;
    SchoolId from = 0;
    SchoolId to = 0;

    [[nodiscard]] Move reversed() const noexcept { return {block, to, from}; }
    friend bool operator==(const Move&, const Move&) = default;
};

/// Whether the zone of `school` stays connected and campus-anchored once `block` leaves it.
/// Searches the zone from the campus, skipping the departing block.
class ZoneConnectivity {
public:
    explicit ZoneConnectivity(const District& d) : district_(&d) {}

    [[nodiscard]] bool survives_removal(const Zoning& z, SchoolId school, BlockId block,
                                        std::size_t zone_size) {
        const auto campus = district_->school(school).campus_block;
        if (block == campus) return false;
        const auto reached = detail::reachable_count(
            district_->blocks(), campus, [&](BlockId b) { return b != block && z[b] == school; }, seen_, stack_);
        return reached + 1 == zone_size;
    }

private:
    const District* district_;
    std::vector<char> seen_;
    std::vector<BlockId> stack_;
};

inline std::vector<std::size_t> zone_sizes(const Zoning& z, std::size_t schools) {
    std::vector<std::size_t> sizes(schools, 0);
    for (std::size_t b = 0; b < z.size(); ++b) ++sizes.at(z[static_cast<BlockId>(b)]);
    return sizes;
}

/// Single-block moves b: s -> s' where b touches the zone of s', b is not the campus of s,
/// s stays contiguous without b, and the travel-time cap allows s' for b. Population
/// bounds are left to the caller. Moves come in block order, then target-school order.
inline std::vector<Move> boundary_moves(const Zoning& zoning, const District& district, double tau) {
    std::vector<Move> out;
    const auto sizes = zone_sizes(zoning, district.school_count());
    ZoneConnectivity conn(district);
    for (const auto& blk : district.blocks()) {
        const SchoolId from = zoning[blk.id];
        std::vector<SchoolId> targets;
        for (BlockId nb : blk.neighbors) {
            const SchoolId to = zoning[nb];
            if (to != from && std::find(targets.begin(), targets.end(), to) == targets.end()) targets.push_back(to);
        }
        if (targets.empty()) continue;
        std::sort(targets.begin(), targets.end());
        if (!conn.survives_removal(zoning, from, blk.id, sizes[from])) continue;
        for (SchoolId to : targets)
            if (travel_time_allowed(blk, to, tau)) out.push_back({blk.id, from, to});
    }
    return out;
}

}  // namespace rwc
