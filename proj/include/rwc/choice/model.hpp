#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "rwc/district.hpp"
#include "rwc/hash.hpp"

namespace rwc {

/// Probability of attending each school, indexed by school id.
struct ChoiceDistribution {
    std::vector<double> probs;

    [[nodiscard]] double sum() const noexcept { return std::accumulate(probs.begin(), probs.end(), 0.0); }

    [[nodiscard]] bool valid(double tol = 1e-9) const noexcept {
        return std::all_of(probs.begin(), probs.end(), [](double p) { return p >= 0.0 && std::isfinite(p); }) &&
               std::abs(sum() - 1.0) <= tol;
    }

    /// Schools by decreasing probability, ties broken by school id.
    [[nodiscard]] std::vector<SchoolId> ranking() const {
        std::vector<SchoolId> order(probs.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](SchoolId a, SchoolId b) { return probs[a] > probs[b]; });
        return order;
    }

    [[nodiscard]] SchoolId argmax() const {
        return static_cast<SchoolId>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    }
};

/// Maps (student context, candidate zoned school) to a distribution over schools.
/// Implementations must be immutable after construction and safe to share between threads.
class ChoiceModel {
public:
    virtual ~ChoiceModel() = default;

    [[nodiscard]] virtual ChoiceDistribution distribution(const District& district, StudentId student,
                                                          SchoolId zoned) const = 0;
    [[nodiscard]] virtual std::string name() const = 0;
    /// Identifies the model's parameters; scenario tables record it.
    [[nodiscard]] virtual std::uint64_t fingerprint() const = 0;
    /// False for point-mass models, whose top-k accuracy is not reported.
    [[nodiscard]] virtual bool ranks_schools() const { return true; }
};

/// The r schools with the smallest travel time from the student's block, ties by id.
inline std::vector<SchoolId> nearest_schools(const Student& student, const District& district, std::size_t r) {
    const auto ns = district.school_count();
    if (r > ns)
        throw DomainError("asked for the " + std::to_string(r) + " nearest schools but the district has " +
                          std::to_string(ns));
    const auto& t = district.block(student.block).travel_time;
    std::vector<SchoolId> order(ns);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r), order.end(),
                      [&](SchoolId a, SchoolId b) { return t[a] < t[b] || (t[a] == t[b] && a < b); });
    order.resize(r);
    return order;
}

/// Point mass on the zoned school.
inline ChoiceDistribution follow_model(std::size_t school_count, SchoolId zoned) {
    if (zoned >= school_count) throw DomainError("zoned school out of range");
    ChoiceDistribution d{std::vector<double>(school_count, 0.0)};
    d.probs[zoned] = 1.0;
    return d;
}

/// Masses of the rule-based frequency model before renormalization.
struct FrequencyMasses {
    double zoned = 0.65;
    double magnets = 0.20;  // split over magnets among the nearest `magnet_radius` schools
    double nearby = 0.03;   // each of the nearest `nearby_radius` schools
    std::size_t magnet_radius = 12;
    std::size_t nearby_radius = 5;
};

/// Rule-based choice distribution. Cases are claimed in priority order: the zoned school,
/// then magnets among the nearest 12 (each 0.2 divided by the size of that whole set),
/// then each of the nearest 5; a school takes the mass of its first matching case only.
/// The claimed masses are then renormalized to sum to one.
inline ChoiceDistribution frequency_model(const Student& student, SchoolId zoned, const District& district,
                                          const FrequencyMasses& m = {}) {
    const auto ns = district.school_count();
    if (zoned >= ns) throw DomainError("zoned school out of range");
    std::vector<double> p(ns, 0.0);
    std::vector<char> claimed(ns, 0);
    p[zoned] = m.zoned;
    claimed[zoned] = 1;
    if (m.magnets > 0.0) {
        std::vector<SchoolId> near_magnets;
        for (SchoolId s : nearest_schools(student, district, std::min(m.magnet_radius, ns)))
            if (district.school(s).is_magnet) near_magnets.push_back(s);
        if (near_magnets.empty())
            throw ModelError("student " + std::to_string(student.id) + " has no magnet school among the nearest " +
                             std::to_string(m.magnet_radius) + " schools");
        const double each = m.magnets / static_cast<double>(near_magnets.size());
        for (SchoolId s : near_magnets) {
            if (claimed[s]) continue;
            p[s] = each;
            claimed[s] = 1;
        }
    }
    if (m.nearby > 0.0) {
        for (SchoolId s : nearest_schools(student, district, std::min(m.nearby_radius, ns))) {
            if (claimed[s]) continue;
            p[s] = m.nearby;
            claimed[s] = 1;
        }
    }
    const double z = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(z > 0.0)) throw ModelError("frequency masses sum to zero");
    for (double& v : p) v /= z;
    return ChoiceDistribution{std::move(p)};
}

class FollowModel final : public ChoiceModel {
public:
    [[nodiscard]] ChoiceDistribution distribution(const District& d, StudentId, SchoolId zoned) const override {
        return follow_model(d.school_count(), zoned);
    }
    [[nodiscard]] std::string name() const override { return "follow"; }
    [[nodiscard]] std::uint64_t fingerprint() const override { return fnv1a("rwc-follow-v1"); }
    [[nodiscard]] bool ranks_schools() const override { return false; }
};

class FrequencyModel final : public ChoiceModel {
public:
    FrequencyModel() = default;
    explicit FrequencyModel(FrequencyMasses masses) : masses_(masses) {}

    [[nodiscard]] ChoiceDistribution distribution(const District& d, StudentId n, SchoolId zoned) const override {
        return frequency_model(d.student(n), zoned, d, masses_);
    }
    [[nodiscard]] std::string name() const override { return "frequency"; }
    [[nodiscard]] std::uint64_t fingerprint() const override {
        Fnv1a h;
        h.update("rwc-frequency-v1");
        h.update_double(masses_.zoned);
        h.update_double(masses_.magnets);
        h.update_double(masses_.nearby);
        h.update_u64(masses_.magnet_radius);
        h.update_u64(masses_.nearby_radius);
        return h.digest();
    }

private:
    FrequencyMasses masses_;
};

}  // namespace rwc
