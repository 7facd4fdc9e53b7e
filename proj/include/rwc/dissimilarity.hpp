#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>

#include "rwc/district.hpp"

namespace rwc {

/// The dissimilarity index is the exact rational
///   sum_s |g_s (N - G) - (c_s - g_s) G|  /  (2 G (N - G)),
/// so it is evaluated with integer numerators and one final division. Incremental
/// updates in the optimizer work on the same integer numerator.
struct DissimilarityScale {
    std::int64_t lower_total = 0;  // G
    std::int64_t population = 0;   // N

    DissimilarityScale(std::int64_t g_total, std::int64_t n_total)
        : lower_total(g_total), population(n_total) {
        if (g_total <= 0 || g_total >= n_total)
            throw DomainError("dissimilarity needs 0 < lower-SES total < N (got " +
                              std::to_string(g_total) + " of " + std::to_string(n_total) + ")");
    }

    /// Contribution of one school to the integer numerator.
    [[nodiscard]] std::int64_t term(std::int64_t total, std::int64_t lower) const noexcept {
        return std::llabs(lower * (population - lower_total) - (total - lower) * lower_total);
    }

    [[nodiscard]] std::int64_t denominator() const noexcept {
        return 2 * lower_total * (population - lower_total);
    }

    [[nodiscard]] double to_index(std::int64_t numerator) const noexcept {
        return static_cast<double>(numerator) / static_cast<double>(denominator());
    }
};

inline std::int64_t dissimilarity_numerator(const SchoolCounts& counts,
                                            const DissimilarityScale& scale) {
    if (counts.lower_ses.size() != counts.total.size())
        throw DomainError("school count vectors differ in length");
    std::int64_t num = 0;
    std::int64_t total = 0;
    std::int64_t lower = 0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
        if (counts.lower_ses[s] < 0 || counts.lower_ses[s] > counts.total[s])
            throw DomainError("school " + std::to_string(s) + ": need 0 <= lower_ses <= total");
        total += counts.total[s];
        lower += counts.lower_ses[s];
        num += scale.term(counts.total[s], counts.lower_ses[s]);
    }
    if (total != scale.population)
        throw DomainError("school totals sum to " + std::to_string(total) + ", expected N = " +
                          std::to_string(scale.population));
    if (lower != scale.lower_total)
        throw DomainError("lower-SES counts sum to " + std::to_string(lower) + ", expected " +
                          std::to_string(scale.lower_total));
    return num;
}

/// District-wide dissimilarity of the lower-SES group, in [0,1].
inline double dissimilarity(const SchoolCounts& counts, std::int64_t g_total, std::int64_t n_total) {
    const DissimilarityScale scale(g_total, n_total);
    return scale.to_index(dissimilarity_numerator(counts, scale));
}

}  // namespace rwc
