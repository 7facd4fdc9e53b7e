#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "rwc/atomic_file.hpp"
#include "rwc/choice/model.hpp"
#include "rwc/dissimilarity.hpp"
#include "rwc/district_io.hpp"
#include "rwc/feasibility.hpp"
#include "rwc/hash.hpp"
#include "rwc/scenario_table.hpp"

namespace rwc {

struct ScenarioOptions {
    std::size_t candidate_cap = 0;  // 0 = every school is a candidate zoned school
    std::size_t workers = 1;
};

/// Uniform variate in [0,1) with 53 random bits, independent of library distributions.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Index of the first school whose cumulative probability exceeds u. Rounding slack at the
/// top end falls to the last school with positive mass.
inline SchoolId inverse_cdf(const std::vector<double>& probs, double u) {
    double cum = 0.0;
    SchoolId last_positive = 0;
    for (SchoolId s = 0; s < probs.size(); ++s) {
        if (probs[s] <= 0.0) continue;
        last_positive = s;
        cum += probs[s];
        if (u < cum) return s;
    }
    return last_positive;
}

/// Builds A_n^i(s) with common random numbers: one uniform u_{n,i} per student and
/// scenario, shared by every candidate zoned school, mapped through the inverse CDF of
/// the model's distribution in school-id order. Scenario i draws its uniforms from an
/// independent stream derived from (seed, i), so results do not depend on scheduling.
inline ScenarioTable sample_scenarios(const ChoiceModel& model, const District& district, std::size_t scenarios,
                                      std::uint64_t seed, const ScenarioOptions& opts = {}) {
    if (scenarios == 0) throw DomainError("scenario count must be at least 1");
    const auto nn = district.students().size();
    const auto ns = district.school_count();
    std::vector<std::vector<SchoolId>> candidates;
    if (opts.candidate_cap > 0 && opts.candidate_cap < ns) {
        candidates.reserve(nn);
        for (const auto& st : district.students())
            candidates.push_back(nearest_schools(st, district, opts.candidate_cap));
    }
    ScenarioTable table(scenarios, nn, ns, seed, model.fingerprint(), district_fingerprint(district),
                        std::move(candidates));

    std::vector<double> u(scenarios * nn);
    for (std::size_t i = 0; i < scenarios; ++i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        for (std::size_t n = 0; n < nn; ++n) u[i * nn + n] = unit_uniform(rng);
    }

    const std::size_t width = table.candidates_per_student();
    auto fill = [&](std::size_t begin, std::size_t end) {
        for (std::size_t n = begin; n < end; ++n) {
            const auto sid = static_cast<StudentId>(n);
            for (std::size_t k = 0; k < width; ++k) {
                const SchoolId zoned = table.candidate(sid, k);
                const auto dist = model.distribution(district, sid, zoned);
                if (dist.probs.size() != ns) throw ModelError(model.name() + " returned a distribution of wrong size");
                for (std::size_t i = 0; i < scenarios; ++i) table.set(i, sid, k, inverse_cdf(dist.probs, u[i * nn + n]));
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(opts.workers, nn));
    if (workers == 1) {
        fill(0, nn);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t b = nn * w / workers, e = nn * (w + 1) / workers;
            pool.emplace_back([&, w, b, e] {
                try {
                    fill(b, e);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return table;
}

struct SaaObjective {
    double mean = 0.0;
    std::vector<double> per_scenario;
    double standard_error = 0.0;
    /// Sum over scenarios of the integer dissimilarity numerators; mean = numerator / (I * denominator).
    std::int64_t numerator = 0;
};

inline double standard_error_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

/// Mean over scenarios of the dissimilarity of realized attendance (the scenario sum
/// divided by I), with the per-scenario values and their standard error.
inline SaaObjective saa_objective(const Zoning& zoning, const ScenarioTable& table, const District& district) {
    const DissimilarityScale scale(district.lower_ses_total(), district.student_count());
    SaaObjective out;
    for (std::size_t i = 0; i < table.scenario_count(); ++i) {
        const auto realized = realize(zoning, table, i, district);
        const auto num = dissimilarity_numerator(counts_under_attendance(district, realized.attended), scale);
        out.numerator += num;
        out.per_scenario.push_back(scale.to_index(num));
    }
    out.mean = static_cast<double>(out.numerator) /
               (static_cast<double>(table.scenario_count()) * static_cast<double>(scale.denominator()));
    out.standard_error = standard_error_of(out.per_scenario);
    return out;
}

// Binary table files: 8-byte magic, then little-endian u64 fields
// (scenarios, students, schools, width, seed, model fingerprint, district fingerprint,
// config hash),
// then the candidate lists (students x width u16, only when capped) and the
// choices (scenarios x students x width u16).

inline constexpr char kTableMagic[8] = {'R', 'W', 'C', 'S', 'C', 'N', '0', '1'};

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}
inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}

class ByteReader {
public:
    explicit ByteReader(std::string bytes) : bytes_(std::move(bytes)) {}
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
        pos_ += 8;
        return v;
    }
    std::uint16_t u16() {
        need(2);
        const auto lo = static_cast<unsigned char>(bytes_[pos_]);
        const auto hi = static_cast<unsigned char>(bytes_[pos_ + 1]);
        pos_ += 2;
        return static_cast<std::uint16_t>(lo | (hi << 8));
    }
    std::string_view take(std::size_t n) {
        need(n);
        auto v = std::string_view(bytes_).substr(pos_, n);
        pos_ += n;
        return v;
    }
    [[nodiscard]] bool done() const noexcept { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw FormatError("scenario table file is truncated");
    }
    std::string bytes_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string table_bytes(const ScenarioTable& t) {
    std::string out(kTableMagic, sizeof kTableMagic);
    detail::put_u64(out, t.scenario_count());
    detail::put_u64(out, t.student_count());
    detail::put_u64(out, t.school_count());
    detail::put_u64(out, t.capped() ? t.candidates_per_student() : 0);
    detail::put_u64(out, t.seed());
    detail::put_u64(out, t.model_fingerprint());
    detail::put_u64(out, t.district_fingerprint());
    detail::put_u64(out, t.config_hash());
    for (auto c : t.raw_candidates()) detail::put_u16(out, c);
    for (auto c : t.raw_choices()) detail::put_u16(out, c);
    return out;
}

inline void write_table(const std::filesystem::path& path, const ScenarioTable& t) {
    write_file_atomic(path, table_bytes(t));
}

inline ScenarioTable read_table(const std::filesystem::path& path) {
    detail::ByteReader in(read_file(path));
    if (in.take(sizeof kTableMagic) != std::string_view(kTableMagic, sizeof kTableMagic))
        throw FormatError(path.string() + " is not a scenario table");
    const auto scenarios = in.u64(), students = in.u64(), schools = in.u64(), width = in.u64();
    const auto seed = in.u64(), model_fp = in.u64(), district_fp = in.u64(), config_hash = in.u64();
    std::vector<std::vector<SchoolId>> candidates;
    if (width > 0) {
        candidates.assign(students, std::vector<SchoolId>(width));
        for (auto& row : candidates)
            for (auto& s : row) s = in.u16();
    }
    ScenarioTable t(scenarios, students, schools, seed, model_fp, district_fp, std::move(candidates));
    t.set_config_hash(config_hash);
    for (auto& c : t.raw_choices()) {
        c = in.u16();
        if (c >= schools) throw FormatError("scenario table entry out of range");
    }
    if (!in.done()) throw FormatError("trailing bytes in scenario table file");
    return t;
}

}  // namespace rwc
