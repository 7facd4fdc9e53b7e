#include <gtest/gtest.h>

#include <fstream>

#include "support.hpp"

namespace rwc {
namespace {

using test::GridSpec;

// Two blocks, one school each. Block 0: three lower-SES and two higher-SES students;
// block 1: two lower-SES and three higher-SES. Student 5 is lower-SES in block 1.
District ten_student_district() {
    GridSpec g;
    g.rows = 1;
    g.cols = 2;
    g.campuses = {0, 1};
    g.status_quo = {0, 1};
    g.students = {{0, 0}, {0, 0}, {0, 0}, {0, 2}, {0, 2}, {1, 0}, {1, 0}, {1, 2}, {1, 2}, {1, 2}};
    return test::grid_district(g);
}

TEST(InverseCdf, PicksFirstSchoolPastU) {
    const std::vector<double> p{0.2, 0.5, 0.3};
    EXPECT_EQ(inverse_cdf(p, 0.0), 0u);
    EXPECT_EQ(inverse_cdf(p, 0.19), 0u);
    EXPECT_EQ(inverse_cdf(p, 0.2), 1u);
    EXPECT_EQ(inverse_cdf(p, 0.69), 1u);
    EXPECT_EQ(inverse_cdf(p, 0.71), 2u);
    EXPECT_EQ(inverse_cdf(p, 0.999999), 2u);
}

TEST(InverseCdf, SkipsZeroMassAndAbsorbsRounding) {
    EXPECT_EQ(inverse_cdf({0.0, 1.0, 0.0}, 0.0), 1u);
    EXPECT_EQ(inverse_cdf({0.5, 0.4999999999, 0.0}, 0.99999999999), 1u);
}

TEST(Sampling, FollowModelGivesIdentityTable) {
    std::mt19937_64 rng(1);
    const auto d = test::random_small_district(rng);
    const auto t = sample_scenarios(FollowModel{}, d, 4, 99);
    for (std::size_t i = 0; i < 4; ++i)
        for (const auto& st : d.students())
            for (SchoolId s = 0; s < d.school_count(); ++s) EXPECT_EQ(t.at(i, st.id, s), s);
    EXPECT_EQ(t.model_fingerprint(), FollowModel{}.fingerprint());
    EXPECT_EQ(t.district_fingerprint(), district_fingerprint(d));
    EXPECT_EQ(t.seed(), 99u);
}

TEST(Sampling, FrequencyFollowShareMatchesExpectedMass) {
    const auto& d = test::default_district();
    const FrequencyModel model;
    const std::size_t scenarios = 30;
    const auto t = sample_scenarios(model, d, scenarios, 5);
    double expected = 0.0, hits = 0.0;
    for (const auto& st : d.students()) {
        const SchoolId z = d.status_quo_school_of(st.id);
        expected += model.distribution(d, st.id, z).probs[z];
        for (std::size_t i = 0; i < scenarios; ++i) hits += t.at(i, st.id, z) == z;
    }
    const double n = static_cast<double>(d.students().size());
    EXPECT_NEAR(hits / (n * static_cast<double>(scenarios)), expected / n, 0.01);
}

TEST(Sampling, IdenticalModelsGiveIdenticalTables) {
    const auto& d = test::default_district();
    const auto a = sample_scenarios(FrequencyModel{}, d, 5, 17);
    const auto b = sample_scenarios(FrequencyModel{FrequencyMasses{}}, d, 5, 17);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, sample_scenarios(FrequencyModel{}, d, 5, 18));
}

TEST(Sampling, WorkerCountDoesNotChangeTable) {
    const auto& d = test::default_district();
    ScenarioOptions two;
    two.workers = 3;
    EXPECT_EQ(sample_scenarios(FrequencyModel{}, d, 4, 2), sample_scenarios(FrequencyModel{}, d, 4, 2, two));
}

TEST(Sampling, OneUniformPerStudentScenarioSharedAcrossZonedSchools) {
    const auto& d = test::default_district();
    const FrequencyModel model;
    const std::size_t scenarios = 3;
    const std::uint64_t seed = 21;
    const auto t = sample_scenarios(model, d, scenarios, seed);
    const auto nn = d.students().size();
    for (std::size_t i = 0; i < scenarios; ++i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        std::vector<double> u(nn);
        for (auto& v : u) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        for (StudentId n = 0; n < nn; n += 37)
            for (SchoolId s = 0; s < d.school_count(); ++s) {
                // Oracle: first school whose running mass exceeds u.
                const auto p = model.distribution(d, n, s).probs;
                double cum = 0.0;
                SchoolId want = 0;
                for (SchoolId c = 0; c < p.size(); ++c)
                    if (p[c] > 0.0) {
                        want = c;
                        cum += p[c];
                        if (u[n] < cum) break;
                    }
                EXPECT_EQ(t.at(i, n, s), want);
            }
    }
}

TEST(Sampling, CappedTableStoresNearestCandidatesOnly) {
    const auto& d = test::default_district();
    ScenarioOptions opts;
    opts.candidate_cap = 3;
    const auto t = sample_scenarios(FrequencyModel{}, d, 2, 4, opts);
    const auto full = sample_scenarios(FrequencyModel{}, d, 2, 4);
    EXPECT_TRUE(t.capped());
    EXPECT_EQ(t.candidates_per_student(), 3u);
    for (StudentId n = 0; n < 100; ++n) {
        const auto near = nearest_schools(d.student(n), d, 3);
        for (SchoolId s = 0; s < d.school_count(); ++s) {
            const bool in = std::find(near.begin(), near.end(), s) != near.end();
            EXPECT_EQ(t.supports(n, s), in);
            if (in) {
                EXPECT_EQ(t.at(0, n, s), full.at(0, n, s));
            } else {
                EXPECT_THROW((void)t.at(0, n, s), DomainError);
            }
        }
    }
}

TEST(Sampling, RejectsZeroScenarios) {
    EXPECT_THROW(sample_scenarios(FollowModel{}, test::default_district(), 0, 1), DomainError);
}

TEST(Realize, LooksUpZonedEntry) {
    const auto d = ten_student_district();
    const auto t = test::table_from(d, 2, [](std::size_t i, StudentId n, SchoolId s) {
        if (i == 1 && n == 5) return SchoolId{0};
        if (n == 0 && s == 1) return SchoolId{0};
        return s;
    });
    const auto r0 = realize(Zoning::status_quo(d), t, 0, d);
    EXPECT_EQ(r0.follow_count, 10);
    const auto r1 = realize(Zoning::status_quo(d), t, 1, d);
    EXPECT_EQ(r1.attended[5], 0u);
    EXPECT_EQ(r1.follow_count, 9);
    const auto swapped = realize(Zoning({1, 0}), t, 0, d);
    EXPECT_EQ(swapped.attended[0], 0u);
    EXPECT_EQ(swapped.attended[1], 1u);
    EXPECT_EQ(swapped.follow_count, 9);
    EXPECT_THROW(realize(Zoning::status_quo(d), t, 2, d), DomainError);
}

TEST(Saa, MeanAndStandardErrorOfTwoScenarios) {
    const auto d = ten_student_district();
    // Scenario 0 follows (D = 0.2); in scenario 1 student 5 crosses to school 0 (D = 0.4).
    const auto t = test::table_from(d, 2, [](std::size_t i, StudentId n, SchoolId s) {
        return i == 1 && n == 5 ? SchoolId{0} : s;
    });
    const auto obj = saa_objective(Zoning::status_quo(d), t, d);
    ASSERT_EQ(obj.per_scenario.size(), 2u);
    EXPECT_DOUBLE_EQ(obj.per_scenario[0], 0.2);
    EXPECT_DOUBLE_EQ(obj.per_scenario[1], 0.4);
    EXPECT_DOUBLE_EQ(obj.mean, 0.3);
    EXPECT_NEAR(obj.standard_error, 0.1, 1e-15);
}

TEST(Saa, SingleScenarioHasZeroStandardError) {
    const auto d = ten_student_district();
    const auto obj = saa_objective(Zoning::status_quo(d), test::follow_table(d), d);
    EXPECT_DOUBLE_EQ(obj.mean, 0.2);
    EXPECT_EQ(obj.standard_error, 0.0);
}

TEST(TableIo, RoundTripFullAndCapped) {
    const auto& d = test::default_district();
    const auto dir = test::scratch_dir("table");
    auto full = sample_scenarios(FrequencyModel{}, d, 3, 8);
    full.set_config_hash(0xabcdef);
    write_table(dir / "full.bin", full);
    EXPECT_EQ(read_table(dir / "full.bin"), full);
    ScenarioOptions opts;
    opts.candidate_cap = 2;
    const auto capped = sample_scenarios(FrequencyModel{}, d, 2, 8, opts);
    write_table(dir / "capped.bin", capped);
    EXPECT_EQ(read_table(dir / "capped.bin"), capped);
}

TEST(TableIo, CorruptFilesAreFormatErrors) {
    const auto d = ten_student_district();
    const auto dir = test::scratch_dir("badtable");
    const auto bytes = table_bytes(test::follow_table(d, 2));
    std::ofstream(dir / "short.bin", std::ios::binary) << bytes.substr(0, bytes.size() - 3);
    EXPECT_THROW(read_table(dir / "short.bin"), FormatError);
    std::ofstream(dir / "long.bin", std::ios::binary) << bytes << "xy";
    EXPECT_THROW(read_table(dir / "long.bin"), FormatError);
    std::ofstream(dir / "magic.bin", std::ios::binary) << "NOTATABLE" << bytes.substr(9);
    EXPECT_THROW(read_table(dir / "magic.bin"), FormatError);
    auto bad = bytes;
    bad[bad.size() - 2] = 9;  // last entry points at school 9
    std::ofstream(dir / "range.bin", std::ios::binary) << bad;
    EXPECT_THROW(read_table(dir / "range.bin"), FormatError);
}

}  // namespace
}  // namespace rwc
