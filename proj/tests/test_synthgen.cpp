#include <gtest/gtest.h>

#include "support.hpp"

namespace rwc {
namespace {

double follow_rate(const District& d) {
    std::size_t follow = 0;
    for (const auto& st : d.students()) follow += st.actual_school == d.status_quo_school_of(st.id);
    return static_cast<double>(follow) / static_cast<double>(d.students().size());
}

void expect_same_tables(const District& a, const District& b) {
    const auto ta = district_tables(a), tb = district_tables(b);
    EXPECT_EQ(ta.blocks, tb.blocks);
    EXPECT_EQ(ta.schools, tb.schools);
    EXPECT_EQ(ta.students, tb.students);
    EXPECT_EQ(ta.adjacency, tb.adjacency);
    EXPECT_EQ(district_fingerprint(a), district_fingerprint(b));
}

TEST(Synthgen, SameSeedSameDistrict) {
    GenParams p;
    p.n_blocks = 60;
    p.n_students = 300;
    p.seed = 42;
    expect_same_tables(generate_labeled_district(p), generate_labeled_district(p));
}

TEST(Synthgen, DifferentSeedsDiffer) {
    GenParams p;
    p.n_blocks = 60;
    p.n_students = 300;
    const auto a = generate_labeled_district(p);
    p.seed = 2;
    EXPECT_NE(district_fingerprint(a), district_fingerprint(generate_labeled_district(p)));
}

TEST(Synthgen, NineBlocksTwoSchoolsHasConnectedZones) {
    GenParams p;
    p.n_blocks = 9;
    p.n_schools = 2;
    p.n_magnets = 0;
    p.n_students = 40;
    p.n_choice_zones = 1;
    p.empty_block_fraction = 0.0;
    p.seed = 7;
    const auto d = generate_labeled_district(p);
    EXPECT_EQ(d.block_count(), 9u);
    EXPECT_EQ(d.school_count(), 2u);
    const auto sq = Zoning::status_quo(d);
    EXPECT_TRUE(check_contiguity(sq, d).passed());
    EXPECT_TRUE(test::contiguous_by_union_find(sq, d));
}

TEST(Synthgen, SesTercilesAreBalanced) {
    const auto& d = test::default_district();
    std::array<int, 3> n{};
    for (const auto& st : d.students()) ++n.at(static_cast<std::size_t>(st.ses_category));
    for (int c : n) EXPECT_NEAR(c, 1000, 50);
}

TEST(Synthgen, FollowRateNearTarget) {
    const double r = follow_rate(test::default_district());
    EXPECT_GE(r, 0.60);
    EXPECT_LE(r, 0.70);
}

TEST(Synthgen, HighFollowTargetIsReached) {
    GenParams p;
    p.n_blocks = 100;
    p.n_students = 800;
    p.follow_rate_target = 0.999;
    p.magnet_share_target = 0.0;
    EXPECT_GE(follow_rate(generate_labeled_district(p)), 0.99);
}

TEST(Synthgen, MagnetOptOutShareNearTarget) {
    const auto& d = test::default_district();
    std::size_t magnet = 0;
    for (const auto& st : d.students())
        magnet += st.actual_school != d.status_quo_school_of(st.id) && d.school(st.actual_school).is_magnet;
    EXPECT_NEAR(static_cast<double>(magnet) / static_cast<double>(d.students().size()), 0.20, 0.05);
}

TEST(Synthgen, EnrollmentEqualsLabelTally) {
    const auto& d = test::default_district();
    std::vector<std::int64_t> tally(d.school_count(), 0);
    for (const auto& st : d.students()) ++tally[st.actual_school];
    for (const auto& s : d.schools()) EXPECT_EQ(s.current_enrollment, tally[s.id]);
}

TEST(Synthgen, StatusQuoIsFeasibleWithNoTravelSlack) {
    const auto& d = test::default_district();
    const auto sq = Zoning::status_quo(d);
    EXPECT_TRUE(check_travel_time(sq, d, {0.15, 0.0}).passed());
    EXPECT_TRUE(check_contiguity(sq, d).passed());
}

TEST(Synthgen, ShapeMatchesParameters) {
    const auto& d = test::default_district();
    const GenParams p;
    EXPECT_EQ(d.block_count(), p.n_blocks);
    EXPECT_EQ(d.school_count(), p.n_schools);
    EXPECT_EQ(d.students().size(), p.n_students);
    std::size_t magnets = 0;
    for (const auto& s : d.schools()) magnets += s.is_magnet;
    EXPECT_EQ(magnets, p.n_magnets);
}

TEST(Synthgen, InvalidParamsRaiseConfigError) {
    auto bad = [](auto mutate) {
        GenParams p;
        mutate(p);
        return p;
    };
    EXPECT_THROW(generate_district(bad([](GenParams& p) { p.n_schools = 0; })), ConfigError);
    EXPECT_THROW(generate_district(bad([](GenParams& p) { p.n_blocks = 3; })), ConfigError);
    EXPECT_THROW(generate_district(bad([](GenParams& p) { p.n_magnets = 9; })), ConfigError);
    EXPECT_THROW(generate_district(bad([](GenParams& p) { p.n_students = 1; })), ConfigError);
    EXPECT_THROW(generate_district(bad([](GenParams& p) { p.n_choice_zones = 0; })), ConfigError);
    EXPECT_THROW(generate_district(bad([](GenParams& p) { p.follow_rate_target = 1.0; })), ConfigError);
    EXPECT_THROW(generate_district(bad([](GenParams& p) { p.empty_block_fraction = 1.0; })), ConfigError);
}

TEST(DistrictIo, RoundTripPreservesEverything) {
    GenParams p;
    p.n_blocks = 50;
    p.n_students = 200;
    const auto d = generate_labeled_district(p);
    const auto dir = test::scratch_dir("io");
    write_district(dir, d, "seed=1");
    expect_same_tables(d, read_district(dir));
}

TEST(DistrictIo, ZoningRoundTripCarriesFingerprint) {
    const auto& d = test::default_district();
    const auto dir = test::scratch_dir("zoning");
    const auto sq = Zoning::status_quo(d);
    write_zoning(dir / "zoning.csv", sq, district_fingerprint(d));
    const auto loaded = read_zoning(dir / "zoning.csv");
    EXPECT_EQ(loaded.zoning, sq);
    ASSERT_TRUE(loaded.district_fingerprint.has_value());
    EXPECT_EQ(*loaded.district_fingerprint, district_fingerprint(d));
}

TEST(DistrictIo, MissingFileAndBadRowsAreFormatErrors) {
    const auto dir = test::scratch_dir("bad");
    EXPECT_THROW(read_district(dir), FormatError);
    std::ofstream(dir / "zoning.csv") << "block_id,school_id\n0,0\n0,1\n";
    EXPECT_THROW(read_zoning(dir / "zoning.csv"), FormatError);
    std::ofstream(dir / "zoning2.csv") << "block_id,school_id\n0,x\n";
    EXPECT_THROW(read_zoning(dir / "zoning2.csv"), FormatError);
}

TEST(DistrictIo, HexRoundTrip) {
    for (std::uint64_t v : {0ULL, 1ULL, 0xdeadbeefcafef00dULL, ~0ULL}) EXPECT_EQ(parse_hex64(hex64(v)), v);
    EXPECT_THROW(parse_hex64("xyz"), FormatError);
}

}  // namespace
}  // namespace rwc
