#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rwc/cli.hpp"
#include "support.hpp"

namespace rwc {
namespace {

namespace fs = std::filesystem;

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    args.insert(args.begin(), "rwc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t data_rows(const fs::path& csv) {
    std::istringstream in(slurp(csv));
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#') ++n;
    return n - 1;  // header
}

std::vector<std::string> toy_generate(const fs::path& out, std::uint64_t seed = 7) {
    return {"generate", "--out", out.string(), "--blocks", "9", "--schools", "2", "--magnets", "1",
            "--students", "40", "--choice-zones", "1", "--empty-fraction", "0", "--seed", std::to_string(seed)};
}

std::vector<std::string> toy_optimize(const fs::path& district, const fs::path& out, const std::string& method = "R") {
    return {"optimize", "--district", district.string(), "--out", out.string(), "--method", method,
            "--max-iterations", "400", "--restarts", "2", "--scenarios", "3"};
}

TEST(Cli, GenerateThenOptimizeWritesReports) {
    const auto dir = test::scratch_dir("cli");
    ASSERT_EQ(cli(toy_generate(dir / "d")).code, 0);
    for (const char* f : {"blocks.csv", "schools.csv", "students.csv", "adjacency.csv", "zoning.csv", "manifest.json"})
        EXPECT_TRUE(fs::exists(dir / "d" / f)) << f;
    const auto r = cli(toy_optimize(dir / "d", dir / "o"));
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"zoning.csv", "table.bin", "metrics.csv", "run_log.txt", "report.csv", "enrollment.csv",
                          "blocks.csv", "attendance_labels.csv", "manifest.json"})
        EXPECT_TRUE(fs::exists(dir / "o" / f)) << f;
    const auto report = slurp(dir / "o" / "report.csv");
    EXPECT_EQ(report.rfind("# rwc report config=", 0), 0u);
    EXPECT_NE(report.find("\nCurrent,-,"), std::string::npos);
    EXPECT_NE(report.find("\nR,-,"), std::string::npos);
    const auto manifest = nlohmann::json::parse(slurp(dir / "o" / "manifest.json"));
    EXPECT_EQ(manifest["subcommand"], "optimize");
    EXPECT_EQ(manifest["config"]["method"], "R");
    EXPECT_TRUE(manifest.contains("config_hash"));
    const auto zoning = read_zoning(dir / "o" / "zoning.csv");
    const auto d = read_district(dir / "d");
    EXPECT_EQ(zoning.district_fingerprint, district_fingerprint(d));
    EXPECT_TRUE(check_contiguity(zoning.zoning, d).passed());
}

TEST(Cli, RwcWithoutModelIsAConfigError) {
    const auto dir = test::scratch_dir("cli-model");
    ASSERT_EQ(cli(toy_generate(dir / "d")).code, 0);
    const auto r = cli(toy_optimize(dir / "d", dir / "o", "RWC"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--model"), std::string::npos) << r.err;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, TrainScenariosOptimizeWithLogit) {
    const auto dir = test::scratch_dir("cli-logit");
    ASSERT_EQ(cli(toy_generate(dir / "d")).code, 0);
    const auto m = (dir / "model.json").string();
    ASSERT_EQ(cli({"train", "--district", (dir / "d").string(), "--out", m, "--max-iter", "50"}).code, 0);
    const auto t = (dir / "t.bin").string();
    const auto s = cli({"scenarios", "--district", (dir / "d").string(), "--model", m, "--out", t, "--scenarios", "4"});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_EQ(read_table(t).scenario_count(), 4u);
    auto args = toy_optimize(dir / "d", dir / "o", "RWC");
    args.insert(args.end(), {"--model", m, "--table", t});
    const auto r = cli(args);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(slurp(dir / "o" / "report.csv").find("\nRWC,4,"), std::string::npos);
}

TEST(Cli, EvaluateWritesOneRow) {
    const auto dir = test::scratch_dir("cli-eval");
    ASSERT_EQ(cli(toy_generate(dir / "d")).code, 0);
    const auto r = cli({"evaluate", "--district", (dir / "d").string(), "--out", (dir / "e.csv").string(),
                        "--model-kind", "follow", "--folds", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(data_rows(dir / "e.csv"), 1u);
}

TEST(Cli, ReportRefusesMismatchedDistrict) {
    const auto dir = test::scratch_dir("cli-mismatch");
    ASSERT_EQ(cli(toy_generate(dir / "a", 7)).code, 0);
    ASSERT_EQ(cli(toy_generate(dir / "b", 8)).code, 0);
    ASSERT_EQ(cli(toy_optimize(dir / "a", dir / "o")).code, 0);
    const auto r = cli({"report", "--district", (dir / "b").string(), "--table", (dir / "o" / "table.bin").string(),
                        "--zoning", (dir / "o" / "zoning.csv").string(), "--out", (dir / "r").string()});
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("district"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(dir / "r" / "report.csv"));
}

TEST(Cli, ReportReproducesOptimizeReport) {
    const auto dir = test::scratch_dir("cli-report");
    ASSERT_EQ(cli(toy_generate(dir / "d")).code, 0);
    ASSERT_EQ(cli(toy_optimize(dir / "d", dir / "o", "FR")).code, 0);
    const auto r = cli({"report", "--district", (dir / "d").string(), "--table", (dir / "o" / "table.bin").string(),
                        "--zoning", (dir / "o" / "zoning.csv").string(), "--out", (dir / "r").string(), "--method", "FR"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto body = [](const std::string& s) { return s.substr(s.find('\n')); };
    EXPECT_EQ(body(slurp(dir / "r" / "report.csv")), body(slurp(dir / "o" / "report.csv")));
}

TEST(Cli, ExportMapWritesGeoJson) {
    const auto dir = test::scratch_dir("cli-map");
    ASSERT_EQ(cli(toy_generate(dir / "d")).code, 0);
    const auto r = cli({"export-map", "--district", (dir / "d").string(), "--out", (dir / "m.geojson").string(),
                        "--overlay", "ses"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "m.geojson"));
    EXPECT_EQ(j["features"].size(), 9u);
    EXPECT_EQ(cli({"export-map", "--district", (dir / "d").string(), "--out", (dir / "x.geojson").string(),
                   "--overlay", "heat"})
                  .code,
              2);
}

TEST(Cli, IniConfigWithCommandLineOverride) {
    const auto dir = test::scratch_dir("cli-ini");
    std::ofstream(dir / "run.cfg") << "[generate]\nblocks = 9\nschools = 2\nmagnets = 0\nstudents = 40\n"
                                      "choice-zones = 1\nempty-fraction = 0\nseed = 7\n";
    const auto r = cli({"--config", (dir / "run.cfg").string(), "generate", "--out", (dir / "d").string(),
                        "--students", "50"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto d = read_district(dir / "d");
    EXPECT_EQ(d.block_count(), 9u);
    EXPECT_EQ(d.students().size(), 50u);
    const auto manifest = nlohmann::json::parse(slurp(dir / "d" / "manifest.json"));
    EXPECT_EQ(manifest["config"]["students"], "50");
}

TEST(Cli, InvalidWorkerEnvironmentIsRejected) {
    const auto dir = test::scratch_dir("cli-env");
    ::setenv("RWC_WORKERS", "many", 1);
    const auto r = cli(toy_generate(dir / "d"));
    ::unsetenv("RWC_WORKERS");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("RWC_WORKERS"), std::string::npos);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    const auto dir = test::scratch_dir("cli-repeat");
    ASSERT_EQ(cli(toy_generate(dir / "d")).code, 0);
    ASSERT_EQ(cli(toy_optimize(dir / "d", dir / "o1", "FR")).code, 0);
    ASSERT_EQ(cli(toy_optimize(dir / "d", dir / "o2", "FR")).code, 0);
    for (const char* f : {"report.csv", "zoning.csv", "table.bin", "metrics.csv", "blocks.csv", "enrollment.csv"})
        EXPECT_EQ(slurp(dir / "o1" / f), slurp(dir / "o2" / f)) << f;
}

TEST(Cli, VersionAndUsageErrors) {
    const auto v = cli({"--version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_EQ(v.out, std::string(cli::kVersion) + "\n");
    EXPECT_EQ(cli({"frobnicate"}).code, 2);
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"generate"}).code, 2);
}

}  // namespace
}  // namespace rwc
