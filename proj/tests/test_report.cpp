#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "confsol/report/cli.hpp"

using namespace confsol::report;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        root_ = fs::temp_directory_path() / (std::string("confsol_cli_") + info->name());
        fs::remove_all(root_);
        fs::create_directories(root_);
    }

    void TearDown() override { fs::remove_all(root_); }

    fs::path write_config(const std::string& name, const std::string& body) {
        auto path = root_ / name;
        std::ofstream(path) << body;
        return path;
    }

    int run(std::vector<std::string> args) {
        args.insert(args.begin(), "confsol");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        out_.str({});
        err_.str({});
        return run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    static nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

    fs::path root_;
    std::ostringstream out_, err_;
};

const char* small_lemma = R"({
  "m": [1], "dimensions": [4],
  "scan": {"grid_resolution": 30, "random_samples": 2000, "refine_iterations": 40, "dump_rows": 50},
  "lemma": {"averaging_trials": 500, "claim_samples": 200, "zero_rho_samples": 200}
})";

const char* small_fuzz = R"({
  "fuzz": {"samples": 3000, "oracle_samples": 3, "oracle_dimensions": [4], "weyl_samples": 3, "weyl_dimensions": [4]}
})";

const char* small_ode = R"({
  "dimensions": [4], "m": [0],
  "scan": {"grid_resolution": 30, "random_samples": 2000},
  "ode": {"orthant_runs": 5, "orthant_dimensions": [4], "hi_runs": 5, "hi_t_end": 1.0,
          "comparison_samples": 200, "coherence_runs": 2, "csv_runs": 1}
})";

}  // namespace

TEST_F(CliTest, SolitonSuitePassesAndWritesOutputs) {
    EXPECT_EQ(run({"soliton-verify", "--out", (root_ / "o").string()}), 0) << err_.str();
    EXPECT_TRUE(fs::exists(root_ / "o" / "soliton-verify.summary.json"));
    EXPECT_TRUE(fs::exists(root_ / "o" / "soliton-verify.timing.json"));
    EXPECT_TRUE(fs::exists(root_ / "o" / "soliton_pairs.csv"));
    const auto doc = load(root_ / "o" / "soliton-verify.summary.json");
    EXPECT_TRUE(doc["passed"].get<bool>());
    EXPECT_TRUE(doc["failures"].empty());
    EXPECT_EQ(doc["tool_version"], confsol::version);
    EXPECT_FALSE(doc.contains("duration_seconds"));
    EXPECT_NE(out_.str().find("soliton-verify: PASS"), std::string::npos);
}

TEST_F(CliTest, SmallLemmaScanPasses) {
    auto cfg = write_config("lemma.json", small_lemma);
    EXPECT_EQ(run({"lemma-scan", "--config", cfg.string(), "--out", root_.string()}), 0) << out_.str();
    const auto doc = load(root_ / "lemma-scan.summary.json");
    ASSERT_EQ(doc["summary"]["cases"].size(), 1u);
    EXPECT_EQ(doc["summary"]["cases"][0]["c_est"], 0.0);
    const auto csv = slurp(root_ / "lemma_scan_m1_n4.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "x1,x2,x3,x4,m,n,f,ordered,lower_slab,upper_slab,feasible");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 51);
}

TEST_F(CliTest, SmallIdentityFuzzAndOdeRunPass) {
    auto fuzz = write_config("fuzz.json", small_fuzz);
    EXPECT_EQ(run({"identity-fuzz", "--config", fuzz.string(), "--out", root_.string()}), 0) << out_.str();
    auto ode = write_config("ode.json", small_ode);
    EXPECT_EQ(run({"ode-run", "--config", ode.string(), "--out", root_.string()}), 0) << out_.str();
    EXPECT_TRUE(fs::exists(root_ / "ode_sphere_n4.csv"));
    EXPECT_TRUE(fs::exists(root_ / "ode_hi_n4_run0.csv"));
    EXPECT_FALSE(fs::exists(root_ / "ode_hi_n4_run1.csv"));
}

TEST_F(CliTest, EmptyMListIsAConfigError) {
    auto cfg = write_config("c.json", R"({"m": []})");
    EXPECT_EQ(run({"lemma-scan", "--config", cfg.string(), "--out", root_.string()}), 2);
    EXPECT_NE(err_.str().find("m: list must not be empty"), std::string::npos);
    EXPECT_FALSE(fs::exists(root_ / "lemma-scan.summary.json"));
}

TEST_F(CliTest, SolitonKindTypoIsAConfigError) {
    auto cfg = write_config("c.json", R"({"soliton": {"kinds": ["gaussian", "cylindre"]}})");
    EXPECT_EQ(run({"soliton-verify", "--config", cfg.string(), "--out", root_.string()}), 2);
}

TEST_F(CliTest, MalformedConfigsAreConfigErrors) {
    const std::vector<std::string> bodies{
        R"({"seed": 1,)",                                  // not JSON
        R"({"sede": 1})",                                  // unknown key
        R"({"seed": "one"})",                              // wrong type
        R"({"suite": "ode-run"})",                         // config for another suite
        R"({"tolerances": {"nonsense": 1e-3}})",           // unknown tolerance
        R"({"tolerances": {"residual": -1}})",             // nonpositive tolerance
        R"({"dimensions": []})",                           // empty dimension list
        R"({"soliton": {"pairs": 5, "colour": "red"}})",   // unknown nested key
    };
    for (std::size_t k = 0; k < bodies.size(); ++k) {
        auto cfg = write_config("c" + std::to_string(k) + ".json", bodies[k]);
        EXPECT_EQ(run({"soliton-verify", "--config", cfg.string(), "--out", root_.string()}), 2) << bodies[k];
    }
    EXPECT_EQ(run({"soliton-verify", "--config", (root_ / "missing.json").string()}), 2);
    EXPECT_EQ(run({"soliton-verify", "--jobs", "many"}), 2);
    EXPECT_EQ(run({"no-such-suite"}), 2);
    EXPECT_EQ(run({}), 2);
    EXPECT_EQ(run({"soliton-verify", "--jobs", "0", "--out", root_.string()}), 2);
}

TEST_F(CliTest, IntegratorMethodTypoIsAConfigError) {
    auto cfg = write_config("c.json", R"({"integrator": {"method": "euler"}})");
    EXPECT_EQ(run({"ode-run", "--config", cfg.string(), "--out", root_.string()}), 2);
}

TEST_F(CliTest, UnreachableToleranceFailsTheRun) {
    auto cfg = write_config("c.json", R"({"tolerances": {"residual": 1e-30}})");
    EXPECT_EQ(run({"soliton-verify", "--config", cfg.string(), "--out", root_.string()}), 1);
    const auto doc = load(root_ / "soliton-verify.summary.json");
    EXPECT_FALSE(doc["passed"].get<bool>());
    EXPECT_FALSE(doc["failures"].empty());
    ASSERT_EQ(doc["warnings"].size(), 1u);
    EXPECT_NE(doc["warnings"][0].get<std::string>().find("machine epsilon"), std::string::npos);
}

TEST_F(CliTest, ZeroSamplesIsAVacuousPassWithWarning) {
    auto cfg = write_config("c.json", R"({"fuzz": {"samples": 0, "oracle_samples": 0, "weyl_samples": 0}})");
    EXPECT_EQ(run({"identity-fuzz", "--config", cfg.string(), "--out", root_.string()}), 0);
    const auto doc = load(root_ / "identity-fuzz.summary.json");
    EXPECT_TRUE(doc["passed"].get<bool>());
    EXPECT_EQ(doc["summary"]["identity"]["samples"], 0);
    ASSERT_EQ(doc["warnings"].size(), 1u);
    EXPECT_NE(doc["warnings"][0].get<std::string>().find("vacuous"), std::string::npos);
}

TEST_F(CliTest, SelfTestInjectsAFault) {
    auto cfg = write_config("c.json", small_fuzz);
    EXPECT_EQ(run({"identity-fuzz", "--config", cfg.string(), "--out", root_.string(), "--self-test"}), 1);
    const auto doc = load(root_ / "identity-fuzz.summary.json");
    EXPECT_EQ(doc["failures"], nlohmann::json::array({"identity"}));
    EXPECT_TRUE(doc["config"]["self_test"].get<bool>());
    // only the fuzz suite has a fault to inject
    EXPECT_EQ(run({"soliton-verify", "--out", root_.string(), "--self-test"}), 2);
}

TEST_F(CliTest, SummariesAreByteIdenticalAcrossRunsAndJobCounts) {
    auto fuzz = write_config("fuzz.json", small_fuzz);
    auto lemma = write_config("lemma.json", small_lemma);
    auto ode = write_config("ode.json", small_ode);
    const std::vector<std::pair<std::string, fs::path>> suites{
        {"identity-fuzz", fuzz}, {"lemma-scan", lemma}, {"ode-run", ode}, {"soliton-verify", {}}};
    for (const auto& [suite, cfg] : suites) {
        std::vector<std::string> base{suite, "--seed", "99"};
        if (!cfg.empty()) base.insert(base.end(), {"--config", cfg.string()});
        auto a = base, b = base, c = base;
        a.insert(a.end(), {"--out", (root_ / "a").string(), "--jobs", "1"});
        b.insert(b.end(), {"--out", (root_ / "b").string(), "--jobs", "1"});
        c.insert(c.end(), {"--out", (root_ / "c").string(), "--jobs", "3"});
        ASSERT_EQ(run(a), 0) << suite;
        ASSERT_EQ(run(b), 0) << suite;
        ASSERT_EQ(run(c), 0) << suite;
        const auto name = summary_filename(suite);
        EXPECT_EQ(slurp(root_ / "a" / name), slurp(root_ / "b" / name)) << suite;
        EXPECT_EQ(slurp(root_ / "a" / name), slurp(root_ / "c" / name)) << suite;
    }
}

TEST_F(CliTest, SeedChangesTheNumbers) {
    EXPECT_EQ(run({"soliton-verify", "--seed", "1", "--out", (root_ / "a").string()}), 0);
    EXPECT_EQ(run({"soliton-verify", "--seed", "2", "--out", (root_ / "b").string()}), 0);
    EXPECT_NE(slurp(root_ / "a" / "soliton_pairs.csv"), slurp(root_ / "b" / "soliton_pairs.csv"));
}

TEST_F(CliTest, FlagsOverrideTheConfigFile) {
    auto cfg = write_config("c.json", R"({"seed": 5, "output_dir": "ignored"})");
    EXPECT_EQ(run({"soliton-verify", "--config", cfg.string(), "--seed", "6", "--out", root_.string()}), 0);
    EXPECT_EQ(load(root_ / "soliton-verify.summary.json")["config"]["seed"], 6);
    EXPECT_FALSE(fs::exists("ignored"));
}

TEST_F(CliTest, UnwritableOutputIsAnIoError) {
    std::ofstream(root_ / "plain_file") << "x";
    EXPECT_EQ(run({"soliton-verify", "--out", (root_ / "plain_file" / "sub").string()}), 3);
}

TEST_F(CliTest, ReportAggregatesSummaries) {
    EXPECT_EQ(run({"report", "--out", (root_ / "empty").string()}), 3);
    fs::create_directories(root_ / "empty");
    EXPECT_EQ(run({"report", "--out", (root_ / "empty").string()}), 3);

    EXPECT_EQ(run({"soliton-verify", "--out", root_.string()}), 0);
    EXPECT_EQ(run({"report", "--out", root_.string()}), 0);
    auto doc = load(root_ / "report.json");
    EXPECT_TRUE(doc["all_passed"].get<bool>());
    EXPECT_TRUE(doc["suites"]["soliton-verify"]["passed"].get<bool>());
    EXPECT_EQ(doc["missing_suites"].size(), 3u);

    auto cfg = write_config("c.json", small_fuzz);
    EXPECT_EQ(run({"identity-fuzz", "--config", cfg.string(), "--out", root_.string(), "--self-test"}), 1);
    EXPECT_EQ(run({"report", "--out", root_.string()}), 1);
    doc = load(root_ / "report.json");
    EXPECT_FALSE(doc["all_passed"].get<bool>());
    EXPECT_EQ(doc["suites"]["identity-fuzz"]["failures"], nlohmann::json::array({"identity"}));
}

TEST(RunReport, FailListEmptyExactlyWhenExitIsZero) {
    RunReport r;
    EXPECT_EQ(r.exit_code(), 0);
    r.check_le("a", 1.0, 2.0);
    r.check_ge("b", 1.0, 0.0);
    EXPECT_EQ(r.exit_code(), 0);
    EXPECT_TRUE(r.failures().empty());
    r.check_le("nan", std::numeric_limits<double>::quiet_NaN(), 1.0);
    EXPECT_EQ(r.exit_code(), 1);
    EXPECT_EQ(r.failures(), std::vector<std::string>{"nan"});
}

TEST(RunConfig, EchoLeavesOutJobsAndOutputPath) {
    auto c = default_config("lemma-scan");
    c.jobs = 7;
    c.output_dir = "/somewhere";
    const auto j = echo(c);
    EXPECT_FALSE(j.contains("jobs"));
    EXPECT_EQ(j.dump().find("somewhere"), std::string::npos);
    EXPECT_EQ(j["m"], nlohmann::json::array({1, 2}));
}

TEST(ChunkRange, CoversTheTotalExactlyOnce) {
    for (std::size_t total : {0u, 1u, 63u, 64u, 1000001u}) {
        std::size_t next = 0;
        for (std::size_t c = 0; c < 64; ++c) {
            auto [b, e] = chunk_range(total, 64, c);
            EXPECT_EQ(b, next);
            next = e;
        }
        EXPECT_EQ(next, total);
    }
}

TEST(Io, CsvNumbersRoundTrip) {
    EXPECT_EQ(csv_number(0.1), "0.10000000000000001");
    EXPECT_EQ(std::stod(csv_number(1.0 / 3.0)), 1.0 / 3.0);
    EXPECT_EQ(csv_number(std::numeric_limits<double>::infinity()), "");
    CsvBuilder csv;
    csv.row("a", 1, 2.5, true);
    EXPECT_EQ(csv.str(), "a,1,2.5,1\n");
}

TEST(Io, AtomicWriteLeavesNoTemporary) {
    const auto dir = fs::temp_directory_path() / "confsol_atomic";
    fs::remove_all(dir);
    ensure_directory(dir);
    write_atomic(dir / "f.txt", "one");
    write_atomic(dir / "f.txt", "two");
    std::ifstream in(dir / "f.txt");
    std::string s;
    in >> s;
    EXPECT_EQ(s, "two");
    EXPECT_FALSE(fs::exists(dir / "f.txt.tmp"));
    fs::remove_all(dir);
}
