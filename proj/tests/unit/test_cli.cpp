#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cbrl/cli.hpp"

using namespace cbrl::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "cbrl");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        root = fs::temp_directory_path() /
               ("cbrl-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(root);
        fs::create_directories(root);
        config = (root / "small.json").string();
        std::ofstream(config) << R"({"users_per_profile": 2, "learning_days": 10, "clustering": {"restarts": 2}})";
    }
    void TearDown() override { fs::remove_all(root); }

    std::string out(const std::string& name) const { return (root / name).string(); }

    fs::path root;
    std::string config;
};

std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            std::ifstream in(e.path(), std::ios::binary);
            std::ostringstream s;
            s << in.rdbuf();
            files[fs::relative(e.path(), dir).string()] = s.str();
        }
    }
    return files;
}

}  // namespace

TEST_F(CliTest, HelpAndUsageErrors) {
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
    EXPECT_EQ(cli({}).code, kExitUsage);
    EXPECT_EQ(cli({"dance"}).code, kExitUsage);
    EXPECT_EQ(cli({"run", "--seed", "abc"}).code, kExitUsage);
    EXPECT_EQ(cli({"cluster"}).code, kExitUsage);
}

TEST_F(CliTest, MissingConfigFailsBeforeCreatingOutput) {
    const auto r = cli({"run", "--config", out("nope.json"), "--out", out("res")});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("nope.json"), std::string::npos);
    EXPECT_FALSE(fs::exists(out("res")));

    std::ofstream(out("bad.json")) << R"({"learning_days": -3})";
    EXPECT_EQ(cli({"run", "--config", out("bad.json"), "--out", out("res")}).code, kExitUsage);
    EXPECT_FALSE(fs::exists(out("res")));
    EXPECT_EQ(cli({"run", "--config", config, "--only", "lspi-mixed", "--out", out("res")}).code, kExitUsage);
    EXPECT_FALSE(fs::exists(out("res")));
}

TEST_F(CliTest, OnlyRestrictsToOneRun) {
    const auto r = cli({"run", "--config", config, "--only", "lspi-grouped", "--out", out("res")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(fs::is_directory(out("res") + "/lspi-grouped"));
    int run_dirs = 0;
    for (const auto& e : fs::directory_iterator(out("res"))) {
        run_dirs += e.is_directory() ? 1 : 0;
    }
    EXPECT_EQ(run_dirs, 1);
    EXPECT_NE(r.out.find("lspi-grouped"), std::string::npos);
}

TEST_F(CliTest, RefusesNonEmptyOutputWithoutForce) {
    fs::create_directories(out("res"));
    std::ofstream(out("res") + "/keep.txt") << "x";
    const auto r = cli({"run", "--config", config, "--only", "qlearning-pooled", "--out", out("res")});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("--force"), std::string::npos);
    EXPECT_TRUE(fs::exists(out("res") + "/keep.txt"));
    const auto forced = cli({"run", "--config", config, "--only", "qlearning-pooled", "--out", out("res"), "--force"});
    EXPECT_EQ(forced.code, kExitOk) << forced.err;
    EXPECT_FALSE(fs::exists(out("res") + "/keep.txt"));
}

TEST_F(CliTest, RepeatedRunsProduceIdenticalTrees) {
    ASSERT_EQ(cli({"run", "--config", config, "--seed", "3", "--out", out("a")}).code, kExitOk);
    ASSERT_EQ(cli({"run", "--config", config, "--seed", "3", "--out", out("b")}).code, kExitOk);
    const auto a = tree(out("a"));
    const auto b = tree(out("b"));
    EXPECT_EQ(a.size(), 8u * 4u + 3u);
    EXPECT_EQ(a, b);

    const auto report = cli({"report", out("a")});
    EXPECT_EQ(report.code, kExitOk) << report.err;
    EXPECT_TRUE(fs::is_regular_file(out("a") + "/report/fig1_average_daily_reward.csv"));
}

TEST_F(CliTest, OutputRootFromEnvironment) {
    ::setenv("CBRL_OUTPUT_ROOT", out("env").c_str(), 1);
    const auto r = cli({"warmup-only", "--config", config, "--seed", "11"});
    ::unsetenv("CBRL_OUTPUT_ROOT");
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(fs::is_regular_file(out("env") + "/seed-11/traces.csv"));
    EXPECT_TRUE(fs::is_regular_file(out("env") + "/seed-11/config.json"));
}

TEST_F(CliTest, ClusterSubcommandReadsWarmupTraces) {
    ASSERT_EQ(cli({"warmup-only", "--config", config, "--out", out("warm")}).code, kExitOk);
    const auto r = cli({"cluster", "--config", config, "--traces", out("warm") + "/traces.csv", "--out", out("cl")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("k = "), std::string::npos);
    std::ifstream in(out("cl") + "/clusters.csv");
    int lines = 0;
    for (std::string line; std::getline(in, line);) {
        ++lines;
    }
    EXPECT_EQ(lines, 7);

    EXPECT_EQ(cli({"cluster", "--traces", out("missing.csv"), "--out", out("cl2")}).code, kExitUsage);
    EXPECT_EQ(cli({"cluster", "--traces", out("warm") + "/traces.csv", "--days", "8", "--out", out("cl3")}).code,
              kExitUsage);
}

TEST_F(CliTest, ReportOnEmptyDirectoryIsUsageError) {
    fs::create_directories(out("empty"));
    const auto r = cli({"report", out("empty")});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("metrics.csv"), std::string::npos);
}
