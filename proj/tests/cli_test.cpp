#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "coedit/channel.hpp"
#include "fixture_repo.hpp"

namespace coedit {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("coedit_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  /// Runs the tool with standard error folded into the captured output.
  CommandResult run(const std::string& args) {
    return run_command({"sh", "-c", std::string(COEDIT_CLI) + " " + args + " 2>&1"}, dir_.string());
  }

  /// Runs the tool keeping only standard output.
  CommandResult run_stdout(const std::string& args) {
    return run_command({"sh", "-c", std::string(COEDIT_CLI) + " " + args + " 2>/dev/null"}, dir_.string());
  }

  void write(const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; }

  std::string read(const std::string& name) {
    std::ifstream in(dir_ / name);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

TEST_F(Cli, MetricPrintsTheDistance) {
  write("a.txt", "kitten\n");
  write("b.txt", "sitting\n");
  auto r = run_stdout("metric --kind lev --before a.txt --after b.txt");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.output, "3\n");
  write("c.txt", "hello world");
  write("d.txt", "hello");
  EXPECT_EQ(run_stdout("metric --kind keys --before c.txt --after d.txt --init 0").output, "6\n");
  EXPECT_EQ(run_stdout("metric --kind lines --before a.txt --after b.txt").output, "2\n");
}

TEST_F(Cli, UsageErrorsExitWithOne) {
  auto r = run("frobnicate");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("Usage:"), std::string::npos);
  EXPECT_EQ(run("metric --kind bogus --before x --after y").status, 1);
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("--help").status, 0);
}

TEST_F(Cli, DataErrorsExitWithTwo) {
  EXPECT_EQ(run("stats --instances missing.jsonl").status, 2);
  write("bad.jsonl", "{\"schema\": \"coedit/1\"\n");
  EXPECT_EQ(run("simulate --instances bad.jsonl").status, 2);
  EXPECT_EQ(run("mine --repos . --out x.jsonl").status, 2);
  EXPECT_EQ(run("simulate --instances bad.jsonl --query-tokens 0").status, 2);
}

TEST_F(Cli, MineSimulateAndStatsPipeline) {
  const std::string repo = testing::fixture_repository().string();
  ASSERT_EQ(run("mine --repos " + repo + " --out mined.jsonl").status, 0);
  const auto summary = nlohmann::json::parse(read("mined.jsonl.summary.json"));
  EXPECT_EQ(summary.at("modified_functions"), 7);
  EXPECT_EQ(summary.at("changed_lines"), 19);

  ASSERT_EQ(run("simulate --instances mined.jsonl --oracle truth --out truth.json").status, 0);
  const auto report = nlohmann::json::parse(read("truth.json"));
  EXPECT_EQ(report.at("schema"), "coedit-report/1");
  EXPECT_EQ(report.at("summary").at("gain_percent").at("lines"), 100.0);
  EXPECT_EQ(report.at("summary").at("mean_rounds"), 1.0);

  const auto stats = run_stdout("stats --instances mined.jsonl");
  ASSERT_EQ(stats.status, 0);
  const auto s = nlohmann::json::parse(stats.output);
  EXPECT_EQ(s.at("modified_functions"), 7);
  EXPECT_EQ(s.at("instances"), 7);

  ASSERT_EQ(run("instances --in mined.jsonl --out completion.jsonl --kind completion").status, 0);
  ASSERT_EQ(run("encode --instances mined.jsonl --index 0 --json").status, 0);
  const auto request = nlohmann::json::parse(run_stdout("encode --instances mined.jsonl --index 0 --json").output);
  EXPECT_TRUE(request.contains("target"));
  EXPECT_EQ(request.at("region").at("a"), 1);
}

TEST_F(Cli, SameArgumentsGiveIdenticalOutput) {
  const std::string repo = testing::fixture_repository().string();
  ASSERT_EQ(run("mine --repos " + repo + " --out one.jsonl --multiround --seed 11").status, 0);
  ASSERT_EQ(run("mine --repos " + repo + " --out two.jsonl --multiround --seed 11 -j 3").status, 0);
  EXPECT_EQ(read("one.jsonl"), read("two.jsonl"));
  ASSERT_EQ(run("instances --in one.jsonl --out m1.jsonl --seed 5").status, 0);
  ASSERT_EQ(run("instances --in one.jsonl --out m2.jsonl --seed 5").status, 0);
  EXPECT_EQ(read("m1.jsonl"), read("m2.jsonl"));
  const auto a = run_stdout("simulate --instances one.jsonl --oracle echo");
  const auto b = run_stdout("simulate --instances one.jsonl --oracle echo -j 4");
  EXPECT_EQ(a.output, b.output);
}

TEST_F(Cli, ConfigFileSuppliesDefaultsAndFlagsOverride) {
  write("a.txt", "hello world");
  write("b.txt", "hello");
  write("coedit.toml", "init = 0\njump = 2\n");
  EXPECT_EQ(run_stdout("--config coedit.toml metric --kind keys --before a.txt --after b.txt").output, "4\n");
  EXPECT_EQ(run_stdout("--config coedit.toml metric --kind keys --before a.txt --after b.txt --jump 4").output, "6\n");
}

}  // namespace
}  // namespace coedit
