// SPDX-License-Identifier: Apache-2.0
// Drives the webpf executable end to end through its subcommands.
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "webpf/markov_miner.hpp"
#include "webpf/metrics.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kFixtures = WEBPF_FIXTURE_DIR;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("webpf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(WEBPF_CLI_PATH) + " " + args + " >" + path("stdout.txt") + " 2>" +
                            path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, IngestFixtureLog) {
  ASSERT_EQ(run("ingest --log " + kFixtures + "/ingest_12.log --sessions-out " + path("s.tsv")), 0)
      << slurp(path("stderr.txt"));
  EXPECT_EQ(slurp(path("s.tsv")), slurp(kFixtures + "/ingest_12_sessions.tsv"));
  EXPECT_NE(slurp(path("stdout.txt")).find("sessions 3"), std::string::npos);
}

TEST_F(Cli, IngestEmptyFile) {
  ASSERT_EQ(run("ingest --log " + kFixtures + "/empty.log --sessions-out " + path("s.tsv")), 0);
  EXPECT_EQ(slurp(path("s.tsv")), "");
  EXPECT_NE(slurp(path("stdout.txt")).find("sessions 0"), std::string::npos);
}

TEST_F(Cli, IngestDiagnosticsFile) {
  std::ofstream(path("bad.log")) << "10.0.0.1 - - [12/Mar/2010:10:00:00 +0000] \"GET /a HTTP/1.0\" 200 1\nnonsense\n";
  ASSERT_EQ(run("ingest --log " + path("bad.log") + " --sessions-out " + path("s.tsv") + " --diagnostics-out " +
                path("d.tsv")),
            0);
  EXPECT_EQ(slurp(path("d.tsv")).rfind("2\t", 0), 0u);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("ingest --log /nonexistent/x.log --sessions-out " + path("s.tsv")), 1);
  std::ofstream(path("bad.toml")) << "[mining]\nnope = 1\n";
  EXPECT_EQ(run("ingest --config " + path("bad.toml") + " --log " + kFixtures + "/ingest_12.log --sessions-out " +
                path("s.tsv")),
            2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("simulate --prefetch maybe"), 2);
  EXPECT_EQ(run("ingest --sessions-out " + path("s.tsv")), 2);  // no log path anywhere
  std::ofstream(path("rules.txt")) << "/a|/b|1|2/1\n";
  std::ofstream(path("t.log")) << "";
  EXPECT_EQ(run("simulate --rules " + path("rules.txt") + " --trace " + path("t.log") + " --report-out " +
                path("r.json")),
            1);
  EXPECT_NE(slurp(path("stderr.txt")).find("line 1"), std::string::npos);
}

TEST_F(Cli, MineFourRuleFixture) {
  ASSERT_EQ(run("mine --config " + kFixtures + "/four_rule_mine.toml --sessions " + kFixtures +
                "/four_rule_sessions.tsv --rules-out " + path("rules.txt")),
            0)
      << slurp(path("stderr.txt"));
  EXPECT_EQ(slurp(path("rules.txt")), slurp(kFixtures + "/four_rule_expected_rules.txt"));
  ASSERT_EQ(run("mine --config " + kFixtures + "/four_rule_mine.toml --sessions " + kFixtures +
                "/four_rule_sessions.tsv --rules-out " + path("again.txt")),
            0);
  EXPECT_EQ(slurp(path("rules.txt")), slurp(path("again.txt")));
}

TEST_F(Cli, MineLogAndSessionsAreExclusive) {
  EXPECT_EQ(run("mine --log a --sessions b --rules-out " + path("r.txt")), 2);
}

TEST_F(Cli, StricterCutoffGivesSubset) {
  ASSERT_EQ(run("gen --out " + path("t.log") + " --seed 11 --requests 2000 --follow 0.5"), 0);
  ASSERT_EQ(run("mine --log " + path("t.log") + " --t-c 1/2 --rules-out " + path("half.txt")), 0);
  ASSERT_EQ(run("mine --log " + path("t.log") + " --t-c 1.0 --rules-out " + path("one.txt")), 0);
  auto lines = [&](const std::string& p) {
    std::set<std::string> out;
    std::istringstream in(slurp(p));
    for (std::string l; std::getline(in, l);) out.insert(l);
    return out;
  };
  const auto half = lines(path("half.txt")), one = lines(path("one.txt"));
  EXPECT_FALSE(half.empty());
  EXPECT_TRUE(std::includes(half.begin(), half.end(), one.begin(), one.end()));
}

TEST_F(Cli, SimulatePlantedTrace) {
  ASSERT_EQ(run("gen --out " + path("t.log") + " --seed 5 --requests 3000"), 0);
  ASSERT_EQ(run("mine --log " + path("t.log") + " --rules-out " + path("rules.txt")), 0);
  const std::string base = "simulate --trace " + path("t.log") + " --rules " + path("rules.txt");
  ASSERT_EQ(run(base + " --prefetch off --report-out " + path("off.json")), 0);
  ASSERT_EQ(run(base + " --prefetch on --report-out " + path("on.json") + " --csv-out " + path("on.csv")), 0);
  ASSERT_EQ(run(base + " --prefetch on --report-out " + path("on2.json")), 0);
  const auto off = webpf::report_from_json(slurp(path("off.json")));
  const auto on = webpf::report_from_json(slurp(path("on.json")));
  EXPECT_EQ(off.prefetch_issued, 0u);
  EXPECT_GT(on.hit_rate(), off.hit_rate());
  EXPECT_EQ(slurp(path("on.json")), slurp(path("on2.json")));
  EXPECT_EQ(slurp(path("on.csv")).rfind("metric,value\n", 0), 0u);

  ASSERT_EQ(run("report --baseline " + path("off.json") + " --prefetch " + path("on.json") + " --out " +
                path("table.txt")),
            0);
  EXPECT_NE(slurp(path("table.txt")).find("hit rate change: +"), std::string::npos);
}

TEST_F(Cli, SelfConsistencyWithAmpleCache) {
  for (const char* seed : {"1", "2", "3"}) {
    ASSERT_EQ(run(std::string("gen --out ") + path("t.log") + " --seed " + seed +
                  " --requests 1500 --alphabet 60 --follow 0.6"),
              0);
    ASSERT_EQ(run("mine --log " + path("t.log") + " --rules-out " + path("rules.txt")), 0);
    const std::string base =
        "simulate --cache-capacity 60 --trace " + path("t.log") + " --rules " + path("rules.txt") + " --report-out ";
    ASSERT_EQ(run(base + path("off.json") + " --prefetch off"), 0);
    ASSERT_EQ(run(base + path("on.json") + " --prefetch on"), 0);
    const auto off = webpf::report_from_json(slurp(path("off.json")));
    const auto on = webpf::report_from_json(slurp(path("on.json")));
    EXPECT_GE(on.hit_rate(), off.hit_rate()) << "seed " << seed;
  }
}

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(run("gen --out " + path("a.log") + " --seed 9 --requests 500"), 0);
  ASSERT_EQ(run("gen --out " + path("b.log") + " --seed 9 --requests 500"), 0);
  EXPECT_EQ(slurp(path("a.log")), slurp(path("b.log")));
  std::ofstream(path("seed.toml")) << "[gen]\nseed = 9\n";
  ASSERT_EQ(run("gen --config " + path("seed.toml") + " --out " + path("c.log") + " --requests 500"), 0);
  EXPECT_EQ(slurp(path("a.log")), slurp(path("c.log")));
  EXPECT_EQ(run("gen --out " + path("d.log") + " --follow 1.5"), 2);
}
