#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "rmnl/config.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("rmnl_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string(RMNL_CLI_PATH) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

constexpr const char* kSmall =
    "n = 10\nk = 3\nt = 800\neps = 0.1\npolicy = all\ntrials = 3\ncheckpoints = 8\n";

TEST_F(Cli, RunTwiceGivesIdenticalBytes) {
  const fs::path cfg = write_config("small.cfg", kSmall);
  const fs::path a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run("run --config " + cfg.string() + " --seed 7 --out " + a.string()).code, 0);
  ASSERT_EQ(run("run --config " + cfg.string() + " --seed 7 --out " + b.string()).code, 0);
  for (const char* f : {"traces.csv", "aggregate.csv"}) {
    EXPECT_FALSE(slurp(a / f).empty()) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_TRUE(fs::exists(a / "manifest.json"));
}

TEST_F(Cli, OverridesAppearInManifest) {
  const fs::path cfg = write_config("small.cfg", kSmall);
  const fs::path out = dir_ / "o";
  const Result r = run("run --config " + cfg.string() +
                       " --policy active_elim --eps-bar 0.25 --trials 2 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(m["config"]["eps_bar"].get<double>(), 0.25);
  EXPECT_EQ(m["config"]["policies"], nlohmann::json::array({"active_elim"}));
  EXPECT_EQ(m["config"]["trials"].get<int>(), 2);
  EXPECT_TRUE(m.contains("version"));
  EXPECT_TRUE(m.contains("wall_clock_seconds"));

  // The echoed config text re-parses to the config that was run.
  const rmnl::ExperimentConfig echoed =
      rmnl::resolve_config(rmnl::parse_config_text(m["config_text"].get<std::string>(), "echo"));
  EXPECT_EQ(echoed.eps_bar, 0.25);
  EXPECT_EQ(echoed.trials, 2);
  EXPECT_EQ(rmnl::to_config_text(echoed), m["config_text"].get<std::string>());
  EXPECT_EQ(slurp(out / "config.resolved"), m["config_text"].get<std::string>());
}

TEST_F(Cli, FlagsAloneAreEnough) {
  const fs::path out = dir_ / "flags";
  const Result r = run("run --n 6 --k 2 --t 300 --eps 0 --policy ts --trials 1 --out " +
                       out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "traces.csv"));
}

TEST_F(Cli, MissingRequiredFieldExitsTwo) {
  const fs::path cfg = write_config("bad.cfg", "n = 10\nk = 3\nt = 100\npolicy = ts\n");
  const Result r = run("run --config " + cfg.string() + " --out " + (dir_ / "x").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("eps"), std::string::npos) << r.err;
}

TEST_F(Cli, InvalidValueReportsLine) {
  const fs::path cfg =
      write_config("bad.cfg", "n = 10\nk = 3\nt = 100\n\neps = 2\npolicy = ts\n");
  const Result r = run("run --config " + cfg.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.cfg:5"), std::string::npos) << r.err;
}

TEST_F(Cli, BadFlagOverrideNamesFlag) {
  const fs::path cfg = write_config("small.cfg", kSmall);
  const Result r = run("run --config " + cfg.string() + " --k 50");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--k"), std::string::npos) << r.err;
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("run --no-such-flag").code, 2);
  EXPECT_EQ(run("run --config " + (dir_ / "absent.cfg").string()).code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, FigurePresetValidation) {
  EXPECT_EQ(run("reproduce-fig1 --preset N50K5").code, 2);
  EXPECT_EQ(run("reproduce-fig1 --preset N100K10 --eps 0.2").code, 2);
}

TEST_F(Cli, FigureRowCount) {
  const Result r =
      run("reproduce-fig1 --preset N100K10 --eps 0.05 --trials 1 --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(dir_ / "fig1_N100K10_eps0.05.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "policy,T,t,mean,sd,trials");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4 * 5 * 4);
}

TEST_F(Cli, SelftestPasses) {
  const Result r = run("selftest");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("cases="), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}

}  // namespace
