#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "riskcut/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "riskcut");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = riskcut::cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("riskcut_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    six_ = write("six.csv", "label,score\n0,0.1\n0,0.2\n0,0.3\n1,0.25\n1,0.4\n1,0.5\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::string six_;
};

}  // namespace

TEST_F(CliTest, FitEmitsReport) {
  const Result r = run({"fit", "--gamma", "1", "-i", six_});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["status"], "Converged");
  EXPECT_DOUBLE_EQ(j["c"].get<double>(), 0.275);
  EXPECT_DOUBLE_EQ(j["d"].get<double>(), 0.025);
  EXPECT_DOUBLE_EQ(j["objective"].get<double>(), 0.025);
  EXPECT_DOUBLE_EQ(j["dual_objective"].get<double>(), 0.025);
  for (const char* key : {"gamma", "status", "c", "d", "l", "u", "objective", "dual_objective", "tie_flag"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j.size(), 9u);
}

TEST_F(CliTest, FitNonConvergenceExitCode) {
  const Result r = run({"fit", "--gamma", "0.1", six_});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("1/(2*min class count)"), std::string::npos);
  EXPECT_EQ(json::parse(r.out)["status"], "NonConvergence");
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"fit", six_}).code, 2);
  EXPECT_EQ(run({"fit", "--gamma", "-1", six_}).code, 2);
  EXPECT_EQ(run({"fit", "--gamma", "1", "--hard-margin", six_}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"sweep", "--grid", "0.5,x", six_}).code, 2);
  EXPECT_EQ(run({"sweep", "--grid", "1,0.5", six_}).code, 2);
  EXPECT_EQ(run({"simulate", "--study", "4"}).code, 2);
  EXPECT_EQ(run({"simulate", "--runs", "0"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, DataErrors) {
  const std::string bad = write("bad.csv", "label,score\n1,abc\n");
  const Result r = run({"roc", bad});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("line 2: invalid score"), std::string::npos);
  const std::string one_class = write("one.csv", "label,score\n1,0.2\n1,0.3\n");
  EXPECT_EQ(run({"fit", "--gamma", "1", one_class}).code, 3);
  EXPECT_EQ(run({"roc", (dir_ / "missing.csv").string()}).code, 2);
}

TEST_F(CliTest, HardMargin) {
  const Result r = run({"fit", "--hard-margin", six_});
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["l"].get<double>(), 0.25);
  EXPECT_DOUBLE_EQ(j["u"].get<double>(), 0.3);
  EXPECT_TRUE(j["gamma"].is_null());
}

TEST_F(CliTest, SweepCsv) {
  const Result r = run({"sweep", "--grid", "0.5,1,2", six_});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "gamma,status,c,d,l,u,coverage,selective_risk,acc_nonreject,acc_all");
  std::string row;
  int rows = 0;
  while (std::getline(lines, row)) ++rows;
  EXPECT_EQ(rows, 3);

  const Result below = run({"sweep", "--grid", "0.1,1", six_});
  EXPECT_EQ(below.code, 4);
  EXPECT_NE(below.out.find("0.1,NonConvergence,,,,,,,,"), std::string::npos);

  const Result automatic = run({"sweep", "--points", "5", six_});
  EXPECT_EQ(automatic.code, 0);
}

TEST_F(CliTest, RcCurveAndAurc) {
  Result r = run({"rc-curve", six_});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out,
            "coverage,risk,k,gamma,l,u\n"
            "0.666666666667,0,1,1,0.25,0.3\n"
            "1,0.333333333333,0,,0.275,0.275\n");
  const std::string csv = (dir_ / "rc.csv").string();
  r = run({"rc-curve", "--aurc", "-o", csv, six_});
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out)["aurc"].get<double>(), 0.0556, 1e-4);
  EXPECT_EQ(slurp(csv).substr(0, 24), "coverage,risk,k,gamma,l,");
}

TEST_F(CliTest, Roc) {
  const Result r = run({"roc", six_});
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out)["auc"].get<double>(), 8.0 / 9.0, 1e-12);
}

TEST_F(CliTest, SimulateIsByteIdentical) {
  const std::string a = (dir_ / "a.json").string();
  const std::string b = (dir_ / "b.json").string();
  ASSERT_EQ(run({"simulate", "--study", "1n", "--runs", "20", "--seed", "7", "-o", a}).code, 0);
  ASSERT_EQ(run({"simulate", "--study", "1n", "--runs", "20", "--seed", "7", "--threads", "3", "-o", b}).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const json j = json::parse(slurp(a));
  EXPECT_EQ(j["runs"], 20);
  EXPECT_EQ(j["per_gamma"].size(), 15u);
}

TEST_F(CliTest, SimulateStudyTwoAndTwoStep) {
  Result r = run({"simulate", "--study", "2", "--signal", "weak", "--runs", "2", "--n", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_EQ(j["signal"], "weak");
  EXPECT_TRUE(j.contains("aurc_test"));

  r = run({"two-step", "--runs", "2", "--n1", "200", "--n2", "40"});
  ASSERT_EQ(r.code, 0) << r.err;
  j = json::parse(r.out);
  ASSERT_EQ(j["methods"].size(), 3u);
  EXPECT_EQ(j["methods"][1]["method"], "TwoStepSvm");
  EXPECT_EQ(j["truth"][2], 0.0);
}

#ifdef RISKCUT_CLI_PATH
TEST_F(CliTest, ExecutableExitCodes) {
  const std::string exe = RISKCUT_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status(exe + " fit --gamma 1 " + six_), 0);
  EXPECT_EQ(status(exe + " fit --gamma 0.1 " + six_), 4);
  EXPECT_EQ(status(exe + " fit " + six_), 2);
  EXPECT_EQ(status(exe + " roc " + write("bad.csv", "label,score\n2,0.5\n")), 3);
}
#endif
