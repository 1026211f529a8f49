#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "stochvar/io/csv.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "stochvar_cli_tests";

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + STOCHVAR_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string dir(const std::string& name) { return (kRoot / name).string(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Every output except the manifest, whose timestamp differs between runs.
void expect_same_outputs(const std::string& a, const std::string& b) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const auto name = e.path().filename();
    if (name == "manifest.json") continue;
    ASSERT_TRUE(fs::exists(fs::path(b) / name)) << name;
    EXPECT_EQ(slurp(e.path()), slurp(fs::path(b) / name)) << name;
    ++n;
  }
  EXPECT_GT(n, 0u);
}

std::string iid_returns(std::size_t n) {
  std::mt19937_64 eng(1);
  std::normal_distribution<double> z(0.0, 0.01);
  std::vector<std::string> dates;
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) {
    dates.push_back(stochvar::io::synthetic_date(i));
    v.push_back(z(eng));
  }
  const std::string p = dir("iid.csv");
  stochvar::io::write_dated_csv(p, dates, v, "return");
  return p;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
  }
  static void TearDownTestSuite() { fs::remove_all(kRoot); }
};

}  // namespace

TEST_F(Cli, InvalidParametersExitTwo) {
  EXPECT_EQ(run("simulate --kappa-h 1e-3 --theta 1e-4 --rho 1.5 -o " + dir("rho")), 2);
  EXPECT_EQ(run("simulate --gamma -0.1 --kappa-h 1e-3 -o " + dir("neg")), 2);
  EXPECT_EQ(run("simulate --kappa-h 1e-3 --bogus 1 -o " + dir("bogus")), 2);
  EXPECT_EQ(run("relax --samples 50 -o " + dir("few")), 2);
  EXPECT_EQ(run("calibrate -i " + dir("missing.csv") + " -o " + dir("missing")), 2);
  EXPECT_EQ(run(""), 2);
}

TEST_F(Cli, ShortInputIsInsufficientData) {
  const std::string p = dir("two.csv");
  std::ofstream(p) << "date,close\n2020-01-01,1\n2020-01-02,1.01\n";
  EXPECT_EQ(run("calibrate -i " + p + " -o " + dir("two")), 2);
}

TEST_F(Cli, FailedFitExitsThree) {
  EXPECT_EQ(run("leverage -i " + iid_returns(3000) + " -o " + dir("lev")), 3);
  EXPECT_TRUE(fs::exists(fs::path(dir("lev")) / "leverage.csv"));
}

TEST_F(Cli, SimulateThenCalibrateAndReplay) {
  ASSERT_EQ(run("simulate --gamma 0.05 --theta 1e-4 --kappa-h 2e-3 --rho -0.3 --steps 3000 --prices "
                "--seed 5 -o " + dir("sim")),
            0);
  const std::string prices = dir("sim") + "/prices.csv";
  ASSERT_TRUE(fs::exists(prices));
  ASSERT_EQ(run("calibrate -i " + prices + " -o " + dir("cal")), 0);
  EXPECT_TRUE(fs::exists(dir("cal") + "/calibration.json"));
  EXPECT_TRUE(fs::exists(dir("cal") + "/manifest.json"));

  ASSERT_EQ(run("replay --manifest " + dir("cal") + "/manifest.json -o " + dir("cal2")), 0);
  expect_same_outputs(dir("cal"), dir("cal2"));

  ASSERT_EQ(run("replay --manifest " + dir("sim") + "/manifest.json -o " + dir("sim2") + " --workers 2"), 0);
  expect_same_outputs(dir("sim"), dir("sim2"));
}

TEST_F(Cli, ReplayRefusesChangedInput) {
  const std::string p = dir("changed.csv");
  {
    std::ofstream out(p);
    out << "date,return\n";
    std::mt19937_64 eng(2);
    std::normal_distribution<double> z(0.0, 0.01);
    for (std::size_t i = 0; i < 400; ++i)
      out << stochvar::io::synthetic_date(i) << ',' << z(eng) * (1.0 + (i / 50) % 2) << '\n';
  }
  const int first = run("corr -i " + p + " --tau-max 20 -o " + dir("corr"));
  ASSERT_TRUE(first == 0 || first == 3);
  std::ofstream(p, std::ios::app) << "2099-01-01,0.01\n";
  EXPECT_EQ(run("replay --manifest " + dir("corr") + "/manifest.json -o " + dir("corr2")), 2);
}

TEST_F(Cli, RelaxOutputIndependentOfWorkers) {
  const std::string base = "relax --gamma 0.1 --kappa2 1e-4 --samples 100 --cumulant-paths 200 "
                           "--cumulant-t-max 20 --seed 9 ";
  ASSERT_EQ(run(base + "--workers 1 -o " + dir("rx1")), 0);
  ASSERT_EQ(run(base + "--workers 3 -o " + dir("rx3")), 0);
  expect_same_outputs(dir("rx1"), dir("rx3"));
  for (const char* f : {"relax.json", "relaxation_times.csv", "histogram.csv", "cumulants_x0_0.csv",
                        "cumulants_x0_1.csv"})
    EXPECT_TRUE(fs::exists(fs::path(dir("rx1")) / f)) << f;
}

TEST_F(Cli, ShowConfigAndVersion) {
  EXPECT_EQ(run("--show-config simulate -o " + dir("cfg")), 0);
  EXPECT_EQ(run("--version"), 0);
}
