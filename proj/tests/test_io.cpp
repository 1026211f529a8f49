#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "stochvar/io/csv.hpp"
#include "stochvar/io/ensemble_file.hpp"
#include "stochvar/io/json.hpp"
#include "stochvar/io/manifest.hpp"

using namespace stochvar;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("stochvar_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& body) {
    const std::string p = (dir_ / name).string();
    std::ofstream(p, std::ios::binary) << body;
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::size_t parse_error_line(const std::string& file) {
  try {
    io::read_dated_csv(file);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Csv, NumberFormattingRoundTrips) {
  for (double x : {0.1, 1e-300, -2.5e10, 1.0 / 3.0, 0.0}) {
    double y = 0.0;
    ASSERT_TRUE(io::parse_double(io::format_number(x), y));
    EXPECT_EQ(x, y);
  }
  EXPECT_EQ(io::format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  double y = 0.0;
  EXPECT_FALSE(io::parse_double("1,5", y));
  EXPECT_FALSE(io::parse_double("abc", y));
  EXPECT_TRUE(io::parse_double(" +2.5 ", y));
  EXPECT_EQ(y, 2.5);
}

TEST(Csv, DateHelpers) {
  EXPECT_TRUE(io::is_iso_date("2020-02-29"));
  EXPECT_FALSE(io::is_iso_date("2021-02-29"));
  EXPECT_FALSE(io::is_iso_date("2020-13-01"));
  EXPECT_FALSE(io::is_iso_date("20200101"));
  EXPECT_EQ(io::synthetic_date(0), "2000-01-01");
  EXPECT_EQ(io::synthetic_date(366), "2001-01-01");
}

TEST_F(TempDir, ReadsPricesAndReturns) {
  const auto prices = write("p.csv", "date,close\n2020-01-02,100\n2020-01-03,101\n\n2020-01-06,99.5\n");
  const auto ds = io::read_dated_csv(prices);
  EXPECT_EQ(ds.column, "close");
  EXPECT_EQ(ds.values.size(), 3u);
  const ReturnSeries r = io::load_returns(prices, "p");
  EXPECT_EQ(r.size(), 2u);
  EXPECT_NEAR(r.values[0] + r.values[1], 0.0, 1e-17);

  const auto rets = write("r.csv", "date,return\r\n2020-01-02,0.01\r\n2020-01-03,-0.03\r\n");
  const ReturnSeries rr = io::load_returns(rets, "r");
  EXPECT_NEAR(rr.values[0], 0.02, 1e-15);
}

TEST_F(TempDir, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line(write("a.csv", "day,close\n2020-01-01,1\n")), 1u);
  EXPECT_EQ(parse_error_line(write("b.csv", "date,close\n2020-01-01,1\n2020-01-02,x\n")), 3u);
  EXPECT_EQ(parse_error_line(write("c.csv", "date,close\n2020-01-02,1\n2020-01-01,2\n")), 3u);
  EXPECT_EQ(parse_error_line(write("d.csv", "date,close\n2020-01-01,1\n2020-01-02,-1\n")), 3u);
  EXPECT_EQ(parse_error_line(write("e.csv", "date,close\n01/02/2020,1\n")), 2u);
  EXPECT_EQ(parse_error_line(write("f.csv", "date,close\n2020-01-01,1,2\n")), 2u);
  EXPECT_EQ(parse_error_line(write("g.csv", "date,close\n2020-01-01,1,5\n")), 2u);
  EXPECT_THROW(io::read_dated_csv(path("missing.csv")), ParseError);
  EXPECT_THROW(io::read_dated_csv(write("empty.csv", "")), ParseError);
  try {
    io::read_dated_csv(path("b.csv"));
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("b.csv:3"), std::string::npos);
  }
}

TEST_F(TempDir, WrittenCsvReadsBack) {
  const std::vector<std::string> dates = {"2000-01-01", "2000-01-02", "2000-01-03"};
  const std::vector<double> values = {0.1, -1.0 / 3.0, 2e-9};
  io::write_dated_csv(path("w.csv"), dates, values, "return");
  const auto ds = io::read_dated_csv(path("w.csv"));
  EXPECT_EQ(ds.dates, dates);
  EXPECT_EQ(ds.values, values);

  io::write_lag_csv(path("lag.csv"), {1, 2}, {0.5, 0.25});
  std::ifstream in(path("lag.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "lag,value");
}

TEST_F(TempDir, EnsembleFileRoundTrip) {
  const auto mr = MeanRevertingParams::heston(0.05, 1e-4, 2e-3, -0.3);
  SimConfig c;
  c.steps = 50;
  c.seed = 11;
  const JointEnsemble je = simulate_joint_ensemble(mr, c, 4, 1);
  io::write_ensemble(path("j.bin"), je);
  const io::EnsembleFile f = io::read_ensemble(path("j.bin"));
  EXPECT_EQ(f.n_paths, 4u);
  EXPECT_EQ(f.steps, 50u);
  EXPECT_EQ(f.seed, 11u);
  ASSERT_EQ(f.dx.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(f.initial[i], je.paths[i].variance.initial);
    EXPECT_EQ(f.v[i], je.paths[i].variance.values);
    EXPECT_EQ(f.dx[i], je.paths[i].returns);
  }
  EXPECT_EQ(fs::file_size(path("j.bin")), 48u + 4u * (1 + 2 * 50) * 8u);

  const Ensemble ve = simulate_ensemble(mr, c, 2, 1);
  io::write_ensemble(path("v.bin"), ve);
  const io::EnsembleFile g = io::read_ensemble(path("v.bin"));
  EXPECT_TRUE(g.dx.empty());
  EXPECT_EQ(g.v[1], ve.paths[1].values);

  fs::resize_file(path("v.bin"), 100);
  EXPECT_THROW(io::read_ensemble(path("v.bin")), ParseError);
  EXPECT_THROW(io::read_ensemble(write("bad.bin", "NOTANENSEMBLEFILE")), ParseError);
}

TEST_F(TempDir, ManifestRoundTrip) {
  const auto in = write("in.csv", "date,close\n2020-01-01,1\n");
  io::RunManifest m;
  m.command = "calibrate";
  m.argv = {"calibrate", "--input", in};
  m.params = {{"tau_max", 100}};
  m.add_input(in);
  m.seed = 42;
  m.version = "x";
  m.timestamp = io::utc_timestamp();
  m.outputs = {"calibration.json"};
  io::write_json(path("manifest.json"), io::to_json(m));
  const io::json j = io::read_json(path("manifest.json"));
  EXPECT_EQ(j.at("schema_version"), io::kSchemaVersion);
  EXPECT_EQ(j.begin().key(), "schema_version");
  const io::RunManifest back = io::manifest_from_json(j);
  EXPECT_EQ(back.argv, m.argv);
  EXPECT_EQ(back.inputs, m.inputs);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.inputs.at(in).size(), 16u);
  EXPECT_THROW(io::manifest_from_json(io::json{{"kind", "other"}}), ParseError);
  EXPECT_THROW(io::read_json(write("broken.json", "{")), ParseError);
}

TEST(Json, NonFiniteBecomesNull) {
  EXPECT_TRUE(io::number(std::nan("")).is_null());
  CalibrationReport r;
  const io::json j = io::to_json(r);
  EXPECT_TRUE(j.at("gamma").is_null());
  EXPECT_TRUE(j.at("diagnostics").at("corr_fit").is_null());
}

TEST(Fnv, KnownVector) {
  // FNV-1a 64 of the empty input is the offset basis.
  const auto p = (fs::temp_directory_path() / "stochvar_fnv_empty").string();
  std::ofstream(p, std::ios::binary).close();
  EXPECT_EQ(io::fnv1a_file(p), "cbf29ce484222325");
  std::ofstream(p, std::ios::binary) << "a";
  EXPECT_EQ(io::fnv1a_file(p), "af63dc4c8601ec8c");
  fs::remove(p);
}
