#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "stochvar/calibrate.hpp"
#include "stochvar/simulate.hpp"

using namespace stochvar;

namespace {

ReturnSeries simulated_returns(const MeanRevertingParams& mr, std::size_t days, std::uint64_t seed) {
  SimConfig c;
  c.steps = days;
  c.seed = seed;
  return simulate_joint_path(mr, c).as_returns();
}

bool has_failure(const CalibrationReport& r, const std::string& prefix) {
  for (const auto& f : r.diagnostics.failures)
    if (f.rfind(prefix, 0) == 0) return true;
  return false;
}

}  // namespace

TEST(Calibrate, RecoversHestonParameters) {
  const double gamma = 0.05, theta = 1e-4;
  const double kh = std::sqrt(2 * gamma * theta * 0.4);  // A = 0.4
  const auto mr = MeanRevertingParams::heston(gamma, theta, kh, -0.5);
  const CalibrationReport r = calibrate(simulated_returns(mr, 200000, 1));
  ASSERT_TRUE(r.ok()) << r.diagnostics.failures.front();
  EXPECT_NEAR(r.gamma / gamma, 1.0, 0.25);
  EXPECT_NEAR(r.theta / theta, 1.0, 0.05);
  EXPECT_NEAR(r.kappaH / kh, 1.0, 0.25);
  EXPECT_NEAR(r.A, 0.4, 0.12);
  EXPECT_NEAR(r.rhoH, -0.5, 0.15);
  EXPECT_NEAR(r.gammaL / gamma, 1.0, 0.4);
  EXPECT_TRUE(r.diagnostics.constraint_flags.empty());
  EXPECT_EQ(r.diagnostics.samples, 200000u);
  // Both readings come from the same fits.
  EXPECT_NEAR(r.kappaM * r.kappaM, 2 * r.gamma * r.A / (1 + r.A), 1e-15);
  EXPECT_NEAR(r.rhoM * r.diagnostics.leverage_amplitude_m,
              r.rhoH * r.diagnostics.leverage_amplitude_h, 1e-12);
}

TEST(Calibrate, RecoversMultiplicativeParameters) {
  const double gamma = 0.05, theta = 1e-4;
  const double km = std::sqrt(2 * gamma * 0.25 / 1.25);  // A = 0.25
  const auto mr = MeanRevertingParams::multiplicative(gamma, theta, km, -0.4);
  const CalibrationReport r = calibrate(simulated_returns(mr, 200000, 2));
  ASSERT_TRUE(r.ok()) << r.diagnostics.failures.front();
  EXPECT_NEAR(r.gamma / gamma, 1.0, 0.25);
  EXPECT_NEAR(r.theta / theta, 1.0, 0.05);
  EXPECT_NEAR(r.kappaM / km, 1.0, 0.25);
  EXPECT_NEAR(r.rhoM, -0.4, 0.15);
}

TEST(Calibrate, ShortSeriesIsInsufficientData) {
  ReturnSeries r;
  r.values = {0.01, -0.02};
  EXPECT_THROW(calibrate(r), InsufficientData);
  CalibrationOptions opt;
  opt.tau_max = 10;
  opt.leverage_tau_max = 10;
  r.values.assign(11, 0.01);
  EXPECT_THROW(calibrate(r, opt), InsufficientData);
}

TEST(Calibrate, RejectsNonDailySeries) {
  ReturnSeries r;
  r.values.assign(500, 0.01);
  r.horizon = 5;
  EXPECT_THROW(calibrate(r), DomainError);
}

TEST(Calibrate, NoLeverageGivesSmallRho) {
  const double gamma = 0.05, theta = 1e-4;
  const auto mr = MeanRevertingParams::heston(gamma, theta, std::sqrt(2 * gamma * theta * 0.4));
  const CalibrationReport r = calibrate(simulated_returns(mr, 200000, 3));
  EXPECT_LT(std::abs(r.rhoH), 0.1);
  if (r.diagnostics.leverage_rate_fixed) {
    EXPECT_TRUE(has_failure(r, "leverage"));
    EXPECT_TRUE(std::isnan(r.gammaL));
  }
}

TEST(Calibrate, UncorrelatedReturnsRecordFailuresInsteadOfThrowing) {
  std::mt19937_64 eng(4);
  std::normal_distribution<double> z(0.0, 0.01);
  ReturnSeries r;
  for (int i = 0; i < 20000; ++i) r.values.push_back(z(eng));
  CalibrationReport rep;
  EXPECT_NO_THROW(rep = calibrate(r));
  EXPECT_NEAR(rep.theta, 1e-4, 5e-6);
  // Either the rate fit fails or the amplitude is at noise level.
  if (rep.ok()) EXPECT_LT(std::abs(rep.A), 0.05);
}

TEST(Gamma1, ProfileRowsAndOffsetFit) {
  const double gamma = 0.05, theta = 1e-4;
  const auto mr = MeanRevertingParams::heston(gamma, theta, std::sqrt(2 * gamma * theta * 0.4));
  const ReturnSeries daily = simulated_returns(mr, 200000, 5);
  const std::vector<std::size_t> grid = {1, 5, 21, 30, 40, 50, 60};
  const Gamma1Profile p = gamma1_profile(daily, grid, 100);
  ASSERT_EQ(p.rows.size(), grid.size());
  for (const auto& row : p.rows) {
    ASSERT_TRUE(row.fit.has_value()) << "t = " << row.t << ": " << row.error;
    EXPECT_GT(row.fit->gamma, 0.0);
  }
  EXPECT_TRUE(p.offset_fit.has_value() || !p.offset_error.empty());
  EXPECT_THROW(gamma1_profile(daily, {}, 100), DomainError);
  EXPECT_THROW(gamma1_profile(daily, {300000}, 100), InsufficientData);
}
