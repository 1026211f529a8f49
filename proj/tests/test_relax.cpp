#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "stochvar/relax.hpp"

using namespace stochvar;

namespace {

Ensemble unit_ensemble(const HestonUnitParams& p, double x0, std::size_t paths, std::size_t days,
                       std::uint64_t seed) {
  SimConfig c;
  c.steps = days;
  c.x0 = x0;
  c.seed = seed;
  return simulate_ensemble(p.to_params(), c, paths, 1);
}

RelaxationConfig quick_config() {
  RelaxationConfig c;
  c.seed = 3;
  return c;
}

}  // namespace

TEST(KStatistic, ReferenceValues) {
  const std::vector<double> x = {1, 2, 3, 4, 10};
  EXPECT_DOUBLE_EQ(k_statistic(x, 1), 4.0);
  EXPECT_DOUBLE_EQ(k_statistic(x, 2), 12.5);
  EXPECT_NEAR(k_statistic(x, 3), 75.0, 1e-12);
  EXPECT_THROW(k_statistic(x, 4), DomainError);
  EXPECT_THROW(k_statistic(std::vector<double>{1, 2}, 1), InsufficientData);
}

TEST(Cumulants, EnsembleTracksTheory) {
  const HestonUnitParams p{0.1, 3e-4};
  const std::vector<double> times = {0, 5, 10, 20, 50, 100};
  for (double x0 : {0.0, 1.0}) {
    const Ensemble ens = unit_ensemble(p, x0, 2000, 100, 7);
    const auto curves = empirical_cumulants(ens, p, times);
    ASSERT_EQ(curves.size(), 3u);
    for (std::size_t j = 1; j < times.size(); ++j) {
      EXPECT_NEAR(curves[0].empirical[j], curves[0].theory[j], 5 * curves[0].stderr_[j] + 1e-3);
      EXPECT_NEAR(curves[1].empirical[j], curves[1].theory[j], 5 * curves[1].stderr_[j]);
      EXPECT_GT(curves[1].stderr_[j], 0.0);
    }
    EXPECT_EQ(curves[0].empirical[0], x0);
  }
}

TEST(Cumulants, ErrorShrinksAsInverseRootPaths) {
  // 400 vs 900 paths: RMS relative error ratio should be near sqrt(900/400) = 1.5.
  const HestonUnitParams p{0.1, 3e-4};
  std::vector<double> times;
  for (double t = 5; t <= 100; t += 5) times.push_back(t);
  CumulantOptions opt;
  opt.orders = {2};
  opt.bootstrap = 0;
  auto mse = [&](std::size_t paths, std::uint64_t seed0) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::uint64_t r = 0; r < 30; ++r) {
      const auto c = empirical_cumulants(unit_ensemble(p, 1.0, paths, 100, seed0 + r), p, times, opt);
      for (std::size_t j = 0; j < times.size(); ++j) {
        const double e = c[0].empirical[j] / c[0].theory[j] - 1.0;
        s += e * e;
        ++n;
      }
    }
    return s / static_cast<double>(n);
  };
  const double ratio = std::sqrt(mse(400, 1000) / mse(900, 2000));
  EXPECT_GE(ratio, 1.2);
  EXPECT_LE(ratio, 1.8);
}

TEST(Cumulants, Refusals) {
  const HestonUnitParams p{0.1, 3e-4};
  EXPECT_THROW(empirical_cumulants(unit_ensemble(p, 1.0, 50, 10, 1), p, {1.0}), InsufficientData);
  const Ensemble ens = unit_ensemble(p, 1.0, 100, 10, 1);
  EXPECT_THROW(empirical_cumulants(ens, p, {20.0}), DomainError);
  EXPECT_THROW(empirical_cumulants(ens, p, {1.5}), DomainError);
  SimConfig c;
  c.steps = 10;
  const Ensemble drawn = simulate_ensemble(p.to_params(), c, 100, 1);
  EXPECT_THROW(empirical_cumulants(drawn, p, {1.0}), DomainError);
}

TEST(Relaxation, ConfigDefaults) {
  const RelaxationConfig c;
  EXPECT_EQ(c.rule, RelaxationRule::Threshold);
  EXPECT_DOUBLE_EQ(c.sample_interval(0.1), 0.2);
  EXPECT_EQ(c.samples_per_path(), 5000u);
  RelaxationConfig bad = c;
  bad.horizon = 20;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = c;
  bad.ks_threshold = 1.5;
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Relaxation, NoiseFreePathIsFlagged) {
  const HestonUnitParams p{0.1, 0.0};
  const SteadyStateDist steady = steady_state_of(HestonUnitParams{0.1, 1e-4}.to_params());
  const RelaxationSample s = measure_relaxation_time(p, quick_config(), steady);
  EXPECT_TRUE(s.flagged);
  EXPECT_TRUE(std::isnan(s.time));
  EXPECT_GE(s.ks_min, 0.5);
  EXPECT_FALSE(s.reason.empty());
  EXPECT_THROW(measure_relaxation_time(p, quick_config()), DomainError);

  RelaxationConfig hm = quick_config();
  hm.rule = RelaxationRule::HorizonMinimum;
  EXPECT_TRUE(measure_relaxation_time(p, hm, steady).flagged);
}

TEST(Relaxation, SinglePathReachesThreshold) {
  const HestonUnitParams p{0.1, 1e-4};
  const RelaxationSample s = measure_relaxation_time(p, quick_config(), 4);
  ASSERT_FALSE(s.flagged) << s.reason;
  EXPECT_LE(s.ks_at_time, 0.2);
  EXPECT_GT(s.time, 0.0);
  EXPECT_EQ(s.stream_index, 4u);
  EXPECT_EQ(s.stream_seed, substream_seed(3, 4));
  // The time is a multiple of the sampling interval.
  const double k = s.time / 0.2;
  EXPECT_NEAR(k, std::round(k), 1e-9);
}

TEST(Relaxation, HorizonMinimumRule) {
  const HestonUnitParams p{0.1, 1e-4};
  RelaxationConfig c = quick_config();
  c.rule = RelaxationRule::HorizonMinimum;
  c.checkpoint_every = 10;
  const RelaxationSample s = measure_relaxation_time(p, c, 0);
  ASSERT_TRUE(std::isfinite(s.time));
  EXPECT_LE(s.ks_at_time, 1.05 * s.ks_min + 1e-15);
  EXPECT_EQ(s.checkpoints, 500u);
}

TEST(Relaxation, ExperimentIsDeterministicAcrossWorkers) {
  const HestonUnitParams p{0.1, 1e-4};
  const RelaxationExperiment a = relaxation_experiment(p, 100, quick_config(), 1);
  const RelaxationExperiment b = relaxation_experiment(p, 100, quick_config(), 3);
  EXPECT_EQ(a.times, b.times);
  EXPECT_EQ(a.fits.size(), 6u);
  EXPECT_EQ(a.ranking.size(), 6u);
  EXPECT_EQ(a.flagged + a.times.size(), 100u);
  EXPECT_FALSE(a.unreliable);
  EXPECT_GT(a.cumulants.mean, 0.0);
  for (std::size_t i = 1; i < a.ranking.size(); ++i)
    EXPECT_LE(a.fits[a.ranking[i - 1]].ks, a.fits[a.ranking[i]].ks);
}

TEST(Relaxation, RefusesSmallSamples) {
  EXPECT_THROW(relaxation_experiment(HestonUnitParams{0.1, 1e-4}, 50, quick_config()),
               InsufficientData);
  EXPECT_THROW(gamma_scaling({0.1, 0.2}, 1e-4, 50, quick_config()), InsufficientData);
  EXPECT_THROW(gamma_scaling({0.1}, 1e-4, 100, quick_config()), DomainError);
}

TEST(Relaxation, MeanScalesInverselyWithGamma) {
  const ScalingTable t = gamma_scaling({0.05, 0.2}, 1e-4, 100, quick_config(), 1);
  ASSERT_EQ(t.cumulants.size(), 2u);
  EXPECT_NEAR(t.slope_mean, -1.0, 0.2);
}
