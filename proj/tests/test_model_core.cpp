#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "stochvar/analytic.hpp"
#include "stochvar/params.hpp"
#include "stochvar/steady_state.hpp"
#include "steady_suite.hpp"
#include "support.hpp"

using namespace stochvar;

TEST(Params, ValidParametersConstruct) {
  EXPECT_NO_THROW(MeanRevertingParams::heston(0.05, 1e-4, 2e-3, -0.3));
  EXPECT_NO_THROW(MeanRevertingParams::multiplicative(0.05, 1e-4, 0.2));
  EXPECT_NO_THROW(MeanRevertingParams(0.05, 1e-4, 0.2, 1e-3, 0.5));
}

TEST(Params, ViolationsNameTheConstraint) {
  auto constraint_of = [](auto make) {
    try {
      make();
    } catch (const ConstraintViolation& e) {
      return e.constraint();
    }
    return std::string("none");
  };
  EXPECT_EQ(constraint_of([] { MeanRevertingParams(-1.0, 1.0, 0.0, 0.1); }), "gamma > 0");
  EXPECT_EQ(constraint_of([] { MeanRevertingParams(0.1, 0.0, 0.0, 0.1); }), "theta > 0");
  EXPECT_EQ(constraint_of([] { MeanRevertingParams(0.1, 1.0, 0.0, 0.1, 1.5); }), "-1 <= rho <= 1");
  EXPECT_EQ(constraint_of([] { MeanRevertingParams(0.1, 1.0, 0.0, 0.0); }),
            "kappaM > 0 or kappaH > 0");
  // p = 2*0.1*1/0.5 = 0.4
  EXPECT_EQ(constraint_of([] { MeanRevertingParams::heston(0.1, 1.0, std::sqrt(0.5)); }),
            "p = 2*gamma*theta/kappaH^2 > 1");
  // q = 1 + 0.2/0.5 = 1.4
  EXPECT_EQ(constraint_of([] { MeanRevertingParams::multiplicative(0.1, 1.0, std::sqrt(0.5)); }),
            "q = 1 + 2*gamma/kappaM^2 > 2");
}

TEST(Params, UncheckedSkipsValidation) {
  const auto mr = MeanRevertingParams::unchecked(0.1, 1.0, 0.0, 0.0);
  EXPECT_TRUE(mr.is_noise_free());
  EXPECT_THROW(mr.validate(), ConstraintViolation);
}

TEST(Params, Gb2RejectsLimitsOutsideFamily) {
  EXPECT_THROW(GB2Params(0.1, 1.0, 0.0, 0.1, 0.5), ConstraintViolation);
  EXPECT_THROW(GB2Params(0.1, 1.0, 0.1, 0.1, 0.0), ConstraintViolation);
  EXPECT_THROW(GB2Params(0.1, 1.0, 0.1, 0.1, 2.0).to_mean_reverting(), DomainError);
}

TEST(SteadyState, FamilyDispatch) {
  EXPECT_EQ(steady_state_of(MeanRevertingParams::heston(0.1, 1.0, 0.1)).family(), Family::Gamma);
  EXPECT_EQ(steady_state_of(MeanRevertingParams::multiplicative(0.1, 1.0, 0.1)).family(),
            Family::InverseGamma);
  EXPECT_EQ(steady_state_of(MeanRevertingParams(0.1, 1.0, 0.1, 0.1)).family(), Family::BetaPrime);
  EXPECT_EQ(steady_state_of(GB2Params(0.1, 1.0, 0.1, 0.1, 0.5)).family(), Family::GB2);
}

TEST(SteadyState, BetaPrimeReferenceValue) {
  // z^(p-1) (1+z)^(-p-q) / B(p,q) at z = 1, p = 2, q = 3: 2^-5 / (1/12) = 0.375.
  const auto d = SteadyStateDist::beta_prime(2.0, 3.0, 1.0);
  EXPECT_NEAR(d.pdf(1.0), 0.375, 1e-14);
}

TEST(SteadyState, GammaAndInverseGammaReferenceValues) {
  // Gamma(2, 1) at 1: e^-1. InverseGamma(3, 2) at 1: 2^3 e^-2 / Gamma(3).
  EXPECT_NEAR(SteadyStateDist::gamma(2.0, 1.0).pdf(1.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(SteadyStateDist::inverse_gamma(3.0, 2.0).pdf(1.0), 4.0 * std::exp(-2.0), 1e-14);
}

TEST(SteadyState, PdfRejectsNonPositive) {
  const auto d = SteadyStateDist::gamma(2.0, 1.0);
  EXPECT_THROW(d.pdf(0.0), DomainError);
  EXPECT_THROW(d.pdf(-1.0), DomainError);
  EXPECT_EQ(d.cdf(0.0), 0.0);
}

TEST(SteadyState, RandomSuite) {
  const auto r = svtest::steady_state_suite(10, 11);
  EXPECT_EQ(r.sets, 40u);
  EXPECT_LT(r.worst_norm, 1e-9);
  EXPECT_LT(r.worst_mean_quad, 1e-8);
  EXPECT_LT(r.worst_mean_exact, 1e-12);
  EXPECT_LT(r.worst_gb2_bp, 1e-12);
}

TEST(SteadyState, CdfMatchesQuadrature) {
  const auto d = steady_state_of(MeanRevertingParams(0.05, 1e-4, 0.1, 1e-3));
  for (double u : {0.3, 1.0, 2.5}) {
    const double v = 1e-4 * u;
    const double q = svtest::integrate([&](double x) { return x > 0 ? d.pdf(x) : 0.0; }, 0.0, v);
    EXPECT_NEAR(d.cdf(v), q, 1e-10);
  }
}

TEST(SteadyState, Gb2StationarityIdentity) {
  // Zero mean drift: <v> = theta <v^(1-alpha)>.
  const GB2Params gp(0.05, 2e-4, 0.2, 1e-3, 0.6);
  const auto d = steady_state_of(gp);
  const double lhs = d.moment(1.0).value();
  const double rhs = gp.theta() * d.moment(1.0 - gp.alpha()).value();
  EXPECT_NEAR(lhs / rhs, 1.0, 1e-10);
}

TEST(SteadyState, DivergentMomentsAreReported) {
  const auto d = SteadyStateDist::inverse_gamma(2.5, 1.0);
  EXPECT_TRUE(d.moment(2.0).exists());
  EXPECT_TRUE(d.moment(3.0).diverges());
  EXPECT_THROW(d.moment(3.0).value(), DivergentMoment);
}

TEST(SteadyState, DrawIsInverseCdf) {
  const auto d = steady_state_of(MeanRevertingParams(0.05, 1e-4, 0.1, 1e-3));
  // BetaPrime draws use two uniforms, check the one-dimensional branches.
  const auto g = SteadyStateDist::gamma(3.0, 2.0);
  const auto ig = SteadyStateDist::inverse_gamma(3.0, 2.0);
  for (double u : {0.01, 0.3, 0.5, 0.9}) {
    EXPECT_NEAR(g.cdf(g.draw(u, 0.5)), u, 1e-12);
    EXPECT_NEAR(ig.cdf(ig.draw(u, 0.5)), 1.0 - u, 1e-12);
  }
  EXPECT_GT(d.draw(0.5, 0.5), 0.0);
}

TEST(Analytic, VarianceMatchesQuadrature) {
  for (const auto& mr : {MeanRevertingParams::heston(0.05, 1e-4, 1e-3),
                         MeanRevertingParams::multiplicative(0.05, 1e-4, 0.1),
                         MeanRevertingParams(0.05, 1e-4, 0.1, 1e-3)}) {
    const auto d = steady_state_of(mr);
    const double th = mr.theta();
    const double m2 = svtest::integrate_log([&](double v) { return v * v * d.pdf(v); }, th);
    EXPECT_NEAR(analytic_var_v(mr).value() / (m2 - th * th), 1.0, 1e-8);
  }
}

TEST(Analytic, VarianceDivergesWhenKappaMTooLarge) {
  // 2 gamma = 0.1 < kappaM^2 = 0.16 with q = 1.625 is invalid, so use unchecked.
  const auto mr = MeanRevertingParams::unchecked(0.05, 1.0, 0.4, 0.0);
  EXPECT_TRUE(analytic_var_v(mr).diverges());
}

TEST(Analytic, LeverageAmplitudeMatchesQuadrature) {
  for (const auto& mr : {MeanRevertingParams::heston(0.05, 1e-4, 1e-3),
                         MeanRevertingParams::multiplicative(0.05, 1e-4, 0.1),
                         MeanRevertingParams(0.05, 1e-4, 0.1, 1e-3)}) {
    const auto d = steady_state_of(mr);
    const double th = mr.theta();
    const double q = svtest::integrate_log(
        [&](double v) { return std::sqrt(v) * mr.diffusion(v) * d.pdf(v); }, th);
    EXPECT_NEAR(leverage_amplitude(mr) / (q / (th * th)), 1.0, 1e-8);
  }
}

TEST(Analytic, LimitConsistency) {
  const double g = 0.05, th = 1e-4, kh = 1e-3, km = 0.1;
  const auto h = MeanRevertingParams::heston(g, th, kh);
  const auto m = MeanRevertingParams::multiplicative(g, th, km);
  for (double tau : {0.0, 1.0, 10.0, 100.0}) {
    EXPECT_DOUBLE_EQ(analytic_reduced_cov(h, tau), kh * kh / (2 * g * th) * std::exp(-g * tau));
    EXPECT_DOUBLE_EQ(analytic_reduced_cov(m, tau), km * km / (2 * g - km * km) * std::exp(-g * tau));
  }
  EXPECT_DOUBLE_EQ(analytic_leverage(h.with_rho(-0.5), 3.0), -0.5 * kh / th * std::exp(-g * 3.0));
  const double mm = 2 * g / (km * km);
  const double amp_m =
      km * std::sqrt(mm) * std::tgamma(mm - 0.5) / (std::sqrt(th) * std::tgamma(mm));
  EXPECT_NEAR(analytic_leverage(m.with_rho(-0.5), 3.0) / (-0.5 * amp_m * std::exp(-g * 3.0)), 1.0,
              1e-13);
}

TEST(Analytic, CombinedTendsToSingleNoiseLimits) {
  const double g = 0.05, th = 1e-4, kh = 1e-3, km = 0.1;
  const auto h = MeanRevertingParams::heston(g, th, kh);
  const auto near_h = MeanRevertingParams(g, th, 1e-6, kh);
  EXPECT_NEAR(leverage_amplitude(near_h) / leverage_amplitude(h), 1.0, 1e-8);
  const auto m = MeanRevertingParams::multiplicative(g, th, km);
  const auto near_m = MeanRevertingParams(g, th, km, 1e-8);
  EXPECT_NEAR(leverage_amplitude(near_m) / leverage_amplitude(m), 1.0, 1e-6);
}

TEST(Analytic, CorrelationBounds) {
  double prev = 2.0;
  for (double tau = 0.0; tau <= 200.0; tau += 0.5) {
    const double c = analytic_corr(0.05, tau);
    EXPECT_GT(c, 0.0);
    EXPECT_LE(c, 1.0);
    EXPECT_LT(c, prev);
    prev = c;
  }
  EXPECT_THROW(analytic_corr(0.05, -1.0), DomainError);
}
