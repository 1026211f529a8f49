#pragma once

// Parameter calibration from daily returns and the multi-day gamma_1 profile.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stochvar/analytic.hpp"
#include "stochvar/error.hpp"
#include "stochvar/estimators.hpp"
#include "stochvar/fit.hpp"
#include "stochvar/params.hpp"
#include "stochvar/series.hpp"

namespace stochvar {

struct CalibrationOptions {
  std::size_t tau_max = 100;           // lags 1..tau_max for correlation and covariance fits
  std::size_t leverage_tau_max = 100;  // lags 1..leverage_tau_max for the leverage fit
};

struct CalibrationDiagnostics {
  std::optional<ExpFit> corr_fit;      // a exp(-gamma tau) on the daily variance correlation
  std::optional<ExpFit> cov_fit;       // A exp(-gamma tau), gamma fixed, on the reduced covariance
  std::optional<ExpFit> leverage_fit;  // a exp(-gammaL tau) on the leverage series
  bool leverage_rate_fixed = false;    // free leverage fit failed; gammaL held at gamma
  double leverage_amplitude_m = std::numeric_limits<double>::quiet_NaN();
  double leverage_amplitude_h = std::numeric_limits<double>::quiet_NaN();
  std::size_t samples = 0;
  std::string source;
  std::vector<std::string> failures;
  std::vector<std::string> constraint_flags;
};

/// Parameters recovered under the multiplicative (M) and Heston (H) readings
/// of the same correlation, covariance and leverage fits.
struct CalibrationReport {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  double gamma = kNaN;
  double theta = kNaN;
  double kappaM = kNaN;
  double kappaH = kNaN;
  double rhoM = kNaN;
  double rhoH = kNaN;
  double gammaL = kNaN;
  double A = kNaN;
  CalibrationDiagnostics diagnostics;

  bool ok() const noexcept { return diagnostics.failures.empty(); }
};

/// gamma from the daily correlation, theta from mean squared returns, A from
/// the reduced covariance at fixed gamma, kappa by inverting
///   A = kappaM^2 / (2 gamma - kappaM^2)   (multiplicative)
///   A = kappaH^2 / (2 gamma theta)        (Heston),
/// and rho, gammaL from a exp(-gammaL tau) fitted to the leverage with
/// rho = a / leverage_amplitude. Sub-fit failures leave NaN fields and a
/// failure entry instead of throwing.
inline CalibrationReport calibrate(const ReturnSeries& daily, const CalibrationOptions& opt = {}) {
  if (daily.horizon != 1 || daily.stride != 1)
    throw DomainError("calibrate: requires a daily return series");
  daily.check_finite();
  const std::size_t need = std::max(opt.tau_max, opt.leverage_tau_max) + 2;
  if (daily.size() < need)
    throw InsufficientData("calibrate: " + std::to_string(daily.size()) + " returns, need at least " +
                           std::to_string(need));
  CalibrationReport rep;
  auto& d = rep.diagnostics;
  d.samples = daily.size();
  d.source = daily.source;

  try {
    const CorrSeries corr = daily_var_corr(daily, opt.tau_max);
    d.corr_fit = fit_exp(corr);
    rep.gamma = d.corr_fit->gamma;
  } catch (const Error& e) {
    d.failures.push_back(std::string("gamma: ") + e.what());
  }

  rep.theta = theta_hat(daily);

  if (std::isfinite(rep.gamma)) {
    try {
      const CorrSeries cov = reduced_cov_series(daily, opt.tau_max);
      d.cov_fit = fit_exp_fixed_rate(cov.lags, cov.values, rep.gamma);
      rep.A = d.cov_fit->a;
    } catch (const Error& e) {
      d.failures.push_back(std::string("amplitude: ") + e.what());
    }
  }

  if (std::isfinite(rep.A)) {
    if (rep.A > 0.0) {
      rep.kappaM = std::sqrt(2.0 * rep.gamma * rep.A / (1.0 + rep.A));
      rep.kappaH = std::sqrt(2.0 * rep.gamma * rep.theta * rep.A);
      // Heston p = 2 gamma theta / kappaH^2 = 1/A; multiplicative q = 2 + 1/A.
      const double p = 1.0 / rep.A;
      const double q = 2.0 + 1.0 / rep.A;
      if (!(p > 1.0)) d.constraint_flags.push_back("p > 1 (Heston): p = " + detail::fmt(p));
      if (!(q > 2.0))
        d.constraint_flags.push_back("q > 2 (multiplicative): q = " + detail::fmt(q));
    } else {
      d.failures.push_back("amplitude: fitted A = " + detail::fmt(rep.A) +
                           " is not positive; kappa undefined");
    }
  }

  if (std::isfinite(rep.kappaM) && std::isfinite(rep.kappaH)) {
    try {
      d.leverage_amplitude_m = leverage_amplitude(
          MeanRevertingParams::unchecked(rep.gamma, rep.theta, rep.kappaM, 0.0, 0.0));
      d.leverage_amplitude_h = leverage_amplitude(
          MeanRevertingParams::unchecked(rep.gamma, rep.theta, 0.0, rep.kappaH, 0.0));
      const LeverageSeries lev = leverage_series(daily, opt.leverage_tau_max);
      try {
        d.leverage_fit = fit_exp(lev.lags, lev.values);
        rep.gammaL = d.leverage_fit->gamma;
      } catch (const FitFailure&) {
        // No resolvable decay (e.g. leverage at noise level): amplitude at fixed gamma.
        d.leverage_fit = fit_exp_fixed_rate(lev.lags, lev.values, rep.gamma);
        d.leverage_rate_fixed = true;
        d.failures.push_back("leverage: free rate fit failed; gammaL unavailable, rho from fixed-gamma amplitude");
      }
      rep.rhoM = d.leverage_fit->a / d.leverage_amplitude_m;
      rep.rhoH = d.leverage_fit->a / d.leverage_amplitude_h;
    } catch (const Error& e) {
      d.failures.push_back(std::string("leverage: ") + e.what());
    }
  }
  return rep;
}

struct Gamma1Row {
  std::size_t t = 0;
  std::optional<ExpFit> fit;
  std::string error;
};

struct Gamma1Profile {
  std::vector<Gamma1Row> rows;
  std::optional<ExpOffsetFit> offset_fit;
  std::string offset_error;
  double offset_t_min = 21.0;
};

/// For each accumulation length t: multi-day realized-variance correlation for
/// lags 0..tau_max, fitted with a exp(-gamma1 tau). Then gamma1(t) for
/// t >= offset_t_min is fitted with a + (b - a) exp(-lambda t). Per-t failures
/// are recorded, not thrown.
inline Gamma1Profile gamma1_profile(const ReturnSeries& daily, const std::vector<std::size_t>& t_grid,
                                    std::size_t tau_max, Accumulation mode = Accumulation::Rolling,
                                    double offset_t_min = 21.0) {
  if (t_grid.empty()) throw DomainError("gamma1_profile: empty t grid");
  for (std::size_t t : t_grid)
    if (t < 1 || t > daily.size())
      throw InsufficientData("gamma1_profile: t = " + std::to_string(t) +
                             " outside the data length " + std::to_string(daily.size()));
  Gamma1Profile prof;
  prof.offset_t_min = offset_t_min;
  std::vector<double> ts, gs;
  for (std::size_t t : t_grid) {
    Gamma1Row row;
    row.t = t;
    try {
      const ReturnSeries acc = accumulate_returns(daily, t, mode);
      const CorrSeries corr = multiday_var_corr(acc, tau_max);
      row.fit = fit_exp(corr);
      if (static_cast<double>(t) >= offset_t_min) {
        ts.push_back(static_cast<double>(t));
        gs.push_back(row.fit->gamma);
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    prof.rows.push_back(std::move(row));
  }
  try {
    prof.offset_fit = fit_exp_offset(ts, gs);
  } catch (const Error& e) {
    prof.offset_error = e.what();
  }
  return prof;
}

}  // namespace stochvar
