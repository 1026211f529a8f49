#pragma once

// Empirical estimators over (simulated or historic) return series. All
// expectations are plain sample means; no bias corrections.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stochvar/error.hpp"
#include "stochvar/series.hpp"

namespace stochvar {

namespace detail {

inline double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Mean over i in [0, n-k) of a[i] * b[i+k].
inline double lagged_cross_mean(std::span<const double> a, std::span<const double> b,
                                std::size_t k) {
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t i = 0; i + k < n; ++i) s += a[i] * b[i + k];
  return s / static_cast<double>(n - k);
}

inline std::vector<double> squares(std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * x[i];
  return out;
}

inline void require_lags(const ReturnSeries& r, std::size_t max_index, const char* who) {
  if (r.size() < max_index + 2)
    throw InsufficientData(std::string(who) + ": series of length " + std::to_string(r.size()) +
                           " too short for lag index " + std::to_string(max_index));
}

}  // namespace detail

/// Log-differences of strictly positive prices minus their full-sample mean.
inline ReturnSeries detrend(std::span<const double> prices, std::string source = {}) {
  if (prices.size() < 2) throw InsufficientData("detrend: need at least 2 prices");
  for (std::size_t i = 0; i < prices.size(); ++i)
    if (!(prices[i] > 0.0) || !std::isfinite(prices[i]))
      throw DomainError("detrend: price at index " + std::to_string(i) +
                        " is not strictly positive");
  ReturnSeries r;
  r.source = std::move(source);
  r.values.resize(prices.size() - 1);
  for (std::size_t i = 0; i + 1 < prices.size(); ++i)
    r.values[i] = std::log(prices[i + 1]) - std::log(prices[i]);
  const double m = detail::mean_of(r.values);
  for (double& x : r.values) x -= m;
  return r;
}

/// Mean variance per day: <dx_t^2> / t.
inline double theta_hat(const ReturnSeries& r) {
  if (r.empty()) throw InsufficientData("theta_hat: empty series");
  double s = 0.0;
  for (double x : r.values) s += x * x;
  return s / static_cast<double>(r.size()) / static_cast<double>(r.horizon);
}

/// Daily-return variance correlation
///   (<dx_t^2 dx_{t+tau}^2> - <dx^2>^2) / (<dx^4>/3 - <dx^2>^2),  tau = 1..tau_max.
inline CorrSeries daily_var_corr(const ReturnSeries& r, std::size_t tau_max) {
  if (r.horizon != 1 || r.stride != 1)
    throw DomainError("daily_var_corr: requires a daily (horizon 1) series");
  if (tau_max < 1) throw DomainError("daily_var_corr: tau_max must be >= 1");
  detail::require_lags(r, tau_max, "daily_var_corr");
  const std::vector<double> sq = detail::squares(r.values);
  const double m2 = detail::mean_of(sq);
  const double m4 = detail::lagged_cross_mean(sq, sq, 0);
  const double denom = m4 / 3.0 - m2 * m2;
  if (!(denom > 0.0))
    throw InsufficientData("daily_var_corr: degenerate sample, <dx^4>/3 - <dx^2>^2 = " +
                           std::to_string(denom));
  CorrSeries out;
  out.tag = EstimatorTag::DailyCorr;
  out.samples = r.size();
  for (std::size_t tau = 1; tau <= tau_max; ++tau) {
    out.lags.push_back(static_cast<double>(tau));
    out.values.push_back((detail::lagged_cross_mean(sq, sq, tau) - m2 * m2) / denom);
  }
  return out;
}

/// Multi-day realized-variance correlation over accumulated returns,
///   (<dx_t^2 dx_{t+tau}^2> - <dx_t^2>^2) / (<dx_t^4> - <dx_t^2>^2),
/// for tau = 0, stride, 2*stride, ... <= tau_max (days between window starts).
inline CorrSeries multiday_var_corr(const ReturnSeries& accumulated, std::size_t tau_max) {
  if (accumulated.horizon < 1) throw DomainError("multiday_var_corr: horizon must be >= 1");
  const std::size_t stride = accumulated.stride;
  const std::size_t kmax = tau_max / stride;
  detail::require_lags(accumulated, kmax, "multiday_var_corr");
  const std::vector<double> sq = detail::squares(accumulated.values);
  const double m2 = detail::mean_of(sq);
  const double m4 = detail::lagged_cross_mean(sq, sq, 0);
  const double denom = m4 - m2 * m2;
  if (!(denom > 0.0)) throw InsufficientData("multiday_var_corr: degenerate sample");
  CorrSeries out;
  out.tag = EstimatorTag::MultidayCorr;
  out.horizon = accumulated.horizon;
  out.stride = stride;
  out.samples = accumulated.size();
  for (std::size_t k = 0; k <= kmax; ++k) {
    out.lags.push_back(static_cast<double>(k * stride));
    out.values.push_back(k == 0 ? 1.0
                                : (detail::lagged_cross_mean(sq, sq, k) - m2 * m2) / denom);
  }
  return out;
}

/// <dx_t^2 dx_{t+tau}^2> / <dx_t^4> over t-day accumulated returns.
inline double moment_ratio(const ReturnSeries& daily, std::size_t t, std::size_t tau,
                           Accumulation mode = Accumulation::Rolling) {
  if (t < 1 || tau < 1) throw DomainError("moment_ratio: t and tau must be >= 1");
  const ReturnSeries acc = accumulate_returns(daily, t, mode);
  if (tau % acc.stride != 0)
    throw DomainError("moment_ratio: tau must be a multiple of the window stride");
  const std::size_t k = tau / acc.stride;
  detail::require_lags(acc, k, "moment_ratio");
  const std::vector<double> sq = detail::squares(acc.values);
  const double m4 = detail::lagged_cross_mean(sq, sq, 0);
  if (!(m4 > 0.0)) throw InsufficientData("moment_ratio: <dx_t^4> = 0");
  return detail::lagged_cross_mean(sq, sq, k) / m4;
}

/// Reduced covariance of stochastic variance from daily squared returns,
///   (<dx_t^2 dx_{t+tau}^2> - theta^2) / theta^2,  tau = 1..tau_max,
/// using <dx_t^2 dx_{t+tau}^2> = <v_t v_{t+tau}> for daily returns at tau >= 1.
inline CorrSeries reduced_cov_series(const ReturnSeries& r, std::size_t tau_max) {
  if (r.horizon != 1 || r.stride != 1)
    throw DomainError("reduced_cov_series: requires a daily series");
  if (tau_max < 1) throw DomainError("reduced_cov_series: tau_max must be >= 1");
  detail::require_lags(r, tau_max, "reduced_cov_series");
  const std::vector<double> sq = detail::squares(r.values);
  const double th = detail::mean_of(sq);
  if (!(th > 0.0)) throw InsufficientData("reduced_cov_series: <dx^2> = 0");
  CorrSeries out;
  out.tag = EstimatorTag::ReducedCov;
  out.samples = r.size();
  for (std::size_t tau = 1; tau <= tau_max; ++tau) {
    out.lags.push_back(static_cast<double>(tau));
    out.values.push_back((detail::lagged_cross_mean(sq, sq, tau) - th * th) / (th * th));
  }
  return out;
}

/// Leverage L(tau) = <dx_{t+tau}^2 dx_t> / <dx_t^2>^2, tau = 1..tau_max.
inline LeverageSeries leverage_series(const ReturnSeries& r, std::size_t tau_max) {
  if (tau_max < 1) throw DomainError("leverage_series: tau_max must be >= 1");
  if (r.stride != 1) throw DomainError("leverage_series: requires a stride-1 series");
  detail::require_lags(r, tau_max, "leverage_series");
  const std::vector<double> sq = detail::squares(r.values);
  const double m2 = detail::mean_of(sq);
  if (!(m2 > 0.0)) throw InsufficientData("leverage_series: <dx^2> = 0");
  LeverageSeries out;
  out.horizon = r.horizon;
  out.samples = r.size();
  for (std::size_t tau = 1; tau <= tau_max; ++tau) {
    out.lags.push_back(static_cast<double>(tau));
    out.values.push_back(detail::lagged_cross_mean(r.values, sq, tau) / (m2 * m2));
  }
  return out;
}

}  // namespace stochvar
