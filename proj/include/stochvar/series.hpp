#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stochvar/error.hpp"

namespace stochvar {

/// Detrended log returns at a fixed horizon.
///
/// `horizon` is the accumulation length t in days; `stride` is the number of
/// days between consecutive window starts (1 = rolling, horizon = disjoint).
struct ReturnSeries {
  std::vector<double> values;
  std::size_t horizon = 1;
  std::size_t stride = 1;
  std::string source;

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty(); }

  void check_finite() const {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!std::isfinite(values[i]))
        throw DomainError("ReturnSeries: non-finite value at index " + std::to_string(i));
  }
};

enum class EstimatorTag { DailyCorr, MultidayCorr, Ratio, ReducedCov };

inline std::string_view to_string(EstimatorTag tag) {
  switch (tag) {
    case EstimatorTag::DailyCorr: return "daily-corr";
    case EstimatorTag::MultidayCorr: return "multiday-corr";
    case EstimatorTag::Ratio: return "ratio";
    case EstimatorTag::ReducedCov: return "reduced-cov";
  }
  return "?";
}

/// Estimator values indexed by lag (days).
struct CorrSeries {
  std::vector<double> lags;
  std::vector<double> values;
  EstimatorTag tag = EstimatorTag::DailyCorr;
  std::size_t horizon = 1;
  std::size_t stride = 1;
  std::size_t samples = 0;
};

/// Leverage L(tau) for tau >= 1.
struct LeverageSeries {
  std::vector<double> lags;
  std::vector<double> values;
  std::size_t horizon = 1;
  std::size_t samples = 0;
};

enum class Accumulation { Rolling, Disjoint };

/// Sums of `t` consecutive daily returns. Rolling windows advance by one day,
/// disjoint windows by `t` days.
inline ReturnSeries accumulate_returns(const ReturnSeries& daily, std::size_t t,
                                       Accumulation mode = Accumulation::Rolling) {
  if (t < 1) throw DomainError("accumulate_returns: t must be >= 1");
  if (daily.horizon != 1 || daily.stride != 1)
    throw DomainError("accumulate_returns: input must be a daily series");
  const std::size_t n = daily.values.size();
  if (t > n)
    throw InsufficientData("accumulate_returns: window t = " + std::to_string(t) +
                           " exceeds series length " + std::to_string(n));
  ReturnSeries out;
  out.horizon = t;
  out.stride = mode == Accumulation::Rolling ? 1 : t;
  out.source = daily.source;
  const std::size_t count = mode == Accumulation::Rolling ? n - t + 1 : n / t;
  if (t == 1) {
    out.values = daily.values;
    return out;
  }
  out.values.reserve(count);
  // Extended-precision prefix sums keep window sums accurate without the
  // O(n t) cost of summing each window.
  std::vector<long double> prefix(n + 1, 0.0L);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + daily.values[i];
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t start = w * out.stride;
    out.values.push_back(static_cast<double>(prefix[start + t] - prefix[start]));
  }
  return out;
}

}  // namespace stochvar
