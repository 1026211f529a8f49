#pragma once

// Maximum-likelihood fits of six two-parameter families and the one-sample
// Kolmogorov-Smirnov statistic.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "stochvar/error.hpp"
#include "stochvar/special.hpp"

namespace stochvar {

enum class DistFamily { Normal, Lognormal, InverseGamma, Gamma, Weibull, InverseGaussian };

inline constexpr std::array<DistFamily, 6> kAllFamilies = {
    DistFamily::Normal, DistFamily::Lognormal, DistFamily::InverseGamma,
    DistFamily::Gamma,  DistFamily::Weibull,   DistFamily::InverseGaussian};

inline std::string_view to_string(DistFamily f) {
  switch (f) {
    case DistFamily::Normal: return "Normal";
    case DistFamily::Lognormal: return "Lognormal";
    case DistFamily::InverseGamma: return "InverseGamma";
    case DistFamily::Gamma: return "Gamma";
    case DistFamily::Weibull: return "Weibull";
    case DistFamily::InverseGaussian: return "InverseGaussian";
  }
  return "?";
}

inline std::string_view short_name(DistFamily f) {
  switch (f) {
    case DistFamily::Normal: return "N";
    case DistFamily::Lognormal: return "LN";
    case DistFamily::InverseGamma: return "IGa";
    case DistFamily::Gamma: return "Ga";
    case DistFamily::Weibull: return "Wbl";
    case DistFamily::InverseGaussian: return "IG";
  }
  return "?";
}

/// Parameter names in storage order:
///   Normal (mu, sigma), Lognormal (mu, sigma) of log x, InverseGamma (shape, scale),
///   Gamma (shape, scale), Weibull (scale, shape), InverseGaussian (mean, shape).
inline std::array<std::string_view, 2> param_names(DistFamily f) {
  switch (f) {
    case DistFamily::Normal:
    case DistFamily::Lognormal: return {"mu", "sigma"};
    case DistFamily::InverseGamma:
    case DistFamily::Gamma: return {"shape", "scale"};
    case DistFamily::Weibull: return {"scale", "shape"};
    case DistFamily::InverseGaussian: return {"mean", "shape"};
  }
  return {"?", "?"};
}

inline bool positive_support(DistFamily f) { return f != DistFamily::Normal; }

/// A fully specified member of one of the six families.
struct Distribution {
  DistFamily family = DistFamily::Normal;
  std::array<double, 2> params{};

  double cdf(double x) const {
    const double a = params[0], b = params[1];
    if (positive_support(family) && x <= 0.0) return 0.0;
    switch (family) {
      case DistFamily::Normal: return special::normal_cdf((x - a) / b);
      case DistFamily::Lognormal: return special::normal_cdf((std::log(x) - a) / b);
      case DistFamily::InverseGamma: return special::gamma_q(a, b / x);
      case DistFamily::Gamma: return special::gamma_p(a, x / b);
      case DistFamily::Weibull: return -std::expm1(-std::pow(x / a, b));
      case DistFamily::InverseGaussian: {
        const double r = std::sqrt(b / x);
        const double z1 = r * (x / a - 1.0);
        const double z2 = r * (x / a + 1.0);
        // exp(2 lambda/mu) Phi(-z2) in log space; the factors overflow separately.
        const double tail = std::exp(2.0 * b / a + special::log_normal_upper_tail(z2));
        return std::clamp(special::normal_cdf(z1) + tail, 0.0, 1.0);
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  double log_pdf(double x) const {
    const double a = params[0], b = params[1];
    constexpr double kHalfLog2Pi = 0.91893853320467274178;
    if (positive_support(family) && x <= 0.0) return -std::numeric_limits<double>::infinity();
    switch (family) {
      case DistFamily::Normal: {
        const double z = (x - a) / b;
        return -kHalfLog2Pi - std::log(b) - 0.5 * z * z;
      }
      case DistFamily::Lognormal: {
        const double z = (std::log(x) - a) / b;
        return -kHalfLog2Pi - std::log(b) - std::log(x) - 0.5 * z * z;
      }
      case DistFamily::InverseGamma:
        return a * std::log(b) - special::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
      case DistFamily::Gamma:
        return -special::lgamma(a) - a * std::log(b) + (a - 1.0) * std::log(x) - x / b;
      case DistFamily::Weibull:
        return std::log(b / a) + (b - 1.0) * std::log(x / a) - std::pow(x / a, b);
      case DistFamily::InverseGaussian:
        return 0.5 * (std::log(b) - std::log(2.0 * special::kPi) - 3.0 * std::log(x)) -
               b * (x - a) * (x - a) / (2.0 * a * a * x);
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  double mean() const {
    const double a = params[0], b = params[1];
    switch (family) {
      case DistFamily::Normal: return a;
      case DistFamily::Lognormal: return std::exp(a + 0.5 * b * b);
      case DistFamily::InverseGamma:
        return a > 1.0 ? b / (a - 1.0) : std::numeric_limits<double>::infinity();
      case DistFamily::Gamma: return a * b;
      case DistFamily::Weibull: return a * std::exp(special::lgamma(1.0 + 1.0 / b));
      case DistFamily::InverseGaussian: return a;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }
};

/// One-sample KS statistic sup_x |F_n(x) - F(x)|.
template <class Cdf>
double ks_stat(std::span<const double> samples, Cdf&& cdf) {
  if (samples.empty()) throw InsufficientData("ks_stat: empty sample");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

struct MleReport {
  DistFamily family = DistFamily::Normal;
  std::array<double, 2> params{};
  double ks = 1.0;
  double loglik = -std::numeric_limits<double>::infinity();
  std::size_t n = 0;

  Distribution distribution() const { return {family, params}; }
};

namespace detail {

struct SampleSummary {
  double mean = 0.0;
  double mean_log = 0.0;
};

/// Shape k solving ln k - digamma(k) = s (s > 0), safeguarded Newton.
inline double gamma_shape_mle(double s) {
  if (!(s > 0.0)) throw DomainError("gamma MLE: degenerate sample (log-mean gap is zero)");
  const double k0 = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  std::uintmax_t iters = 200;
  return boost::math::tools::newton_raphson_iterate(
      [s](double k) {
        return std::pair{std::log(k) - special::digamma(k) - s, 1.0 / k - special::trigamma(k)};
      },
      k0, 1e-10, 1e10, 52, iters);
}

/// Weibull shape k solving sum x^k ln x / sum x^k - 1/k - mean(ln x) = 0.
inline double weibull_shape_mle(std::span<const double> x) {
  // Work on x / max(x) so powers stay bounded.
  const double xmax = *std::max_element(x.begin(), x.end());
  std::vector<double> lx(x.size());
  double mlog = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i] / xmax);
    mlog += lx[i];
  }
  mlog /= static_cast<double>(x.size());
  auto eq = [&](double k) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double l : lx) {
      const double w = std::exp(k * l);
      s0 += w;
      s1 += w * l;
      s2 += w * l * l;
    }
    const double m1 = s1 / s0;
    return std::pair{m1 - 1.0 / k - mlog, s2 / s0 - m1 * m1 + 1.0 / (k * k)};
  };
  std::uintmax_t iters = 200;
  return boost::math::tools::newton_raphson_iterate(eq, 1.0, 1e-4, 1e4, 52, iters);
}

}  // namespace detail

/// Maximum-likelihood fit of `family` to `samples` plus the KS statistic of
/// the fitted CDF. Requires n >= 10 and, for positive-support families,
/// strictly positive samples.
inline MleReport mle_fit(std::span<const double> samples, DistFamily family) {
  const std::size_t n = samples.size();
  if (n < 10) throw InsufficientData("mle_fit: need at least 10 samples, got " + std::to_string(n));
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) throw DomainError("mle_fit: degenerate sample (all values equal)");
  for (double x : samples) {
    if (!std::isfinite(x)) throw DomainError("mle_fit: non-finite sample");
    if (positive_support(family) && !(x > 0.0))
      throw DomainError("mle_fit: " + std::string(to_string(family)) +
                        " requires strictly positive samples");
  }
  const double dn = static_cast<double>(n);
  auto mean_sd = [&](auto transform) {
    double m = 0.0;
    for (double x : samples) m += transform(x);
    m /= dn;
    double v = 0.0;
    for (double x : samples) v += (transform(x) - m) * (transform(x) - m);
    return std::array<double, 2>{m, std::sqrt(v / dn)};
  };

  MleReport rep;
  rep.family = family;
  rep.n = n;
  switch (family) {
    case DistFamily::Normal:
      rep.params = mean_sd([](double x) { return x; });
      break;
    case DistFamily::Lognormal:
      rep.params = mean_sd([](double x) { return std::log(x); });
      break;
    case DistFamily::Gamma:
    case DistFamily::InverseGamma: {
      // Inverse gamma: gamma fit to reciprocals, scale inverted.
      const bool inv = family == DistFamily::InverseGamma;
      double m = 0.0, ml = 0.0;
      for (double x : samples) {
        const double y = inv ? 1.0 / x : x;
        m += y;
        ml += std::log(y);
      }
      m /= dn;
      ml /= dn;
      const double k = detail::gamma_shape_mle(std::log(m) - ml);
      const double scale = m / k;
      rep.params = {k, inv ? 1.0 / scale : scale};
      break;
    }
    case DistFamily::Weibull: {
      const double k = detail::weibull_shape_mle(samples);
      const double xmax = *hi;
      double s = 0.0;
      for (double x : samples) s += std::pow(x / xmax, k);
      rep.params = {xmax * std::pow(s / dn, 1.0 / k), k};
      break;
    }
    case DistFamily::InverseGaussian: {
      double m = 0.0;
      for (double x : samples) m += x;
      m /= dn;
      double s = 0.0;
      for (double x : samples) s += 1.0 / x - 1.0 / m;
      if (!(s > 0.0)) throw DomainError("mle_fit: degenerate sample for InverseGaussian");
      rep.params = {m, dn / s};
      break;
    }
  }
  const Distribution dist = rep.distribution();
  rep.loglik = 0.0;
  for (double x : samples) rep.loglik += dist.log_pdf(x);
  rep.ks = ks_stat(samples, [&](double x) { return dist.cdf(x); });
  return rep;
}

/// Fits all six families; reports ordered as kAllFamilies.
inline std::vector<MleReport> mle_fit_all(std::span<const double> samples) {
  std::vector<MleReport> out;
  for (DistFamily f : kAllFamilies) out.push_back(mle_fit(samples, f));
  return out;
}

/// Indices of `reports` sorted by increasing KS.
inline std::vector<std::size_t> ks_ranking(const std::vector<MleReport>& reports) {
  std::vector<std::size_t> idx(reports.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return reports[a].ks < reports[b].ks; });
  return idx;
}

}  // namespace stochvar
