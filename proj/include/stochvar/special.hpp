#pragma once

// Thin, log-space wrappers over Boost.Math plus the few recurrences the
// library needs that Boost does not expose with real-valued parameters.

#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "stochvar/error.hpp"

namespace stochvar::special {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;

inline double lgamma(double x) { return boost::math::lgamma(x); }

inline double log_beta(double a, double b) {
  return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
}

/// Gamma(a) / Gamma(a + delta), accurate for large a.
inline double gamma_ratio(double a, double delta) {
  return boost::math::tgamma_delta_ratio(a, delta);
}

inline double digamma(double x) { return boost::math::digamma(x); }
inline double trigamma(double x) { return boost::math::trigamma(x); }

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(a, x);
}

/// Regularized upper incomplete gamma Q(a, x).
inline double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(a, x);
}

inline double gamma_p_inv(double a, double u) { return boost::math::gamma_p_inv(a, u); }

/// Regularized incomplete beta I_x(a, b).
inline double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

/// log(1 + e^x) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

/// log Phi(-z) for z >= 0, accurate in the far tail where erfc underflows.
inline double log_normal_upper_tail(double z) {
  if (z < 30.0) return std::log(0.5 * std::erfc(z / kSqrt2));
  // Asymptotic Mills-ratio expansion; relative error < 1e-12 at z >= 30.
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z2 - std::log(z) - 0.5 * std::log(2.0 * kPi) + std::log(series);
}

/// Generalized Laguerre polynomial L_n^{(alpha)}(x) by the three-term recurrence,
/// real alpha > -1.
inline double laguerre(unsigned n, double alpha, double x) {
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 + alpha - x;
  for (unsigned k = 1; k < n; ++k) {
    const double next =
        ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / static_cast<double>(k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace stochvar::special
