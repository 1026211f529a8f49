#pragma once

// Fokker-Planck spectrum of the square-root (CIR) variance process
//   dx = -gamma (x - theta) dt + kappa sqrt(x) dW,
// its quantized eigenfunctions, overlap coefficients and cumulant relaxation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stochvar/error.hpp"
#include "stochvar/params.hpp"
#include "stochvar/special.hpp"

namespace stochvar {

/// Unit-mean square-root process dx = -gamma (x - 1) dt + kappa sqrt(x) dW,
/// kappa2 = kappa^2. kappa2 = 0 (deterministic relaxation) is allowed for
/// simulation; spectral quantities need kappa2 > 0.
struct HestonUnitParams {
  double gamma = 0.1;
  double kappa2 = 1e-4;

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
      throw ConstraintViolation("gamma > 0", "gamma = " + detail::fmt(gamma));
    if (!(kappa2 >= 0.0) || !std::isfinite(kappa2))
      throw ConstraintViolation("kappa2 >= 0", "kappa2 = " + detail::fmt(kappa2));
    if (kappa2 > 0.0 && !(2.0 * gamma / kappa2 > 1.0))
      throw ConstraintViolation("2 gamma / kappa2 > 1",
                                "2 gamma / kappa2 = " + detail::fmt(2.0 * gamma / kappa2));
  }

  /// As a Heston model with theta = 1 (no validation of the noise-free case).
  MeanRevertingParams to_params() const {
    return MeanRevertingParams::unchecked(gamma, 1.0, 0.0, std::sqrt(kappa2), 0.0);
  }
};

/// Square-root process with general mean theta.
struct CirParams {
  double gamma = 0.1;
  double theta = 1.0;
  double kappa2 = 1e-4;

  static CirParams from(const HestonUnitParams& u) { return {u.gamma, 1.0, u.kappa2}; }
  static CirParams from(const MeanRevertingParams& mr) {
    if (!mr.is_heston()) throw DomainError("CirParams: requires a Heston (kappaM = 0) model");
    return {mr.gamma(), mr.theta(), mr.kappa_h() * mr.kappa_h()};
  }

  double shape() const { return 2.0 * gamma * theta / kappa2; }  // a
  double scale() const { return kappa2 / (2.0 * gamma); }        // s, z = x / s

  /// The steady density vanishes at the origin only for a > 1; the
  /// eigenvalue quantization relies on it.
  void validate() const {
    if (!(gamma > 0.0) || !(theta > 0.0) || !(kappa2 > 0.0))
      throw ConstraintViolation("gamma, theta, kappa2 > 0", "square-root process parameters");
    if (!(shape() > 1.0))
      throw ConstraintViolation("2 gamma theta / kappa2 > 1",
                                "2 gamma theta / kappa2 = " + detail::fmt(shape()));
  }
};

struct EigenMode {
  unsigned n = 1;
  double lambda = 0.0;
  bool normalized = true;

  static EigenMode of(const CirParams& p, unsigned n, bool normalized = true) {
    if (n < 1) throw DomainError("EigenMode: n must be >= 1");
    return {n, n * p.gamma, normalized};
  }
};

/// Steady (Gamma) density P0(x).
inline double steady_density(const CirParams& p, double x) {
  if (!(x > 0.0)) throw DomainError("steady_density: x must be > 0");
  const double a = p.shape(), s = p.scale(), z = x / s;
  return std::exp((a - 1.0) * std::log(z) - z - special::lgamma(a) - std::log(s));
}

/// e^{-z} U(1 - a - n, 2 - a, z), z = 2 gamma x / kappa^2, evaluated through
/// U(1 - a - n, 2 - a, z) = z^{a-1} U(-n, a, z) = z^{a-1} (-1)^n n! L_n^{(a-1)}(z).
inline double eigenfunction_unnormalized(const CirParams& p, unsigned n, double x) {
  p.validate();
  if (n < 1) throw DomainError("eigenfunction: n must be >= 1");
  if (!(x > 0.0)) throw DomainError("eigenfunction: x must be > 0");
  const double a = p.shape(), z = x / p.scale();
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign * std::exp((a - 1.0) * std::log(z) - z + special::lgamma(n + 1.0)) *
         special::laguerre(n, a - 1.0, z);
}

/// Eigenfunction P_n normalized so that the integral of P_n^2 / P0 is 1 and the
/// sign matches the closed-form P1 (positive for x > theta):
///   P_n = P0 (-1)^n sqrt(n! Gamma(a) / Gamma(n + a)) L_n^{(a-1)}(z).
inline double eigenfunction(const CirParams& p, unsigned n, double x) {
  p.validate();
  if (n < 1) throw DomainError("eigenfunction: n must be >= 1");
  if (!(x > 0.0)) throw DomainError("eigenfunction: x must be > 0");
  const double a = p.shape(), z = x / p.scale();
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  const double log_c = 0.5 * (special::lgamma(n + 1.0) + special::lgamma(a) - special::lgamma(n + a));
  return sign * steady_density(p, x) * std::exp(log_c) * special::laguerre(n, a - 1.0, z);
}

inline double eigenfunction(const CirParams& p, const EigenMode& mode, double x) {
  return mode.normalized ? eigenfunction(p, mode.n, x) : eigenfunction_unnormalized(p, mode.n, x);
}

/// Closed-form normalized first eigenfunction
///   P1 = e^{-z} (x - theta) z^{1+a} / (x^2 sqrt(Gamma(1+a) Gamma(a))).
inline double eigenfunction_p1(const CirParams& p, double x) {
  p.validate();
  if (!(x > 0.0)) throw DomainError("eigenfunction_p1: x must be > 0");
  const double a = p.shape(), z = x / p.scale();
  const double log_mag = -z + (1.0 + a) * std::log(z) - 2.0 * std::log(x) -
                         0.5 * (special::lgamma(1.0 + a) + special::lgamma(a));
  return (x - p.theta) * std::exp(log_mag);
}

/// Overlap g_n = integral of x P_n: sqrt(theta kappa^2 / 2 gamma) for n = 1 and
/// exactly zero for n >= 2 (the 1/Gamma(2 - n) factor).
inline double g_coefficient(const CirParams& p, unsigned n) {
  if (n < 1) throw DomainError("g_coefficient: n must be >= 1");
  if (n >= 2) return 0.0;
  return std::sqrt(p.theta * p.kappa2 / (2.0 * p.gamma));
}

/// Normalized correlation from the mode sum
///   sum_n g_n^2 exp(-n gamma tau) / sum_n g_n^2 over n = 1..modes.
inline double mode_sum_corr(const CirParams& p, double tau, unsigned modes = 8) {
  double num = 0.0, den = 0.0;
  for (unsigned n = 1; n <= modes; ++n) {
    const double g2 = g_coefficient(p, n) * g_coefficient(p, n);
    num += g2 * std::exp(-static_cast<double>(n) * p.gamma * tau);
    den += g2;
  }
  return num / den;
}

/// Uniform grid of `points` on [lo, hi].
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) throw DomainError("uniform_grid: need points >= 2 and hi > lo");
  std::vector<double> g(points);
  const double h = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = lo + h * static_cast<double>(i);
  return g;
}

/// Grid covering the bulk of the steady density: theta +/- `width` standard
/// deviations, clipped to x > 0.
inline std::vector<double> default_grid(const CirParams& p, std::size_t points = 2001,
                                        double width = 10.0) {
  const double sd = std::sqrt(p.shape()) * p.scale();
  const double lo = std::max(p.theta - width * sd, 1e-3 * p.theta);
  return uniform_grid(lo, p.theta + width * sd, points);
}

/// Relative residual of (kappa^2/2)(x P)'' + gamma ((x - theta) P)' + lambda P = 0
/// on the interior of a uniform grid, by fourth-order central differences:
/// max |residual| / max (|diffusion term| + |drift term| + |lambda P|).
inline double ode_residual(const CirParams& p, double lambda, std::span<const double> grid,
                           const std::function<double(double)>& trial) {
  const std::size_t n = grid.size();
  if (n < 54) throw DomainError("ode_residual: grid too coarse (need >= 50 interior points)");
  const double h = grid[1] - grid[0];
  if (!(h > 0.0)) throw DomainError("ode_residual: grid must be increasing");
  for (std::size_t i = 2; i < n; ++i)
    if (std::abs((grid[i] - grid[i - 1]) - h) > 1e-9 * std::abs(h) + 1e-12 * std::abs(grid[i]))
      throw DomainError("ode_residual: grid must be uniform");
  std::vector<double> f(n), xf(n), df(n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = trial(grid[i]);
    xf[i] = grid[i] * f[i];
    df[i] = (grid[i] - p.theta) * f[i];
  }
  double max_res = 0.0, max_mag = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double d2 =
        (-xf[i - 2] + 16.0 * xf[i - 1] - 30.0 * xf[i] + 16.0 * xf[i + 1] - xf[i + 2]) / (12.0 * h * h);
    const double d1 = (df[i - 2] - 8.0 * df[i - 1] + 8.0 * df[i + 1] - df[i + 2]) / (12.0 * h);
    const double t1 = 0.5 * p.kappa2 * d2;
    const double t2 = p.gamma * d1;
    const double t3 = lambda * f[i];
    max_res = std::max(max_res, std::abs(t1 + t2 + t3));
    max_mag = std::max(max_mag, std::abs(t1) + std::abs(t2) + std::abs(t3));
  }
  if (!(max_mag > 0.0)) throw DomainError("ode_residual: trial function vanishes on the grid");
  return max_res / max_mag;
}

/// Residual of the quantized mode n (lambda = n gamma) or, with n = 0, of the
/// steady density with lambda = 0.
inline double ode_residual(const CirParams& p, double lambda, std::span<const double> grid,
                           unsigned n) {
  if (n == 0)
    return ode_residual(p, lambda, grid, [&](double x) { return steady_density(p, x); });
  return ode_residual(p, lambda, grid, [&](double x) { return eigenfunction(p, n, x); });
}

/// Closed-form cumulant kappa_n(t) (n = 1 is the mean) of the unit-mean
/// process started at x0 in {0, 1}:
///   x0 = 0: mean 1 - e^{-gamma t},  kappa_n = c_n e^{-n gamma t} (e^{gamma t} - 1)^n
///   x0 = 1: mean 1,                 kappa_n = c_n e^{-n gamma t} (e^{gamma t} - 1)^{n-1} (e^{gamma t} + n - 1)
/// with c_n = (kappa^2/gamma)^{n-1} (n-1)! / 2^{n-1}.
inline double theory_cumulant(unsigned n, double t, double x0, const HestonUnitParams& p) {
  if (n < 1) throw DomainError("theory_cumulant: order must be >= 1");
  if (!(t >= 0.0)) throw DomainError("theory_cumulant: t must be >= 0");
  if (x0 != 0.0 && x0 != 1.0) throw DomainError("theory_cumulant: x0 must be 0 or 1");
  const double e = std::exp(-p.gamma * t);  // e^{-gamma t}
  const double one_minus_e = -std::expm1(-p.gamma * t);
  if (n == 1) return x0 == 0.0 ? one_minus_e : 1.0;
  const double c = std::pow(p.kappa2 / p.gamma, n - 1.0) *
                   std::exp(special::lgamma(static_cast<double>(n))) / std::pow(2.0, n - 1.0);
  // e^{-n gamma t}(e^{gamma t} - 1)^k = (1 - e)^k e^{-(n-k) gamma t}
  if (x0 == 0.0) return c * std::pow(one_minus_e, static_cast<double>(n));
  return c * std::pow(one_minus_e, n - 1.0) * (1.0 + (n - 1.0) * e);
}

}  // namespace stochvar
