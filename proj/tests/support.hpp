#pragma once

// Shared test oracles: adaptive quadrature on (0, inf) and small statistics.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace svtest {

/// Integral of f over (0, inf), split at `pivot` into a tanh-sinh piece on
/// (0, pivot) and an exp-sinh tail.
inline double integrate_positive(const std::function<double(double)>& f, double pivot,
                                 double tol = 1e-13) {
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double head = ts.integrate(f, 0.0, pivot, tol);
  const double tail = es.integrate([&](double x) { return f(x + pivot); }, 0.0,
                                   std::numeric_limits<double>::infinity(), tol);
  return head + tail;
}

/// Integral of f over (0, inf) in the log variable v = center * e^t, which
/// keeps narrow peaks near `center` and power-law tails well resolved.
inline double integrate_log(const std::function<double(double)>& f, double center,
                            double tol = 1e-14) {
  boost::math::quadrature::sinh_sinh<double> ss;
  return ss.integrate(
      [&](double t) {
        const double v = center * std::exp(t);
        if (!(v > 0.0) || !std::isfinite(v)) return 0.0;
        return f(v) * v;
      },
      tol);
}

/// Integral of f over [a, b] by tanh-sinh.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, a, b, tol);
}

inline double median(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace svtest
