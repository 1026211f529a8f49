#pragma once

// Curve fits: damped least squares (Levenberg-Marquardt) for the exponential
// models, linear least squares for the quadratic moment-ratio basis.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stochvar/error.hpp"
#include "stochvar/series.hpp"

namespace stochvar {

struct LmOptions {
  double rel_tol = 1e-10;  // relative parameter change at convergence
  unsigned max_iter = 500;
  double initial_damping = 1e-3;
};

struct LmResult {
  Eigen::VectorXd params;
  unsigned iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // SSE after each accepted step, first entry = initial SSE
};

/// A least-squares model: value(x, p) and its gradient with respect to p.
template <class M>
concept LsqModel = requires(const M& m, double x, const Eigen::VectorXd& p, Eigen::VectorXd& g) {
  { m.value(x, p) } -> std::convertible_to<double>;
  m.gradient(x, p, g);
};

namespace detail {
template <LsqModel Model>
double sse(const Model& m, std::span<const double> x, std::span<const double> y,
           const Eigen::VectorXd& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - m.value(x[i], p);
    s += r * r;
  }
  return s;
}
}  // namespace detail

/// Minimizes sum (y_i - f(x_i; p))^2 from p0. Marquardt scaling of the
/// damping term; converges when max_i |dp_i| / (|p_i| + tol) < tol, or when no
/// damped step can reduce the residual any further.
template <LsqModel Model>
LmResult levenberg_marquardt(const Model& model, std::span<const double> x,
                             std::span<const double> y, Eigen::VectorXd p0,
                             const LmOptions& opt = {}) {
  const Eigen::Index np = p0.size();
  LmResult res;
  res.params = std::move(p0);
  double cur = detail::sse(model, x, y, res.params);
  res.trace.push_back(cur);
  double lambda = opt.initial_damping;
  Eigen::VectorXd g(np);
  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    Eigen::MatrixXd jtj = Eigen::MatrixXd::Zero(np, np);
    Eigen::VectorXd jtr = Eigen::VectorXd::Zero(np);
    for (std::size_t i = 0; i < x.size(); ++i) {
      model.gradient(x[i], res.params, g);
      const double r = y[i] - model.value(x[i], res.params);
      jtj.noalias() += g * g.transpose();
      jtr.noalias() += g * r;
    }
    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index k = 0; k < np; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-300);
      const Eigen::VectorXd step = a.ldlt().solve(jtr);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd trial = res.params + step;
      const double s = detail::sse(model, x, y, trial);
      if (std::isfinite(s) && s <= cur) {
        double rel = 0.0;
        for (Eigen::Index k = 0; k < np; ++k)
          rel = std::max(rel, std::abs(step(k)) / (std::abs(trial(k)) + opt.rel_tol));
        res.params = trial;
        cur = s;
        res.trace.push_back(cur);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (rel < opt.rel_tol || cur == 0.0) {
          res.converged = true;
          ++res.iterations;
          return res;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No descent direction left at any damping: a (numerical) minimum.
      res.converged = true;
      return res;
    }
  }
  return res;
}

inline double r_squared(std::span<const double> y, std::span<const double> fitted) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - fitted[i]) * (y[i] - fitted[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

/// a * exp(-gamma * tau)
struct ExpFit {
  double a = 0.0;
  double gamma = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
  unsigned iterations = 0;

  double operator()(double tau) const { return a * std::exp(-gamma * tau); }
};

/// a + (b - a) * exp(-lambda * t)
struct ExpOffsetFit {
  double a = 0.0;
  double b = 0.0;
  double lambda = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;

  double operator()(double t) const { return a + (b - a) * std::exp(-lambda * t); }
};

/// a - b*(tau/t) + c*(tau/t)^2
struct RatioQuadraticFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

struct ExpModel {
  double value(double x, const Eigen::VectorXd& p) const { return p(0) * std::exp(-p(1) * x); }
  void gradient(double x, const Eigen::VectorXd& p, Eigen::VectorXd& g) const {
    const double e = std::exp(-p(1) * x);
    g(0) = e;
    g(1) = -p(0) * x * e;
  }
};

struct ExpOffsetModel {
  double value(double x, const Eigen::VectorXd& p) const {
    return p(0) + (p(1) - p(0)) * std::exp(-p(2) * x);
  }
  void gradient(double x, const Eigen::VectorXd& p, Eigen::VectorXd& g) const {
    const double e = std::exp(-p(2) * x);
    g(0) = 1.0 - e;
    g(1) = e;
    g(2) = -(p(1) - p(0)) * x * e;
  }
};

namespace detail {

struct Window {
  std::vector<double> x;
  std::vector<double> y;
};

inline Window select_range(std::span<const double> x, std::span<const double> y, double lo,
                           double hi) {
  if (x.size() != y.size()) throw DomainError("fit: x and y lengths differ");
  Window w;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= lo && x[i] <= hi && std::isfinite(y[i])) {
      w.x.push_back(x[i]);
      w.y.push_back(y[i]);
    }
  return w;
}

/// Slope and intercept of ordinary least squares y ~ x.
inline std::pair<double, double> line_fit(const std::vector<double>& x,
                                          const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double d = n * sxx - sx * sx;
  if (d == 0.0) return {0.0, sy / n};
  const double slope = (n * sxy - sx * sy) / d;
  return {slope, (sy - slope * sx) / n};
}

}  // namespace detail

/// Least-squares fit of a*exp(-gamma*tau) over lags in [lag_lo, lag_hi].
/// Initialized by a log-linear regression on the points sharing the dominant
/// sign; throws FitFailure (with the SSE trace) on non-convergence or a
/// non-positive rate.
inline ExpFit fit_exp(std::span<const double> lags, std::span<const double> values,
                      double lag_lo = -std::numeric_limits<double>::infinity(),
                      double lag_hi = std::numeric_limits<double>::infinity(),
                      const LmOptions& opt = {}) {
  const detail::Window w = detail::select_range(lags, values, lag_lo, lag_hi);
  if (w.x.size() < 3) throw FitFailure("fit_exp: need at least 3 points in the lag range");
  double positive = 0.0, negative = 0.0;
  for (double v : w.y) (v > 0.0 ? positive : negative) += std::abs(v);
  const double sign = positive >= negative ? 1.0 : -1.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < w.x.size(); ++i)
    if (sign * w.y[i] > 0.0) {
      lx.push_back(w.x[i]);
      ly.push_back(std::log(sign * w.y[i]));
    }
  const double span_x = w.x.back() - w.x.front();
  double a0 = w.y.front(), g0 = span_x > 0.0 ? 1.0 / span_x : 1.0;
  if (lx.size() >= 2) {
    const auto [slope, icpt] = detail::line_fit(lx, ly);
    if (slope < 0.0) {
      g0 = -slope;
      a0 = sign * std::exp(icpt);
    } else {
      a0 = sign * std::exp(icpt + slope * lx.front());
    }
  }
  Eigen::VectorXd p0(2);
  p0 << a0, g0;
  const LmResult lm = levenberg_marquardt(ExpModel{}, w.x, w.y, p0, opt);
  if (!lm.converged) throw FitFailure("fit_exp: did not converge", lm.trace);
  if (!(lm.params(1) > 0.0) || !lm.params.allFinite())
    throw FitFailure("fit_exp: fitted rate is not positive (gamma = " +
                         std::to_string(lm.params(1)) + ")",
                     lm.trace);
  ExpFit f;
  f.a = lm.params(0);
  f.gamma = lm.params(1);
  f.points = w.x.size();
  f.iterations = lm.iterations;
  std::vector<double> fitted(w.x.size());
  for (std::size_t i = 0; i < w.x.size(); ++i) fitted[i] = f(w.x[i]);
  f.r2 = r_squared(w.y, fitted);
  return f;
}

inline ExpFit fit_exp(const CorrSeries& s,
                      double lag_lo = -std::numeric_limits<double>::infinity(),
                      double lag_hi = std::numeric_limits<double>::infinity()) {
  return fit_exp(s.lags, s.values, lag_lo, lag_hi);
}

/// Amplitude-only fit of A*exp(-gamma*tau) with gamma held fixed (closed form).
inline ExpFit fit_exp_fixed_rate(std::span<const double> lags, std::span<const double> values,
                                 double gamma,
                                 double lag_lo = -std::numeric_limits<double>::infinity(),
                                 double lag_hi = std::numeric_limits<double>::infinity()) {
  const detail::Window w = detail::select_range(lags, values, lag_lo, lag_hi);
  if (w.x.empty()) throw FitFailure("fit_exp_fixed_rate: no points in the lag range");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < w.x.size(); ++i) {
    const double e = std::exp(-gamma * w.x[i]);
    num += w.y[i] * e;
    den += e * e;
  }
  if (!(den > 0.0)) throw FitFailure("fit_exp_fixed_rate: basis vanishes on the lag range");
  ExpFit f;
  f.a = num / den;
  f.gamma = gamma;
  f.points = w.x.size();
  std::vector<double> fitted(w.x.size());
  for (std::size_t i = 0; i < w.x.size(); ++i) fitted[i] = f(w.x[i]);
  f.r2 = r_squared(w.y, fitted);
  return f;
}

/// a + (b - a) exp(-lambda t) over t in [t_lo, t_hi].
inline ExpOffsetFit fit_exp_offset(std::span<const double> t, std::span<const double> y,
                                   double t_lo = -std::numeric_limits<double>::infinity(),
                                   double t_hi = std::numeric_limits<double>::infinity(),
                                   const LmOptions& opt = {}) {
  const detail::Window w = detail::select_range(t, y, t_lo, t_hi);
  if (w.x.size() < 4) throw FitFailure("fit_exp_offset: need at least 4 points");
  // Asymptote guess slightly beyond the tail, rate from log|y - a0|.
  const std::size_t n = w.y.size();
  const double tail = w.y[n - 1];
  const double head = w.y.front();
  const double a0 = tail - 0.05 * (head - tail);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (w.y[i] - a0) * (head >= tail ? 1.0 : -1.0);
    if (d > 0.0) {
      lx.push_back(w.x[i]);
      ly.push_back(std::log(d));
    }
  }
  double lam0 = 1.0 / std::max(w.x.back() - w.x.front(), 1e-12);
  double b0 = head;
  if (lx.size() >= 2) {
    const auto [slope, icpt] = detail::line_fit(lx, ly);
    if (slope < 0.0) {
      lam0 = -slope;
      b0 = a0 + (head >= tail ? 1.0 : -1.0) * std::exp(icpt);
    }
  }
  Eigen::VectorXd p0(3);
  p0 << a0, b0, lam0;
  const LmResult lm = levenberg_marquardt(ExpOffsetModel{}, w.x, w.y, p0, opt);
  if (!lm.converged || !lm.params.allFinite())
    throw FitFailure("fit_exp_offset: did not converge", lm.trace);
  if (!(lm.params(2) > 0.0))
    throw FitFailure("fit_exp_offset: fitted rate is not positive", lm.trace);
  ExpOffsetFit f;
  f.a = lm.params(0);
  f.b = lm.params(1);
  f.lambda = lm.params(2);
  f.points = n;
  std::vector<double> fitted(n);
  for (std::size_t i = 0; i < n; ++i) fitted[i] = f(w.x[i]);
  f.r2 = r_squared(w.y, fitted);
  return f;
}

/// Linear least squares of ratio(t) on the basis {1, -tau/t, (tau/t)^2} for t >= tau.
inline RatioQuadraticFit fit_ratio_quadratic(std::span<const double> t,
                                             std::span<const double> ratio, double tau) {
  if (t.size() != ratio.size()) throw DomainError("fit_ratio_quadratic: length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= tau && std::isfinite(ratio[i])) {
      xs.push_back(tau / t[i]);
      ys.push_back(ratio[i]);
    }
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  if (n < 3) throw FitFailure("fit_ratio_quadratic: rank deficiency (fewer than 3 points)");
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = -xs[i];
    a(i, 2) = xs[i] * xs[i];
    b(i) = ys[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 3) throw FitFailure("fit_ratio_quadratic: rank deficiency");
  const Eigen::VectorXd coef = qr.solve(b);
  RatioQuadraticFit f;
  f.a = coef(0);
  f.b = coef(1);
  f.c = coef(2);
  f.points = xs.size();
  std::vector<double> fitted(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) fitted[i] = f.a - f.b * xs[i] + f.c * xs[i] * xs[i];
  f.r2 = r_squared(ys, fitted);
  return f;
}

}  // namespace stochvar
