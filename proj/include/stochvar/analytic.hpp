#pragma once

// Closed-form second-order statistics of the mean-reverting variance models:
// variance of v, reduced covariance cov[v_t v_{t+tau}]/theta^2, correlation and
// leverage amplitude.

#include <cmath>

#include "stochvar/error.hpp"
#include "stochvar/params.hpp"
#include "stochvar/special.hpp"
#include "stochvar/steady_state.hpp"

namespace stochvar {

/// var[v] = <g^2(v)>/(2 gamma) closed under <v^2> = var + theta^2:
/// (kappaM^2 theta^2 + kappaH^2 theta) / (2 gamma - kappaM^2).
inline Moment analytic_var_v(const MeanRevertingParams& mr) {
  const double km2 = mr.kappa_m() * mr.kappa_m();
  const double kh2 = mr.kappa_h() * mr.kappa_h();
  const double denom = 2.0 * mr.gamma() - km2;
  if (!(denom > 0.0))
    return Moment::divergent("var[v] diverges: requires 2*gamma > kappaM^2 (2*gamma = " +
                             detail::fmt(2.0 * mr.gamma()) + ", kappaM^2 = " + detail::fmt(km2) +
                             ")");
  const double th = mr.theta();
  return Moment::finite((km2 * th * th + kh2 * th) / denom);
}

/// cov[v_t v_{t+tau}] / theta^2 = var[v]/theta^2 * exp(-gamma tau).
inline double analytic_reduced_cov(const MeanRevertingParams& mr, double tau) {
  if (!(tau >= 0.0)) throw DomainError("analytic_reduced_cov: tau must be >= 0");
  const double th = mr.theta();
  return analytic_var_v(mr).value() / (th * th) * std::exp(-mr.gamma() * tau);
}

/// corr[v_t v_{t+tau}] = exp(-gamma tau).
inline double analytic_corr(double gamma, double tau) {
  if (!(tau >= 0.0)) throw DomainError("analytic_corr: tau must be >= 0");
  return std::exp(-gamma * tau);
}

/// Leverage amplitude <v^{1/2} g(v)> / theta^2, i.e. the leverage at tau = 0
/// divided by rho.
///
///   combined:       kappaM beta^{3/2} B(p+1, q-3/2) / (theta^2 B(p, q)),  beta = kappaH^2/kappaM^2
///   multiplicative: kappaM m^{1/2} Gamma(m - 1/2) / (theta^{1/2} Gamma(m)),  m = 2 gamma/kappaM^2
///   Heston:         kappaH / theta
///
/// The Beta/Gamma arguments require 2 gamma / kappaM^2 > 1/2.
inline double leverage_amplitude(const MeanRevertingParams& mr) {
  const double g = mr.gamma();
  const double th = mr.theta();
  const double km = mr.kappa_m();
  const double kh = mr.kappa_h();
  if (km == 0.0) {
    if (kh == 0.0) return 0.0;
    return kh / th;
  }
  const double m = 2.0 * g / (km * km);
  if (!(m > 0.5))
    throw DomainError("leverage amplitude undefined: requires 2*gamma/kappaM^2 > 1/2, got " +
                      detail::fmt(m));
  if (kh == 0.0)
    return km * std::sqrt(m / th) * special::gamma_ratio(m - 0.5, 0.5);
  // B(p+1, q-3/2) / B(p, q) = p Gamma(q-3/2)/Gamma(q) * Gamma(p+q)/Gamma(p+q-1/2), q = m + 1.
  const double p = 2.0 * g * th / (kh * kh);
  const double q = m + 1.0;
  const double log_beta_scale = 2.0 * (std::log(kh) - std::log(km));  // log(kappaH^2/kappaM^2)
  return km * p *
         std::exp(1.5 * log_beta_scale - 2.0 * std::log(th) +
                  std::log(special::gamma_ratio(q - 1.5, 1.5)) -
                  std::log(special::gamma_ratio(p + q - 0.5, 0.5)));
}

/// L(tau) = rho * amplitude * exp(-gamma tau).
inline double analytic_leverage(const MeanRevertingParams& mr, double tau) {
  if (!(tau >= 0.0)) throw DomainError("analytic_leverage: tau must be >= 0");
  if (mr.rho() == 0.0) return 0.0;
  return mr.rho() * leverage_amplitude(mr) * std::exp(-mr.gamma() * tau);
}

}  // namespace stochvar
