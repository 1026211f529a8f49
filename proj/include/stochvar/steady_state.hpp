#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "stochvar/error.hpp"
#include "stochvar/params.hpp"
#include "stochvar/special.hpp"

namespace stochvar {

/// Result of a moment computation: either a finite value or an explicit
/// "diverges" state. Never encodes divergence as infinity.
class Moment {
 public:
  static Moment finite(double value) { return Moment(value, false); }
  static Moment divergent(std::string reason) {
    Moment m(std::numeric_limits<double>::quiet_NaN(), true);
    m.reason_ = std::move(reason);
    return m;
  }

  bool exists() const noexcept { return !diverges_; }
  bool diverges() const noexcept { return diverges_; }
  const std::string& reason() const noexcept { return reason_; }

  /// Throws DivergentMoment when the moment does not exist.
  double value() const {
    if (diverges_) throw DivergentMoment(reason_);
    return value_;
  }

 private:
  Moment(double v, bool d) : value_(v), diverges_(d) {}
  double value_;
  bool diverges_;
  std::string reason_;
};

enum class Family { Gamma, InverseGamma, BetaPrime, GB2 };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::Gamma: return "Gamma";
    case Family::InverseGamma: return "InverseGamma";
    case Family::BetaPrime: return "BetaPrime";
    case Family::GB2: return "GB2";
  }
  return "?";
}

/// Steady-state density of the variance process.
///
/// Parameter usage per family:
///   Gamma         shape p, scale beta          f ∝ v^(p-1) e^(-v/beta)
///   InverseGamma  shape q, scale beta          f ∝ v^(-q-1) e^(-beta/v)
///   BetaPrime     shapes p, q, scale beta      f ∝ (v/beta)^(p-1) (1+v/beta)^(-p-q)
///   GB2           shapes p, q, alpha, scale    f ∝ (v/beta)^(p alpha-1) (1+(v/beta)^alpha)^(-p-q)
/// Unused shapes are NaN.
class SteadyStateDist {
 public:
  static SteadyStateDist gamma(double shape, double scale) {
    require_positive("shape", shape);
    require_positive("scale", scale);
    return {Family::Gamma, scale, shape, kNaN, 1.0};
  }
  static SteadyStateDist inverse_gamma(double shape, double scale) {
    require_positive("shape", shape);
    require_positive("scale", scale);
    return {Family::InverseGamma, scale, kNaN, shape, 1.0};
  }
  static SteadyStateDist beta_prime(double p, double q, double scale) {
    require_positive("p", p);
    require_positive("q", q);
    require_positive("scale", scale);
    return {Family::BetaPrime, scale, p, q, 1.0};
  }
  static SteadyStateDist gb2(double p, double q, double scale, double alpha) {
    require_positive("p", p);
    require_positive("q", q);
    require_positive("scale", scale);
    require_positive("alpha", alpha);
    return {Family::GB2, scale, p, q, alpha};
  }

  Family family() const noexcept { return family_; }
  double beta() const noexcept { return beta_; }
  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }
  double alpha() const noexcept { return alpha_; }

  double log_pdf(double v) const {
    if (!(v > 0.0)) throw DomainError("pdf_eval: v must be > 0, got " + detail::fmt(v));
    const double z = v / beta_;
    const double lz = std::log(z);
    switch (family_) {
      case Family::Gamma:
        return (p_ - 1.0) * lz - z - std::log(beta_) - special::lgamma(p_);
      case Family::InverseGamma:
        return -(q_ + 1.0) * lz - 1.0 / z - std::log(beta_) - special::lgamma(q_);
      case Family::BetaPrime:
        return (p_ - 1.0) * lz - (p_ + q_) * std::log1p(z) - std::log(beta_) -
               special::log_beta(p_, q_);
      case Family::GB2:
        return std::log(alpha_) + (p_ * alpha_ - 1.0) * lz -
               (p_ + q_) * special::softplus(alpha_ * lz) - std::log(beta_) -
               special::log_beta(p_, q_);
    }
    return kNaN;
  }

  double pdf(double v) const { return std::exp(log_pdf(v)); }

  double cdf(double v) const {
    if (!(v > 0.0)) return 0.0;
    const double z = v / beta_;
    switch (family_) {
      case Family::Gamma: return special::gamma_p(p_, z);
      case Family::InverseGamma: return special::gamma_q(q_, 1.0 / z);
      case Family::BetaPrime: return special::ibeta(p_, q_, z / (1.0 + z));
      case Family::GB2: {
        const double za = std::pow(z, alpha_);
        return special::ibeta(p_, q_, za / (1.0 + za));
      }
    }
    return kNaN;
  }

  /// Raw moment E[v^order]; real orders allowed. Divergent when the defining
  /// integral does not converge at either end.
  Moment moment(double order) const {
    const double n = order;
    switch (family_) {
      case Family::Gamma:
        if (!(n > -p_)) return Moment::divergent(diverges_msg(n, "order > -p"));
        return Moment::finite(
            std::exp(n * std::log(beta_) + special::lgamma(p_ + n) - special::lgamma(p_)));
      case Family::InverseGamma:
        if (!(n < q_)) return Moment::divergent(diverges_msg(n, "order < shape"));
        return Moment::finite(
            std::exp(n * std::log(beta_) + special::lgamma(q_ - n) - special::lgamma(q_)));
      case Family::BetaPrime:
        if (!(n < q_)) return Moment::divergent(diverges_msg(n, "order < q"));
        if (!(n > -p_)) return Moment::divergent(diverges_msg(n, "order > -p"));
        return Moment::finite(std::exp(n * std::log(beta_) + special::log_beta(p_ + n, q_ - n) -
                                       special::log_beta(p_, q_)));
      case Family::GB2: {
        const double k = n / alpha_;
        if (!(k < q_)) return Moment::divergent(diverges_msg(n, "order < alpha*q"));
        if (!(k > -p_)) return Moment::divergent(diverges_msg(n, "order > -alpha*p"));
        return Moment::finite(std::exp(n * std::log(beta_) + special::log_beta(p_ + k, q_ - k) -
                                       special::log_beta(p_, q_)));
      }
    }
    return Moment::divergent("unknown family");
  }

  Moment mean() const { return moment(1.0); }

  /// Inverse-CDF draw from two independent uniforms in (0,1). The Gamma branch
  /// uses only `u1`; InverseGamma inverts through the reciprocal; BetaPrime and
  /// GB2 use the ratio of two gamma quantiles.
  double draw(double u1, double u2) const {
    switch (family_) {
      case Family::Gamma: return beta_ * special::gamma_p_inv(p_, u1);
      case Family::InverseGamma: return beta_ / special::gamma_p_inv(q_, u1);
      case Family::BetaPrime:
        return beta_ * special::gamma_p_inv(p_, u1) / special::gamma_p_inv(q_, u2);
      case Family::GB2:
        return beta_ *
               std::pow(special::gamma_p_inv(p_, u1) / special::gamma_p_inv(q_, u2), 1.0 / alpha_);
    }
    return kNaN;
  }

 private:
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  SteadyStateDist(Family f, double beta, double p, double q, double alpha)
      : family_(f), beta_(beta), p_(p), q_(q), alpha_(alpha) {}

  static void require_positive(const char* name, double x) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw DomainError(std::string("SteadyStateDist: ") + name + " must be finite and > 0, got " +
                        detail::fmt(x));
  }

  std::string diverges_msg(double n, const char* cond) const {
    return "moment of order " + detail::fmt(n) + " of " + std::string(to_string(family_)) +
           " diverges (requires " + cond + ")";
  }

  Family family_;
  double beta_;
  double p_;
  double q_;
  double alpha_;
};

/// Steady state of the multiplicative-Heston family. kappaH = 0 gives
/// InverseGamma, kappaM = 0 Gamma, both positive BetaPrime.
inline SteadyStateDist steady_state_of(const MeanRevertingParams& mr) {
  mr.validate();
  const double g = mr.gamma();
  const double th = mr.theta();
  const double km2 = mr.kappa_m() * mr.kappa_m();
  const double kh2 = mr.kappa_h() * mr.kappa_h();
  if (km2 == 0.0) return SteadyStateDist::gamma(2.0 * g * th / kh2, kh2 / (2.0 * g));
  if (kh2 == 0.0) {
    const double shape = 1.0 + 2.0 * g / km2;
    return SteadyStateDist::inverse_gamma(shape, 2.0 * g * th / km2);
  }
  return SteadyStateDist::beta_prime(mr.p(), mr.q(), kh2 / km2);
}

inline SteadyStateDist steady_state_of(const GB2Params& gp) {
  gp.validate();
  return SteadyStateDist::gb2(gp.p(), gp.q(), gp.beta(), gp.alpha());
}

}  // namespace stochvar
