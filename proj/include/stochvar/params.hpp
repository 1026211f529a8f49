#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "stochvar/error.hpp"

namespace stochvar {

namespace detail {
inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}
}  // namespace detail

/// Parameters of the mean-reverting variance process
///
///   dv = -gamma (v - theta) dt + sqrt(kappaM^2 v^2 + kappaH^2 v) dW2,
///   dW2 = rho dW1 + sqrt(1 - rho^2) dZ,
///
/// with time measured in days. kappaH = 0 is the multiplicative model,
/// kappaM = 0 the Heston (CIR) model.
///
/// The regular constructor enforces every constraint; `unchecked()` is the
/// escape hatch for exploratory fitting and for noise-free test configurations.
class MeanRevertingParams {
 public:
  MeanRevertingParams(double gamma, double theta, double kappa_m, double kappa_h, double rho = 0.0)
      : gamma_(gamma), theta_(theta), kappa_m_(kappa_m), kappa_h_(kappa_h), rho_(rho) {
    validate();
  }

  static MeanRevertingParams unchecked(double gamma, double theta, double kappa_m, double kappa_h,
                                       double rho = 0.0) {
    return MeanRevertingParams(gamma, theta, kappa_m, kappa_h, rho, Unchecked{});
  }

  static MeanRevertingParams heston(double gamma, double theta, double kappa_h, double rho = 0.0) {
    return {gamma, theta, 0.0, kappa_h, rho};
  }
  static MeanRevertingParams multiplicative(double gamma, double theta, double kappa_m,
                                            double rho = 0.0) {
    return {gamma, theta, kappa_m, 0.0, rho};
  }

  double gamma() const noexcept { return gamma_; }
  double theta() const noexcept { return theta_; }
  double kappa_m() const noexcept { return kappa_m_; }
  double kappa_h() const noexcept { return kappa_h_; }
  double rho() const noexcept { return rho_; }

  bool is_heston() const noexcept { return kappa_m_ == 0.0 && kappa_h_ > 0.0; }
  bool is_multiplicative() const noexcept { return kappa_h_ == 0.0 && kappa_m_ > 0.0; }
  bool is_noise_free() const noexcept { return kappa_m_ == 0.0 && kappa_h_ == 0.0; }

  /// Shape p = 2 gamma theta / kappaH^2 (infinite when kappaH = 0).
  double p() const noexcept {
    return kappa_h_ > 0.0 ? 2.0 * gamma_ * theta_ / (kappa_h_ * kappa_h_)
                          : std::numeric_limits<double>::infinity();
  }
  /// Shape q = 1 + 2 gamma / kappaM^2 (infinite when kappaM = 0).
  double q() const noexcept {
    return kappa_m_ > 0.0 ? 1.0 + 2.0 * gamma_ / (kappa_m_ * kappa_m_)
                          : std::numeric_limits<double>::infinity();
  }

  /// Diffusion amplitude g(v) at v >= 0.
  double diffusion(double v) const noexcept {
    return std::sqrt(kappa_m_ * kappa_m_ * v * v + kappa_h_ * kappa_h_ * v);
  }

  MeanRevertingParams with_rho(double rho) const {
    return MeanRevertingParams(gamma_, theta_, kappa_m_, kappa_h_, rho);
  }

  /// Throws ConstraintViolation naming the first failed inequality.
  void validate() const {
    if (!(gamma_ > 0.0) || !std::isfinite(gamma_))
      throw ConstraintViolation("gamma > 0", "gamma = " + detail::fmt(gamma_));
    if (!(theta_ > 0.0) || !std::isfinite(theta_))
      throw ConstraintViolation("theta > 0", "theta = " + detail::fmt(theta_));
    if (!(kappa_m_ >= 0.0) || !(kappa_h_ >= 0.0))
      throw ConstraintViolation("kappaM >= 0 and kappaH >= 0",
                                "kappaM = " + detail::fmt(kappa_m_) +
                                    ", kappaH = " + detail::fmt(kappa_h_));
    if (kappa_m_ == 0.0 && kappa_h_ == 0.0)
      throw ConstraintViolation("kappaM > 0 or kappaH > 0", "both noise amplitudes are zero");
    if (!(rho_ >= -1.0 && rho_ <= 1.0))
      throw ConstraintViolation("-1 <= rho <= 1", "rho = " + detail::fmt(rho_));
    if (kappa_h_ > 0.0 && !(p() > 1.0))
      throw ConstraintViolation("p = 2*gamma*theta/kappaH^2 > 1", "p = " + detail::fmt(p()));
    if (kappa_m_ > 0.0 && !(q() > 2.0))
      throw ConstraintViolation("q = 1 + 2*gamma/kappaM^2 > 2", "q = " + detail::fmt(q()));
  }

  friend bool operator==(const MeanRevertingParams&, const MeanRevertingParams&) = default;

 private:
  struct Unchecked {};
  MeanRevertingParams(double g, double t, double km, double kh, double r, Unchecked)
      : gamma_(g), theta_(t), kappa_m_(km), kappa_h_(kh), rho_(r) {}

  double gamma_;
  double theta_;
  double kappa_m_;
  double kappa_h_;
  double rho_;
};

/// Parameters of the generalized model
///
///   dv = -gamma (v - theta v^(1-alpha)) dt + sqrt(kappa2^2 v^2 + kappaAlpha^2 v^(2-alpha)) dW2
///
/// whose steady state is GB2. alpha = 1 is MeanRevertingParams.
class GB2Params {
 public:
  GB2Params(double gamma, double theta, double kappa2, double kappa_alpha, double alpha)
      : gamma_(gamma), theta_(theta), kappa2_(kappa2), kappa_alpha_(kappa_alpha), alpha_(alpha) {
    validate();
  }

  static GB2Params unchecked(double gamma, double theta, double kappa2, double kappa_alpha,
                             double alpha) {
    GB2Params g(gamma, theta, kappa2, kappa_alpha, alpha, 0);
    return g;
  }

  double gamma() const noexcept { return gamma_; }
  double theta() const noexcept { return theta_; }
  double kappa2() const noexcept { return kappa2_; }
  double kappa_alpha() const noexcept { return kappa_alpha_; }
  double alpha() const noexcept { return alpha_; }

  double beta() const noexcept { return std::pow(kappa_alpha_ / kappa2_, 2.0 / alpha_); }
  double p() const noexcept {
    return (-1.0 + alpha_ + 2.0 * gamma_ * theta_ / (kappa_alpha_ * kappa_alpha_)) / alpha_;
  }
  double q() const noexcept { return (1.0 + 2.0 * gamma_ / (kappa2_ * kappa2_)) / alpha_; }

  /// alpha = 1 reduction, kappa2 -> kappaM and kappaAlpha -> kappaH.
  MeanRevertingParams to_mean_reverting(double rho = 0.0) const {
    if (alpha_ != 1.0)
      throw DomainError("GB2Params::to_mean_reverting requires alpha == 1, got " +
                        detail::fmt(alpha_));
    return MeanRevertingParams(gamma_, theta_, kappa2_, kappa_alpha_, rho);
  }

  void validate() const {
    if (!(gamma_ > 0.0)) throw ConstraintViolation("gamma > 0", "gamma = " + detail::fmt(gamma_));
    if (!(theta_ > 0.0)) throw ConstraintViolation("theta > 0", "theta = " + detail::fmt(theta_));
    if (!(alpha_ > 0.0)) throw ConstraintViolation("alpha > 0", "alpha = " + detail::fmt(alpha_));
    if (!(kappa2_ > 0.0) || !(kappa_alpha_ > 0.0))
      throw ConstraintViolation("kappa2 > 0 and kappaAlpha > 0",
                                "generalized gamma / generalized inverse gamma limits are not "
                                "GB2; kappa2 = " +
                                    detail::fmt(kappa2_) + ", kappaAlpha = " +
                                    detail::fmt(kappa_alpha_));
    if (!(p() > 0.0) || !std::isfinite(p()))
      throw ConstraintViolation("p > 0", "p = " + detail::fmt(p()));
    if (!(q() > 0.0) || !std::isfinite(q()))
      throw ConstraintViolation("q > 0", "q = " + detail::fmt(q()));
  }

 private:
  GB2Params(double g, double t, double k2, double ka, double a, int)
      : gamma_(g), theta_(t), kappa2_(k2), kappa_alpha_(ka), alpha_(a) {}

  double gamma_;
  double theta_;
  double kappa2_;
  double kappa_alpha_;
  double alpha_;
};

}  // namespace stochvar
