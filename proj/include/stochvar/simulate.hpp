#pragma once

// Euler-Maruyama (full truncation) simulation of the variance process and of
// the joint (return, variance) process, with per-path RNG substreams.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "stochvar/error.hpp"
#include "stochvar/parallel.hpp"
#include "stochvar/params.hpp"
#include "stochvar/rng.hpp"
#include "stochvar/series.hpp"
#include "stochvar/steady_state.hpp"

namespace stochvar {

/// Marker: draw v(0) from the analytic steady state.
struct SteadyStateDraw {
  friend bool operator==(SteadyStateDraw, SteadyStateDraw) { return true; }
};

using InitialCondition = std::variant<double, SteadyStateDraw>;

enum class Scheme { EulerFullTruncation };

inline constexpr double kDefaultMaxRateStep = 0.01;  // target gamma*h for automatic substeps

struct SimConfig {
  double dt = 1.0;             // reporting step, days
  std::size_t steps = 0;       // reported values per path
  unsigned substeps = 0;       // integration substeps per reported step; 0 = automatic
  InitialCondition x0 = SteadyStateDraw{};
  std::uint64_t seed = 0;      // master seed
  Scheme scheme = Scheme::EulerFullTruncation;

  /// Substeps actually used: the configured value, or ceil(gamma*dt/0.01).
  unsigned resolved_substeps(double gamma) const {
    if (substeps > 0) return substeps;
    const double s = std::ceil(gamma * dt / kDefaultMaxRateStep - 1e-12);
    return static_cast<unsigned>(std::max(1.0, s));
  }

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("SimConfig: dt must be > 0");
    if (steps < 1) throw DomainError("SimConfig: steps must be >= 1");
    if (const double* x = std::get_if<double>(&x0); x && !(*x >= 0.0 && std::isfinite(*x)))
      throw DomainError("SimConfig: x0 must be >= 0");
  }

  /// Non-fatal warning when gamma*h >= 0.1.
  std::optional<std::string> stability_warning(double gamma) const {
    const double h = dt / resolved_substeps(gamma);
    if (gamma * h >= 0.1)
      return "gamma*h = " + detail::fmt(gamma * h) +
             " >= 0.1; discretization bias will be visible (increase substeps)";
    return std::nullopt;
  }
};

/// v sampled at the end of each reporting step: values[k] = v((k+1) dt).
struct VariancePath {
  std::vector<double> values;
  double initial = 0.0;
  SimConfig config;
  std::uint64_t stream_index = 0;
  std::uint64_t stream_seed = 0;
};

/// returns[k] = x((k+1) dt) - x(k dt); variance.values[k] = v((k+1) dt).
struct JointPath {
  std::vector<double> returns;
  VariancePath variance;
  double rho = 0.0;

  ReturnSeries as_returns() const {
    ReturnSeries r;
    r.values = returns;
    r.source = "simulated:seed=" + std::to_string(variance.config.seed) +
               ":stream=" + std::to_string(variance.stream_index);
    return r;
  }
};

/// Draws (dW1, dW2)/sqrt(h) pairs: dW2 = rho u + sqrt(1 - rho^2) z from
/// independent standard normals (u, z).
class CorrelatedNormals {
 public:
  explicit CorrelatedNormals(double rho) : rho_(rho), rho_c_(std::sqrt(1.0 - rho * rho)) {
    if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("CorrelatedNormals: |rho| must be <= 1");
  }

  template <class Eng>
  std::pair<double, double> operator()(Eng& eng) {
    const double u = normal_(eng);
    const double z = normal_(eng);
    return {u, rho_ * u + rho_c_ * z};
  }

 private:
  double rho_;
  double rho_c_;
  std::normal_distribution<double> normal_;
};

namespace detail {

inline double initial_value(const MeanRevertingParams& mr, const SimConfig& cfg, Engine& eng) {
  if (const double* x = std::get_if<double>(&cfg.x0)) return *x;
  if (mr.is_noise_free()) return mr.theta();
  const SteadyStateDist ss = steady_state_of(mr);
  const double u1 = open_uniform(eng);
  const double u2 = open_uniform(eng);
  return ss.draw(u1, u2);
}

template <bool Joint>
void integrate(const MeanRevertingParams& mr, const SimConfig& cfg, std::uint64_t stream_index,
               VariancePath& vp, std::vector<double>* returns) {
  cfg.validate();
  if (!(mr.gamma() > 0.0) || !(mr.theta() > 0.0))
    throw ConstraintViolation("gamma > 0 and theta > 0", "simulation parameters");
  vp.config = cfg;
  vp.stream_index = stream_index;
  vp.stream_seed = substream_seed(cfg.seed, stream_index);
  Engine eng = make_engine(vp.stream_seed);

  const unsigned sub = cfg.resolved_substeps(mr.gamma());
  const double h = cfg.dt / sub;
  const double sqrt_h = std::sqrt(h);
  const double gamma = mr.gamma();
  const double theta = mr.theta();
  const double km2 = mr.kappa_m() * mr.kappa_m();
  const double kh2 = mr.kappa_h() * mr.kappa_h();
  const bool noise = !mr.is_noise_free();

  double v = initial_value(mr, cfg, eng);
  vp.initial = v;
  vp.values.resize(cfg.steps);
  if constexpr (Joint) returns->resize(cfg.steps);

  CorrelatedNormals pair_draw(Joint ? mr.rho() : 0.0);
  std::normal_distribution<double> normal;

  for (std::size_t k = 0; k < cfg.steps; ++k) {
    double dx = 0.0;
    for (unsigned s = 0; s < sub; ++s) {
      const double vp_ = v > 0.0 ? v : 0.0;
      const double g = std::sqrt(km2 * vp_ * vp_ + kh2 * vp_);
      double dw2 = 0.0;
      if constexpr (Joint) {
        const auto [u, w2] = pair_draw(eng);
        dx += std::sqrt(vp_) * u * sqrt_h;
        dw2 = w2;
      } else {
        if (noise) dw2 = normal(eng);
      }
      v += -gamma * (vp_ - theta) * h + g * dw2 * sqrt_h;
    }
    vp.values[k] = v > 0.0 ? v : 0.0;
    if constexpr (Joint) (*returns)[k] = dx;
  }
}

}  // namespace detail

/// One variance path from substream `stream_index` of `config.seed`.
inline VariancePath simulate_variance_path(const MeanRevertingParams& params,
                                           const SimConfig& config,
                                           std::uint64_t stream_index = 0) {
  VariancePath vp;
  detail::integrate<false>(params, config, stream_index, vp, nullptr);
  return vp;
}

/// One joint (return, variance) path. Each substep draws independent (u, z),
/// dW1 = u sqrt(h), dW2 = (rho u + sqrt(1-rho^2) z) sqrt(h), dx += sqrt(v+) dW1.
inline JointPath simulate_joint_path(const MeanRevertingParams& params, const SimConfig& config,
                                     std::uint64_t stream_index = 0) {
  if (!(params.rho() >= -1.0 && params.rho() <= 1.0))
    throw ConstraintViolation("-1 <= rho <= 1", "rho = " + detail::fmt(params.rho()));
  JointPath jp;
  jp.rho = params.rho();
  detail::integrate<true>(params, config, stream_index, jp.variance, &jp.returns);
  return jp;
}

struct Ensemble {
  std::vector<VariancePath> paths;
  std::uint64_t master_seed = 0;
};

struct JointEnsemble {
  std::vector<JointPath> paths;
  std::uint64_t master_seed = 0;
};

/// Path i uses substream i of config.seed; output is independent of `workers`.
inline Ensemble simulate_ensemble(const MeanRevertingParams& params, const SimConfig& config,
                                  std::size_t n_paths, unsigned workers = 0) {
  if (n_paths < 1) throw DomainError("simulate_ensemble: n_paths must be >= 1");
  config.validate();
  Ensemble e;
  e.master_seed = config.seed;
  e.paths.resize(n_paths);
  parallel_for(n_paths, workers,
               [&](std::size_t i) { e.paths[i] = simulate_variance_path(params, config, i); });
  return e;
}

inline JointEnsemble simulate_joint_ensemble(const MeanRevertingParams& params,
                                             const SimConfig& config, std::size_t n_paths,
                                             unsigned workers = 0) {
  if (n_paths < 1) throw DomainError("simulate_joint_ensemble: n_paths must be >= 1");
  config.validate();
  JointEnsemble e;
  e.master_seed = config.seed;
  e.paths.resize(n_paths);
  parallel_for(n_paths, workers,
               [&](std::size_t i) { e.paths[i] = simulate_joint_path(params, config, i); });
  return e;
}

}  // namespace stochvar
