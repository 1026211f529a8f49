#pragma once

// Relaxation of the unit-mean square-root process toward its Gamma steady
// state: ensemble cumulant curves and the distribution of KS relaxation times.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stochvar/error.hpp"
#include "stochvar/fit.hpp"
#include "stochvar/mle.hpp"
#include "stochvar/parallel.hpp"
#include "stochvar/rng.hpp"
#include "stochvar/simulate.hpp"
#include "stochvar/spectral.hpp"
#include "stochvar/steady_state.hpp"

namespace stochvar {

inline constexpr std::size_t kMinCumulantPaths = 100;
inline constexpr std::size_t kMinRelaxationSamples = 100;

/// Sample cumulant of order 1..3: mean, then the unbiased k-statistics
///   k2 = n/(n-1) m2,  k3 = n^2/((n-1)(n-2)) m3.
inline double k_statistic(std::span<const double> x, unsigned order) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 3) throw InsufficientData("k_statistic: need at least 3 values");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  if (order == 1) return mean;
  double m2 = 0.0, m3 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (order == 2) return n / (n - 1.0) * m2;
  if (order == 3) return n * n / ((n - 1.0) * (n - 2.0)) * m3;
  throw DomainError("k_statistic: order must be 1, 2 or 3");
}

struct CumulantCurve {
  unsigned order = 1;
  double x0 = 1.0;
  std::vector<double> times;
  std::vector<double> theory;
  std::vector<double> empirical;
  std::vector<double> stderr_;  // bootstrap standard error over paths
};

struct CumulantOptions {
  std::vector<unsigned> orders = {1, 2, 3};
  unsigned bootstrap = 200;
  std::uint64_t bootstrap_seed = 0;
};

/// Cross-sectional cumulants of an ensemble of unit-mean square-root paths at
/// the given times (multiples of the reporting step; t = 0 uses the initial
/// values), with theory curves from theory_cumulant.
inline std::vector<CumulantCurve> empirical_cumulants(const Ensemble& ens, const HestonUnitParams& p,
                                                      const std::vector<double>& times,
                                                      const CumulantOptions& opt = {}) {
  if (ens.paths.size() < kMinCumulantPaths)
    throw InsufficientData("empirical_cumulants: need at least " +
                           std::to_string(kMinCumulantPaths) + " paths, got " +
                           std::to_string(ens.paths.size()));
  const SimConfig& cfg = ens.paths.front().config;
  const double* x0p = std::get_if<double>(&cfg.x0);
  if (!x0p) throw DomainError("empirical_cumulants: ensemble must start from a fixed x0");
  for (const auto& path : ens.paths)
    if (path.config.dt != cfg.dt || path.config.steps != cfg.steps || path.initial != *x0p)
      throw DomainError("empirical_cumulants: paths do not share a configuration");
  const std::size_t np = ens.paths.size();

  std::vector<std::size_t> index(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double k = times[j] / cfg.dt;
    const double kr = std::round(k);
    if (!(times[j] >= 0.0) || std::abs(k - kr) > 1e-9 * std::max(1.0, k) || kr > cfg.steps)
      throw DomainError("empirical_cumulants: time " + detail::fmt(times[j]) +
                        " is not a reporting time of the ensemble");
    index[j] = static_cast<std::size_t>(kr);
  }

  std::vector<CumulantCurve> curves;
  for (unsigned order : opt.orders) {
    CumulantCurve c;
    c.order = order;
    c.x0 = *x0p;
    c.times = times;
    curves.push_back(std::move(c));
  }

  // Resampling indices are shared by all times and orders.
  Engine eng = make_engine(opt.bootstrap_seed);
  std::vector<std::vector<std::uint32_t>> resample(opt.bootstrap, std::vector<std::uint32_t>(np));
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(np - 1));
  for (auto& r : resample)
    for (auto& i : r) i = pick(eng);

  std::vector<double> column(np), boot(np), reps(opt.bootstrap);
  for (std::size_t j = 0; j < times.size(); ++j) {
    for (std::size_t i = 0; i < np; ++i)
      column[i] = index[j] == 0 ? ens.paths[i].initial : ens.paths[i].values[index[j] - 1];
    for (auto& c : curves) {
      const double theory =
          (c.x0 == 0.0 || c.x0 == 1.0) ? theory_cumulant(c.order, times[j], c.x0, p)
                                       : std::numeric_limits<double>::quiet_NaN();
      c.theory.push_back(theory);
      c.empirical.push_back(k_statistic(column, c.order));
      double se = 0.0;
      if (opt.bootstrap >= 2) {
        for (unsigned b = 0; b < opt.bootstrap; ++b) {
          for (std::size_t i = 0; i < np; ++i) boot[i] = column[resample[b][i]];
          reps[b] = k_statistic(boot, c.order);
        }
        double m = 0.0;
        for (double r : reps) m += r;
        m /= opt.bootstrap;
        for (double r : reps) se += (r - m) * (r - m);
        se = std::sqrt(se / (opt.bootstrap - 1.0));
      }
      c.stderr_.push_back(se);
    }
  }
  return curves;
}

enum class RelaxationRule {
  Threshold,       // first checkpoint with KS <= ks_threshold
  HorizonMinimum,  // first checkpoint with KS <= (1 + epsilon) * min over the horizon
};

inline std::string_view to_string(RelaxationRule r) {
  return r == RelaxationRule::Threshold ? "threshold" : "horizon-minimum";
}

struct RelaxationConfig {
  RelaxationRule rule = RelaxationRule::Threshold;
  double ks_threshold = 0.2;
  double epsilon = 0.05;
  double resolution = 0.02;     // sampling interval in units of 1/gamma
  double horizon = 100.0;       // path length in units of 1/gamma
  unsigned checkpoint_every = 1;  // KS evaluated every this many samples
  double x0 = 1.0;
  unsigned substeps = 0;        // 0 = automatic
  std::uint64_t seed = 0;

  double sample_interval(double gamma) const { return resolution / gamma; }
  std::size_t samples_per_path() const {
    return static_cast<std::size_t>(std::llround(horizon / resolution));
  }

  void validate() const {
    if (!(ks_threshold > 0.0 && ks_threshold < 1.0))
      throw DomainError("RelaxationConfig: ks_threshold must be in (0, 1)");
    if (!(epsilon >= 0.0)) throw DomainError("RelaxationConfig: epsilon must be >= 0");
    if (!(resolution > 0.0) || !(horizon > resolution))
      throw DomainError("RelaxationConfig: need 0 < resolution < horizon");
    if (horizon < 50.0)
      throw DomainError("RelaxationConfig: horizon must be >= 50/gamma for KS to saturate");
    if (checkpoint_every < 1) throw DomainError("RelaxationConfig: checkpoint_every must be >= 1");
    if (!(x0 >= 0.0)) throw DomainError("RelaxationConfig: x0 must be >= 0");
  }
};

struct RelaxationSample {
  double time = std::numeric_limits<double>::quiet_NaN();  // days
  std::uint64_t stream_index = 0;
  std::uint64_t stream_seed = 0;
  double ks_at_time = std::numeric_limits<double>::quiet_NaN();
  double ks_min = std::numeric_limits<double>::quiet_NaN();
  double ks_final = std::numeric_limits<double>::quiet_NaN();
  std::size_t checkpoints = 0;
  bool flagged = false;
  std::string reason;
};

/// Relaxation time of one path from x(0) = config.x0: the KS distance between
/// the expanding-window empirical distribution of the samples so far and
/// `steady` is tracked at each checkpoint; the relaxation time is the first
/// checkpoint satisfying the configured rule. Paths that never satisfy it are
/// flagged.
inline RelaxationSample measure_relaxation_time(const HestonUnitParams& p,
                                                const RelaxationConfig& cfg,
                                                const SteadyStateDist& steady,
                                                std::uint64_t stream_index = 0) {
  p.validate();
  cfg.validate();
  SimConfig sim;
  sim.dt = cfg.sample_interval(p.gamma);
  sim.steps = cfg.samples_per_path();
  sim.substeps = cfg.substeps;
  sim.x0 = cfg.x0;
  sim.seed = cfg.seed;
  const VariancePath path = simulate_variance_path(p.to_params(), sim, stream_index);

  RelaxationSample out;
  out.stream_index = stream_index;
  out.stream_seed = path.stream_seed;

  std::vector<double> sorted;
  std::vector<double> cdf_sorted;  // steady CDF at the sorted samples
  sorted.reserve(sim.steps);
  cdf_sorted.reserve(sim.steps);
  std::vector<std::pair<std::size_t, double>> trajectory;  // (sample count, KS)
  const bool early_stop = cfg.rule == RelaxationRule::Threshold;
  double ks_min = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < path.values.size(); ++k) {
    const double x = path.values[k];
    const auto pos = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
    sorted.insert(sorted.begin() + pos, x);
    cdf_sorted.insert(cdf_sorted.begin() + pos, x > 0.0 ? steady.cdf(x) : 0.0);
    if ((k + 1) % cfg.checkpoint_every != 0) continue;
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const double f = cdf_sorted[i];
      d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    ++out.checkpoints;
    ks_min = std::min(ks_min, d);
    out.ks_final = d;
    if (early_stop) {
      if (d <= cfg.ks_threshold) {
        out.time = static_cast<double>(k + 1) * sim.dt;
        out.ks_at_time = d;
        out.ks_min = ks_min;
        return out;
      }
    } else {
      trajectory.emplace_back(k + 1, d);
    }
  }
  out.ks_min = ks_min;
  if (early_stop) {
    out.flagged = true;
    out.reason = "KS never fell to " + detail::fmt(cfg.ks_threshold) + " within the horizon (min " +
                 detail::fmt(ks_min) + ")";
    return out;
  }
  const double target = (1.0 + cfg.epsilon) * ks_min;
  for (const auto& [count, d] : trajectory)
    if (d <= target) {
      out.time = static_cast<double>(count) * sim.dt;
      out.ks_at_time = d;
      break;
    }
  // A minimum that is not a saturation level (e.g. a deterministic path that
  // never approaches the steady state) is flagged.
  if (!(ks_min <= cfg.ks_threshold)) {
    out.flagged = true;
    out.reason = "KS minimum " + detail::fmt(ks_min) + " above saturation level " +
                 detail::fmt(cfg.ks_threshold);
  }
  return out;
}

inline RelaxationSample measure_relaxation_time(const HestonUnitParams& p,
                                                const RelaxationConfig& cfg,
                                                std::uint64_t stream_index = 0) {
  if (!(p.kappa2 > 0.0))
    throw DomainError("measure_relaxation_time: kappa2 = 0 has no nondegenerate steady state; "
                      "pass an explicit steady-state distribution");
  return measure_relaxation_time(p, cfg, steady_state_of(p.to_params()), stream_index);
}

/// Mean, variance and third cumulant (k-statistics).
struct SampleCumulants {
  double mean = 0.0;
  double variance = 0.0;
  double k3 = 0.0;
};

inline SampleCumulants sample_cumulants(std::span<const double> x) {
  return {k_statistic(x, 1), k_statistic(x, 2), k_statistic(x, 3)};
}

struct RelaxationExperiment {
  HestonUnitParams params;
  RelaxationConfig config;
  std::vector<RelaxationSample> samples;
  std::vector<double> times;  // relaxation times of unflagged samples
  std::size_t flagged = 0;
  bool unreliable = false;    // more than 5% of samples flagged
  std::vector<MleReport> fits;          // ordered as kAllFamilies
  std::vector<std::size_t> ranking;     // indices into fits, increasing KS
  SampleCumulants cumulants;
};

/// n_samples relaxation times (sample i on substream i of config.seed), MLE
/// fits of the six families to the unflagged times, and their KS ranking.
inline RelaxationExperiment relaxation_experiment(const HestonUnitParams& p, std::size_t n_samples,
                                                  const RelaxationConfig& cfg,
                                                  unsigned workers = 0) {
  if (n_samples < kMinRelaxationSamples)
    throw InsufficientData("relaxation_experiment: need at least " +
                           std::to_string(kMinRelaxationSamples) + " samples, got " +
                           std::to_string(n_samples));
  p.validate();
  cfg.validate();
  if (!(p.kappa2 > 0.0)) throw DomainError("relaxation_experiment: kappa2 must be > 0");
  const SteadyStateDist steady = steady_state_of(p.to_params());
  RelaxationExperiment ex;
  ex.params = p;
  ex.config = cfg;
  ex.samples.resize(n_samples);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    ex.samples[i] = measure_relaxation_time(p, cfg, steady, i);
  });
  for (const auto& s : ex.samples) {
    if (s.flagged || !std::isfinite(s.time))
      ++ex.flagged;
    else
      ex.times.push_back(s.time);
  }
  ex.unreliable = static_cast<double>(ex.flagged) > 0.05 * static_cast<double>(n_samples);
  if (ex.times.size() < 10)
    throw FitFailure("relaxation_experiment: only " + std::to_string(ex.times.size()) +
                     " unflagged samples");
  ex.fits = mle_fit_all(ex.times);
  ex.ranking = ks_ranking(ex.fits);
  ex.cumulants = sample_cumulants(ex.times);
  return ex;
}

struct ScalingTable {
  std::vector<double> gammas;
  std::vector<SampleCumulants> cumulants;
  std::vector<std::size_t> flagged;
  double slope_mean = std::numeric_limits<double>::quiet_NaN();
  double slope_variance = std::numeric_limits<double>::quiet_NaN();
  double slope_k3 = std::numeric_limits<double>::quiet_NaN();  // NaN if any k3 <= 0
};

/// Relaxation-time cumulants across a gamma grid at fixed kappa2, with
/// log-log least-squares slopes against gamma.
inline ScalingTable gamma_scaling(const std::vector<double>& gammas, double kappa2,
                                  std::size_t n_samples, const RelaxationConfig& cfg,
                                  unsigned workers = 0) {
  if (gammas.size() < 2) throw DomainError("gamma_scaling: need at least 2 gamma values");
  ScalingTable tab;
  tab.gammas = gammas;
  std::vector<double> lg, lm, lv, lk;
  bool k3_positive = true;
  for (double g : gammas) {
    if (n_samples < kMinRelaxationSamples)
      throw InsufficientData("gamma_scaling: need at least " +
                             std::to_string(kMinRelaxationSamples) + " samples per gamma");
    const HestonUnitParams p{g, kappa2};
    p.validate();
    const SteadyStateDist steady = steady_state_of(p.to_params());
    std::vector<RelaxationSample> samples(n_samples);
    parallel_for(n_samples, workers, [&](std::size_t i) {
      samples[i] = measure_relaxation_time(p, cfg, steady, i);
    });
    std::vector<double> times;
    std::size_t flagged = 0;
    for (const auto& s : samples)
      if (s.flagged || !std::isfinite(s.time))
        ++flagged;
      else
        times.push_back(s.time);
    if (times.size() < 3) throw FitFailure("gamma_scaling: too few unflagged samples");
    const SampleCumulants c = sample_cumulants(times);
    tab.cumulants.push_back(c);
    tab.flagged.push_back(flagged);
    lg.push_back(std::log(g));
    lm.push_back(std::log(c.mean));
    lv.push_back(std::log(c.variance));
    if (c.k3 > 0.0)
      lk.push_back(std::log(c.k3));
    else
      k3_positive = false;
  }
  tab.slope_mean = detail::line_fit(lg, lm).first;
  tab.slope_variance = detail::line_fit(lg, lv).first;
  if (k3_positive) tab.slope_k3 = detail::line_fit(lg, lk).first;
  return tab;
}

}  // namespace stochvar
