// stochvar: simulate, estimate, calibrate and run relaxation experiments.
//
// Exit codes: 0 success, 2 input error, 3 fit or experiment failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stochvar/calibrate.hpp"
#include "stochvar/estimators.hpp"
#include "stochvar/fit.hpp"
#include "stochvar/io/csv.hpp"
#include "stochvar/io/ensemble_file.hpp"
#include "stochvar/io/json.hpp"
#include "stochvar/io/manifest.hpp"
#include "stochvar/relax.hpp"
#include "stochvar/simulate.hpp"

namespace fs = std::filesystem;
using namespace stochvar;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitFit = 3;

/// Exception carrying an exit code, thrown after outputs are written.
struct ExitStatus {
  int code;
  std::string message;
};

struct Common {
  std::string out;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

class Output {
 public:
  Output(const std::string& dir, std::string command, const std::vector<std::string>& argv,
         std::uint64_t seed)
      : dir_(dir) {
    fs::create_directories(dir_);
    m_.command = std::move(command);
    m_.argv = argv;
    m_.seed = seed;
    m_.version = STOCHVAR_VERSION_STRING;
    m_.timestamp = io::utc_timestamp();
  }

  std::string path(const std::string& name) {
    m_.outputs.push_back(name);
    return (dir_ / name).string();
  }
  io::RunManifest& manifest() { return m_; }
  void finish() { io::write_json((dir_ / "manifest.json").string(), io::to_json(m_)); }

 private:
  fs::path dir_;
  io::RunManifest m_;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out,-o", c.out, "Output directory")->required();
  sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  sub->add_option("--workers", c.workers, "Worker threads (0 = all cores; output does not depend on it)")
      ->capture_default_str();
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = s.find(',', start);
    const std::string item = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
    double v = 0.0;
    if (!io::parse_double(item, v)) throw DomainError("invalid number in list: '" + item + "'");
    out.push_back(v);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

// simulate -----------------------------------------------------------------

struct SimulateArgs {
  Common common;
  double gamma = 0.1, theta = 1.0, kappa_m = 0.0, kappa_h = 0.0, rho = 0.0;
  std::size_t steps = 1000;
  double dt = 1.0;
  unsigned substeps = 0;
  std::string x0 = "steady";
  std::size_t paths = 1;
  bool prices = false;
  bool with_returns = false;
};

std::vector<double> column_cumulants(const std::vector<std::vector<double>>& cols, unsigned order) {
  std::vector<double> out;
  for (const auto& c : cols) out.push_back(k_statistic(c, order));
  return out;
}

int cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& argv) {
  const MeanRevertingParams params(a.gamma, a.theta, a.kappa_m, a.kappa_h, a.rho);
  SimConfig cfg;
  cfg.dt = a.dt;
  cfg.steps = a.steps;
  cfg.substeps = a.substeps;
  cfg.seed = a.common.seed;
  if (a.x0 == "steady") {
    cfg.x0 = SteadyStateDraw{};
  } else {
    double v = 0.0;
    if (!io::parse_double(a.x0, v)) throw DomainError("--x0 must be a number or 'steady'");
    cfg.x0 = v;
  }
  cfg.validate();
  if (auto w = cfg.stability_warning(a.gamma)) std::cerr << "warning: " << *w << '\n';

  Output out(a.common.out, "simulate", argv, a.common.seed);
  out.manifest().params = {{"gamma", a.gamma},         {"theta", a.theta},
                           {"kappa_m", a.kappa_m},     {"kappa_h", a.kappa_h},
                           {"rho", a.rho},             {"steps", a.steps},
                           {"dt", a.dt},               {"substeps", cfg.resolved_substeps(a.gamma)},
                           {"x0", a.x0},               {"paths", a.paths},
                           {"prices", a.prices},       {"with_returns", a.with_returns},
                           {"scheme", "euler-full-truncation"}};

  if (a.paths == 1) {
    const JointPath jp = simulate_joint_path(params, cfg, 0);
    io::write_path_csv(out.path("path.csv"), jp.variance, &jp.returns);
    if (a.prices) {
      std::vector<std::string> dates{io::synthetic_date(0)};
      std::vector<double> close{100.0};
      double logp = std::log(100.0);
      for (std::size_t k = 0; k < jp.returns.size(); ++k) {
        logp += jp.returns[k];
        dates.push_back(io::synthetic_date(static_cast<std::int64_t>(k) + 1));
        close.push_back(std::exp(logp));
      }
      io::write_dated_csv(out.path("prices.csv"), dates, close, "close");
    }
  } else {
    std::vector<std::vector<double>> cols(cfg.steps + 1, std::vector<double>(a.paths));
    if (a.with_returns) {
      const JointEnsemble ens = simulate_joint_ensemble(params, cfg, a.paths, a.common.workers);
      io::write_ensemble(out.path("ensemble.bin"), ens);
      for (std::size_t i = 0; i < a.paths; ++i) {
        cols[0][i] = ens.paths[i].variance.initial;
        for (std::size_t k = 0; k < cfg.steps; ++k) cols[k + 1][i] = ens.paths[i].variance.values[k];
      }
    } else {
      const Ensemble ens = simulate_ensemble(params, cfg, a.paths, a.common.workers);
      io::write_ensemble(out.path("ensemble.bin"), ens);
      for (std::size_t i = 0; i < a.paths; ++i) {
        cols[0][i] = ens.paths[i].initial;
        for (std::size_t k = 0; k < cfg.steps; ++k) cols[k + 1][i] = ens.paths[i].values[k];
      }
    }
    std::vector<double> t(cfg.steps + 1);
    for (std::size_t k = 0; k <= cfg.steps; ++k) t[k] = static_cast<double>(k) * cfg.dt;
    if (a.paths >= 3)
      io::write_table_csv(out.path("ensemble_stats.csv"), {"t", "mean", "k2", "k3"},
                          {t, column_cumulants(cols, 1), column_cumulants(cols, 2),
                           column_cumulants(cols, 3)});
  }
  out.finish();
  return kExitOk;
}

// input-driven commands ----------------------------------------------------

struct InputArgs {
  Common common;
  std::string input;
};

ReturnSeries load_input(const InputArgs& a, Output& out) {
  out.manifest().add_input(a.input);
  return io::load_returns(a.input, a.input + "#fnv1a64=" + io::fnv1a_file(a.input));
}

struct CalibrateArgs {
  InputArgs in;
  std::size_t tau_max = 100;
  std::size_t leverage_tau_max = 100;
};

int cmd_calibrate(const CalibrateArgs& a, const std::vector<std::string>& argv) {
  Output out(a.in.common.out, "calibrate", argv, a.in.common.seed);
  out.manifest().params = {{"input", a.in.input},
                           {"tau_max", a.tau_max},
                           {"leverage_tau_max", a.leverage_tau_max}};
  const ReturnSeries r = load_input(a.in, out);
  CalibrationOptions opt;
  opt.tau_max = a.tau_max;
  opt.leverage_tau_max = a.leverage_tau_max;
  const CalibrationReport rep = calibrate(r, opt);

  const CorrSeries corr = daily_var_corr(r, a.tau_max);
  io::write_lag_csv(out.path("daily_corr.csv"), corr.lags, corr.values);
  const CorrSeries cov = reduced_cov_series(r, a.tau_max);
  io::write_lag_csv(out.path("reduced_cov.csv"), cov.lags, cov.values);
  const LeverageSeries lev = leverage_series(r, a.leverage_tau_max);
  io::write_lag_csv(out.path("leverage.csv"), lev.lags, lev.values);
  io::write_json(out.path("calibration.json"), io::document("calibration", io::to_json(rep)));
  out.finish();
  if (!rep.ok()) {
    std::string msg = "calibration incomplete:";
    for (const auto& f : rep.diagnostics.failures) msg += "\n  " + f;
    throw ExitStatus{kExitFit, msg};
  }
  return kExitOk;
}

struct CorrArgs {
  InputArgs in;
  std::size_t tau_max = 100;
  std::size_t horizon = 1;
  std::string mode = "rolling";
  double lag_min = 0.0;
  double lag_max = 1e300;
};

Accumulation parse_mode(const std::string& m) {
  if (m == "rolling") return Accumulation::Rolling;
  if (m == "disjoint") return Accumulation::Disjoint;
  throw DomainError("--mode must be 'rolling' or 'disjoint'");
}

int cmd_corr(const CorrArgs& a, const std::vector<std::string>& argv) {
  Output out(a.in.common.out, "corr", argv, a.in.common.seed);
  out.manifest().params = {{"input", a.in.input}, {"tau_max", a.tau_max},
                           {"horizon", a.horizon}, {"mode", a.mode},
                           {"lag_min", a.lag_min}, {"lag_max", a.lag_max}};
  const ReturnSeries r = load_input(a.in, out);
  const CorrSeries corr =
      a.horizon == 1 ? daily_var_corr(r, a.tau_max)
                     : multiday_var_corr(accumulate_returns(r, a.horizon, parse_mode(a.mode)), a.tau_max);
  io::write_lag_csv(out.path("corr.csv"), corr.lags, corr.values);
  json body = {{"estimator", std::string(to_string(corr.tag))},
               {"horizon", corr.horizon},
               {"stride", corr.stride},
               {"samples", corr.samples},
               {"source", r.source}};
  int code = kExitOk;
  std::string err;
  try {
    body["fit"] = io::to_json(fit_exp(corr, a.lag_min, a.lag_max));
  } catch (const FitFailure& e) {
    body["fit"] = nullptr;
    body["error"] = e.what();
    body["residual_trace"] = e.residual_trace();
    code = kExitFit;
    err = e.what();
  }
  io::write_json(out.path("corr_fit.json"), io::document("corr", body));
  out.finish();
  if (code != kExitOk) throw ExitStatus{code, err};
  return code;
}

struct LeverageArgs {
  InputArgs in;
  std::size_t tau_max = 100;
};

int cmd_leverage(const LeverageArgs& a, const std::vector<std::string>& argv) {
  Output out(a.in.common.out, "leverage", argv, a.in.common.seed);
  out.manifest().params = {{"input", a.in.input}, {"tau_max", a.tau_max}};
  const ReturnSeries r = load_input(a.in, out);
  const LeverageSeries lev = leverage_series(r, a.tau_max);
  io::write_lag_csv(out.path("leverage.csv"), lev.lags, lev.values);
  CalibrationOptions opt;
  opt.tau_max = a.tau_max;
  opt.leverage_tau_max = a.tau_max;
  const CalibrationReport rep = calibrate(r, opt);
  const auto& d = rep.diagnostics;
  json body = {{"fit", io::optional_json(d.leverage_fit)},
               {"rate_fixed", d.leverage_rate_fixed},
               {"gammaL", io::number(rep.gammaL)},
               {"rhoM", io::number(rep.rhoM)},
               {"rhoH", io::number(rep.rhoH)},
               {"leverage_amplitude_m", io::number(d.leverage_amplitude_m)},
               {"leverage_amplitude_h", io::number(d.leverage_amplitude_h)},
               {"samples", lev.samples},
               {"source", r.source}};
  io::write_json(out.path("leverage_fit.json"), io::document("leverage", body));
  out.finish();
  if (!d.leverage_fit) throw ExitStatus{kExitFit, "leverage fit failed"};
  return kExitOk;
}

struct Gamma1Args {
  InputArgs in;
  std::size_t t_min = 7, t_max = 196, t_step = 7;
  std::size_t tau_max = 100;
  std::string mode = "rolling";
  double offset_t_min = 21.0;
};

int cmd_gamma1(const Gamma1Args& a, const std::vector<std::string>& argv) {
  if (a.t_step < 1 || a.t_min < 1 || a.t_max < a.t_min)
    throw DomainError("need 1 <= --t-min <= --t-max and --t-step >= 1");
  Output out(a.in.common.out, "gamma1", argv, a.in.common.seed);
  out.manifest().params = {{"input", a.in.input},   {"t_min", a.t_min},
                           {"t_max", a.t_max},      {"t_step", a.t_step},
                           {"tau_max", a.tau_max},  {"mode", a.mode},
                           {"offset_t_min", a.offset_t_min}};
  const ReturnSeries r = load_input(a.in, out);
  std::vector<std::size_t> grid;
  for (std::size_t t = a.t_min; t <= a.t_max; t += a.t_step) grid.push_back(t);
  const Gamma1Profile prof = gamma1_profile(r, grid, a.tau_max, parse_mode(a.mode), a.offset_t_min);
  std::vector<double> ts, as, gs, r2s;
  for (const auto& row : prof.rows) {
    ts.push_back(static_cast<double>(row.t));
    as.push_back(row.fit ? row.fit->a : std::nan(""));
    gs.push_back(row.fit ? row.fit->gamma : std::nan(""));
    r2s.push_back(row.fit ? row.fit->r2 : std::nan(""));
  }
  io::write_table_csv(out.path("gamma1.csv"), {"t", "a", "gamma1", "r2"}, {ts, as, gs, r2s});
  json body = io::to_json(prof);
  body["source"] = r.source;
  io::write_json(out.path("gamma1.json"), io::document("gamma1", body));
  out.finish();
  if (!prof.offset_fit) throw ExitStatus{kExitFit, "gamma1 offset fit failed: " + prof.offset_error};
  return kExitOk;
}

// relax --------------------------------------------------------------------

struct RelaxArgs {
  Common common;
  double gamma = 0.1;
  double kappa2 = 1e-4;
  std::size_t samples = 1000;
  std::string rule = "threshold";
  double ks_threshold = 0.2;
  double epsilon = 0.05;
  double resolution = 0.02;
  double horizon = 100.0;
  unsigned checkpoint_every = 1;
  std::string gamma_grid;
  std::size_t cumulant_paths = 0;
  double cumulant_t_max = 100.0;
  std::size_t bins = 50;
};

int cmd_relax(const RelaxArgs& a, const std::vector<std::string>& argv) {
  if (a.samples < kMinRelaxationSamples)
    throw InsufficientData("--samples must be >= " + std::to_string(kMinRelaxationSamples) +
                           " (got " + std::to_string(a.samples) + ")");
  const HestonUnitParams p{a.gamma, a.kappa2};
  p.validate();
  RelaxationConfig cfg;
  if (a.rule == "threshold")
    cfg.rule = RelaxationRule::Threshold;
  else if (a.rule == "horizon-minimum")
    cfg.rule = RelaxationRule::HorizonMinimum;
  else
    throw DomainError("--rule must be 'threshold' or 'horizon-minimum'");
  cfg.ks_threshold = a.ks_threshold;
  cfg.epsilon = a.epsilon;
  cfg.resolution = a.resolution;
  cfg.horizon = a.horizon;
  cfg.checkpoint_every = a.checkpoint_every;
  cfg.seed = a.common.seed;
  cfg.validate();
  const std::vector<double> grid = a.gamma_grid.empty() ? std::vector<double>{} : parse_list(a.gamma_grid);

  Output out(a.common.out, "relax", argv, a.common.seed);
  out.manifest().params = {{"gamma", a.gamma},
                           {"kappa2", a.kappa2},
                           {"samples", a.samples},
                           {"config", io::to_json(cfg)},
                           {"gamma_grid", grid},
                           {"cumulant_paths", a.cumulant_paths},
                           {"cumulant_t_max", a.cumulant_t_max},
                           {"bins", a.bins}};

  const RelaxationExperiment ex = relaxation_experiment(p, a.samples, cfg, a.common.workers);
  json body = io::to_json(ex);

  {
    std::vector<double> idx, time, flagged, ks;
    for (const auto& s : ex.samples) {
      idx.push_back(static_cast<double>(s.stream_index));
      time.push_back(s.time);
      flagged.push_back(s.flagged ? 1.0 : 0.0);
      ks.push_back(s.ks_at_time);
    }
    io::write_table_csv(out.path("relaxation_times.csv"), {"index", "time", "flagged", "ks"},
                        {idx, time, flagged, ks});
    const auto [lo, hi] = std::minmax_element(ex.times.begin(), ex.times.end());
    const std::size_t nb = std::max<std::size_t>(a.bins, 1);
    const double width = (*hi - *lo) / static_cast<double>(nb);
    std::vector<double> edges_lo(nb), edges_hi(nb), counts(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
      edges_lo[b] = *lo + width * static_cast<double>(b);
      edges_hi[b] = b + 1 == nb ? *hi : *lo + width * static_cast<double>(b + 1);
    }
    for (double t : ex.times) {
      std::size_t b = width > 0.0 ? static_cast<std::size_t>((t - *lo) / width) : 0;
      counts[std::min(b, nb - 1)] += 1.0;
    }
    io::write_table_csv(out.path("histogram.csv"), {"bin_lo", "bin_hi", "count"},
                        {edges_lo, edges_hi, counts});
  }

  if (!grid.empty()) body["scaling"] = io::to_json(gamma_scaling(grid, a.kappa2, a.samples, cfg, a.common.workers));

  if (a.cumulant_paths > 0) {
    json cum = json::object();
    for (double x0 : {0.0, 1.0}) {
      SimConfig sc;
      sc.dt = 1.0;
      sc.steps = static_cast<std::size_t>(std::ceil(a.cumulant_t_max));
      sc.x0 = x0;
      sc.seed = a.common.seed;
      const Ensemble ens = simulate_ensemble(p.to_params(), sc, a.cumulant_paths, a.common.workers);
      std::vector<double> times;
      for (std::size_t k = 0; k <= sc.steps; ++k) times.push_back(static_cast<double>(k));
      CumulantOptions copt;
      copt.bootstrap_seed = a.common.seed;
      const auto curves = empirical_cumulants(ens, p, times, copt);
      std::vector<double> t, order, th, em, se;
      for (const auto& c : curves)
        for (std::size_t j = 0; j < c.times.size(); ++j) {
          t.push_back(c.times[j]);
          order.push_back(c.order);
          th.push_back(c.theory[j]);
          em.push_back(c.empirical[j]);
          se.push_back(c.stderr_[j]);
        }
      const std::string name = x0 == 0.0 ? "cumulants_x0_0.csv" : "cumulants_x0_1.csv";
      io::write_table_csv(out.path(name), {"t", "order", "theory", "empirical", "stderr"},
                          {t, order, th, em, se});
      cum[x0 == 0.0 ? "x0_0" : "x0_1"] = name;
    }
    body["cumulant_files"] = cum;
  }

  io::write_json(out.path("relax.json"), io::document("relaxation", body));
  out.finish();
  if (ex.unreliable)
    throw ExitStatus{kExitFit, "experiment unreliable: " + std::to_string(ex.flagged) + " of " +
                                   std::to_string(ex.samples.size()) + " samples flagged"};
  return kExitOk;
}

// replay -------------------------------------------------------------------

struct ReplayArgs {
  std::string manifest;
  std::string out;
  std::optional<unsigned> workers;
};

int run(const std::vector<std::string>& args);

int cmd_replay(const ReplayArgs& a) {
  const io::RunManifest m = io::manifest_from_json(io::read_json(a.manifest));
  for (const auto& [path, hash] : m.inputs) {
    const std::string now = io::fnv1a_file(path);
    if (now != hash)
      throw DomainError("input " + path + " changed since the run (fnv1a64 " + now + " != " + hash + ")");
  }
  std::vector<std::string> argv;
  bool have_workers = false;
  for (std::size_t i = 0; i < m.argv.size(); ++i) {
    const std::string& s = m.argv[i];
    auto replace = [&](const std::string& flag, const std::string& value) {
      if (s == flag && i + 1 < m.argv.size()) {
        argv.push_back(s);
        argv.push_back(value);
        ++i;
        return true;
      }
      if (s.rfind(flag + "=", 0) == 0) {
        argv.push_back(flag + "=" + value);
        return true;
      }
      return false;
    };
    if (replace("--out", a.out) || replace("-o", a.out)) continue;
    if (a.workers && replace("--workers", std::to_string(*a.workers))) {
      have_workers = true;
      continue;
    }
    argv.push_back(s);
  }
  if (a.workers && !have_workers) {
    argv.push_back("--workers");
    argv.push_back(std::to_string(*a.workers));
  }
  return run(argv);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Mean-reverting stochastic variance: simulation, estimation, calibration and "
               "relaxation experiments"};
  app.set_config("--config", "", "TOML/INI configuration file (flags override it)");
  app.set_version_flag("--version", STOCHVAR_VERSION_STRING);
  bool show_config = false;
  app.add_flag("--show-config", show_config, "Print the effective configuration and exit");
  app.require_subcommand(0, 1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate variance or joint (return, variance) paths");
  add_common(s, sim.common);
  s->add_option("--gamma", sim.gamma, "Mean-reversion rate per day")->capture_default_str();
  s->add_option("--theta", sim.theta, "Long-run variance")->capture_default_str();
  s->add_option("--kappa-m", sim.kappa_m, "Multiplicative noise amplitude")->capture_default_str();
  s->add_option("--kappa-h", sim.kappa_h, "Heston noise amplitude")->capture_default_str();
  s->add_option("--rho", sim.rho, "Return/variance noise correlation")->capture_default_str();
  s->add_option("--steps", sim.steps, "Reported steps per path")->capture_default_str();
  s->add_option("--dt", sim.dt, "Reporting step (days)")->capture_default_str();
  s->add_option("--substeps", sim.substeps, "Integration substeps per step (0 = automatic)")
      ->capture_default_str();
  s->add_option("--x0", sim.x0, "Initial variance, or 'steady' for a steady-state draw")
      ->capture_default_str();
  s->add_option("--paths", sim.paths, "Number of paths (> 1 writes a binary ensemble)")
      ->capture_default_str();
  s->add_flag("--prices", sim.prices, "Also write a synthetic date,close price file (single path)");
  s->add_flag("--with-returns", sim.with_returns, "Store returns in the ensemble file");

  CalibrateArgs cal;
  auto* c = app.add_subcommand("calibrate", "Calibrate gamma, theta, kappa and rho from prices or returns");
  add_common(c, cal.in.common);
  c->add_option("--input,-i", cal.in.input, "date,close or date,return CSV")->required();
  c->add_option("--tau-max", cal.tau_max, "Largest lag of the correlation and covariance fits")
      ->capture_default_str();
  c->add_option("--leverage-tau-max", cal.leverage_tau_max, "Largest lag of the leverage fit")
      ->capture_default_str();

  CorrArgs corr;
  auto* k = app.add_subcommand("corr", "Variance correlation of daily or multi-day returns");
  add_common(k, corr.in.common);
  k->add_option("--input,-i", corr.in.input, "date,close or date,return CSV")->required();
  k->add_option("--tau-max", corr.tau_max, "Largest lag (days)")->capture_default_str();
  k->add_option("--horizon", corr.horizon, "Accumulation length t (days)")->capture_default_str();
  k->add_option("--mode", corr.mode, "rolling or disjoint windows")->capture_default_str();
  k->add_option("--lag-min", corr.lag_min, "Smallest lag in the fit")->capture_default_str();
  k->add_option("--lag-max", corr.lag_max, "Largest lag in the fit")->capture_default_str();

  LeverageArgs lev;
  auto* l = app.add_subcommand("leverage", "Leverage function and its exponential fit");
  add_common(l, lev.in.common);
  l->add_option("--input,-i", lev.in.input, "date,close or date,return CSV")->required();
  l->add_option("--tau-max", lev.tau_max, "Largest lag (days)")->capture_default_str();

  Gamma1Args g1;
  auto* g = app.add_subcommand("gamma1", "Multi-day correlation decay rate versus accumulation length");
  add_common(g, g1.in.common);
  g->add_option("--input,-i", g1.in.input, "date,close or date,return CSV")->required();
  g->add_option("--t-min", g1.t_min)->capture_default_str();
  g->add_option("--t-max", g1.t_max)->capture_default_str();
  g->add_option("--t-step", g1.t_step)->capture_default_str();
  g->add_option("--tau-max", g1.tau_max, "Largest lag (days)")->capture_default_str();
  g->add_option("--mode", g1.mode, "rolling or disjoint windows")->capture_default_str();
  g->add_option("--offset-t-min", g1.offset_t_min, "First t in the offset-exponential fit")
      ->capture_default_str();

  RelaxArgs rx;
  auto* r = app.add_subcommand("relax", "Cumulant relaxation and relaxation-time distribution");
  add_common(r, rx.common);
  r->add_option("--gamma", rx.gamma)->capture_default_str();
  r->add_option("--kappa2", rx.kappa2, "Noise amplitude squared (unit mean)")->capture_default_str();
  r->add_option("--samples", rx.samples, "Relaxation-time samples (>= 100)")->capture_default_str();
  r->add_option("--rule", rx.rule, "threshold or horizon-minimum")->capture_default_str();
  r->add_option("--ks-threshold", rx.ks_threshold)->capture_default_str();
  r->add_option("--epsilon", rx.epsilon, "Tolerance of the horizon-minimum rule")->capture_default_str();
  r->add_option("--resolution", rx.resolution, "Sampling interval in units of 1/gamma")
      ->capture_default_str();
  r->add_option("--horizon", rx.horizon, "Path length in units of 1/gamma")->capture_default_str();
  r->add_option("--checkpoint-every", rx.checkpoint_every)->capture_default_str();
  r->add_option("--gamma-grid", rx.gamma_grid, "Comma-separated gammas for the scaling table");
  r->add_option("--cumulant-paths", rx.cumulant_paths, "Ensemble size for cumulant curves (0 = skip)")
      ->capture_default_str();
  r->add_option("--cumulant-t-max", rx.cumulant_t_max)->capture_default_str();
  r->add_option("--bins", rx.bins, "Histogram bins")->capture_default_str();

  ReplayArgs rp;
  auto* p = app.add_subcommand("replay", "Re-run a command from its manifest into a new directory");
  p->add_option("--manifest", rp.manifest)->required()->check(CLI::ExistingFile);
  p->add_option("--out,-o", rp.out)->required();
  p->add_option("--workers", rp.workers, "Override the worker count");

  std::vector<const char*> cargv{"stochvar"};
  for (const auto& a : args) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  if (show_config) {
    std::cout << app.config_to_str(true, true);
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitInput;
  }
  if (s->parsed()) return cmd_simulate(sim, args);
  if (c->parsed()) return cmd_calibrate(cal, args);
  if (k->parsed()) return cmd_corr(corr, args);
  if (l->parsed()) return cmd_leverage(lev, args);
  if (g->parsed()) return cmd_gamma1(g1, args);
  if (r->parsed()) return cmd_relax(rx, args);
  if (p->parsed()) return cmd_replay(rp);
  return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const ExitStatus& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const FitFailure& e) {
    std::cerr << "fit failure: " << e.what() << '\n';
    return kExitFit;
  } catch (const InsufficientData& e) {
    std::cerr << "error: insufficient data: " << e.what() << '\n';
    return kExitInput;
  } catch (const ConstraintViolation& e) {
    std::cerr << "error: constraint violated (" << e.constraint() << "): " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
