#pragma once

// JSON serialization of reports. Every top-level document carries
// schema_version; non-finite numbers are written as null.

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stochvar/calibrate.hpp"
#include "stochvar/fit.hpp"
#include "stochvar/mle.hpp"
#include "stochvar/relax.hpp"

namespace stochvar::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json numbers(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

inline json to_json(const ExpFit& f) {
  return {{"a", number(f.a)}, {"gamma", number(f.gamma)}, {"r2", number(f.r2)},
          {"points", f.points}};
}

inline json to_json(const ExpOffsetFit& f) {
  return {{"a", number(f.a)},
          {"b", number(f.b)},
          {"lambda", number(f.lambda)},
          {"r2", number(f.r2)},
          {"points", f.points}};
}

template <class T>
json optional_json(const std::optional<T>& x) {
  return x ? to_json(*x) : json(nullptr);
}

inline json to_json(const CalibrationReport& r) {
  const auto& d = r.diagnostics;
  return {{"gamma", number(r.gamma)},
          {"theta", number(r.theta)},
          {"kappaM", number(r.kappaM)},
          {"kappaH", number(r.kappaH)},
          {"rhoM", number(r.rhoM)},
          {"rhoH", number(r.rhoH)},
          {"gammaL", number(r.gammaL)},
          {"A", number(r.A)},
          {"diagnostics",
           {{"corr_fit", optional_json(d.corr_fit)},
            {"cov_fit", optional_json(d.cov_fit)},
            {"leverage_fit", optional_json(d.leverage_fit)},
            {"leverage_rate_fixed", d.leverage_rate_fixed},
            {"leverage_amplitude_m", number(d.leverage_amplitude_m)},
            {"leverage_amplitude_h", number(d.leverage_amplitude_h)},
            {"samples", d.samples},
            {"source", d.source},
            {"failures", d.failures},
            {"constraint_flags", d.constraint_flags}}}};
}

inline json to_json(const MleReport& r) {
  const auto names = param_names(r.family);
  return {{"family", std::string(to_string(r.family))},
          {"params", {{std::string(names[0]), number(r.params[0])},
                      {std::string(names[1]), number(r.params[1])}}},
          {"ks", number(r.ks)},
          {"loglik", number(r.loglik)},
          {"n", r.n}};
}

inline json to_json(const SampleCumulants& c) {
  return {{"mean", number(c.mean)}, {"variance", number(c.variance)}, {"k3", number(c.k3)}};
}

inline json to_json(const RelaxationConfig& c) {
  return {{"rule", std::string(to_string(c.rule))},
          {"ks_threshold", c.ks_threshold},
          {"epsilon", c.epsilon},
          {"resolution", c.resolution},
          {"horizon", c.horizon},
          {"checkpoint_every", c.checkpoint_every},
          {"x0", c.x0},
          {"substeps", c.substeps},
          {"seed", c.seed}};
}

inline json to_json(const RelaxationExperiment& ex) {
  json fits = json::array();
  for (const auto& f : ex.fits) fits.push_back(to_json(f));
  json ranking = json::array();
  for (std::size_t i : ex.ranking) ranking.push_back(std::string(short_name(ex.fits[i].family)));
  return {{"gamma", ex.params.gamma},
          {"kappa2", ex.params.kappa2},
          {"config", to_json(ex.config)},
          {"sample_interval_days", ex.config.sample_interval(ex.params.gamma)},
          {"n_samples", ex.samples.size()},
          {"flagged", ex.flagged},
          {"unreliable", ex.unreliable},
          {"cumulants", to_json(ex.cumulants)},
          {"fits", fits},
          {"ks_ranking", ranking}};
}

inline json to_json(const ScalingTable& t) {
  json rows = json::array();
  for (std::size_t i = 0; i < t.gammas.size(); ++i)
    rows.push_back({{"gamma", t.gammas[i]},
                    {"cumulants", to_json(t.cumulants[i])},
                    {"flagged", t.flagged[i]}});
  return {{"rows", rows},
          {"slope_mean", number(t.slope_mean)},
          {"slope_variance", number(t.slope_variance)},
          {"slope_k3", number(t.slope_k3)}};
}

inline json to_json(const Gamma1Profile& p) {
  json rows = json::array();
  for (const auto& r : p.rows) {
    json row = {{"t", r.t}, {"fit", optional_json(r.fit)}};
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  json out = {{"rows", rows},
              {"offset_t_min", p.offset_t_min},
              {"offset_fit", optional_json(p.offset_fit)}};
  if (!p.offset_error.empty()) out["offset_error"] = p.offset_error;
  return out;
}

/// Top-level document: {"schema_version": 1, "kind": kind, ...body}.
inline json document(const std::string& kind, json body) {
  json doc = {{"schema_version", kSchemaVersion}, {"kind", kind}};
  for (auto& [k, v] : body.items()) doc[k] = v;
  return doc;
}

inline void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << doc.dump(2) << '\n';
}

inline json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path, 0);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

}  // namespace stochvar::io
