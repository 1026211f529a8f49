#pragma once

// Binary ensemble file, little-endian:
//
//   offset  size  field
//   0       8     magic "SVENSMBL"
//   8       4     version (uint32) = 1
//   12      4     flags (uint32): bit 0 = returns present
//   16      8     n_paths (uint64)
//   24      8     steps (uint64)
//   32      8     dt (float64)
//   40      8     seed (uint64)
//   48      ...   per path: initial v (float64), steps x v (float64),
//                 then steps x dx (float64) if bit 0 is set

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "stochvar/error.hpp"
#include "stochvar/simulate.hpp"

namespace stochvar::io {

inline constexpr char kEnsembleMagic[8] = {'S', 'V', 'E', 'N', 'S', 'M', 'B', 'L'};
inline constexpr std::uint32_t kEnsembleVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "ensemble files are written in native little-endian order");

struct EnsembleFile {
  std::uint64_t n_paths = 0;
  std::uint64_t steps = 0;
  double dt = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> initial;
  std::vector<std::vector<double>> v;
  std::vector<std::vector<double>> dx;  // empty unless returns were stored
};

namespace detail {
template <class T>
void put(std::ofstream& out, const T& x) {
  out.write(reinterpret_cast<const char*>(&x), sizeof x);
}
template <class T>
T get(std::ifstream& in, const std::string& path) {
  T x{};
  if (!in.read(reinterpret_cast<char*>(&x), sizeof x))
    throw ParseError(path + ": truncated ensemble file", 0);
  return x;
}
inline void put_vec(std::ofstream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}
}  // namespace detail

inline void write_ensemble(const std::string& path, const Ensemble& ens) {
  if (ens.paths.empty()) throw DomainError("write_ensemble: empty ensemble");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  const SimConfig& cfg = ens.paths.front().config;
  out.write(kEnsembleMagic, 8);
  detail::put(out, kEnsembleVersion);
  detail::put(out, std::uint32_t{0});
  detail::put(out, static_cast<std::uint64_t>(ens.paths.size()));
  detail::put(out, static_cast<std::uint64_t>(cfg.steps));
  detail::put(out, cfg.dt);
  detail::put(out, ens.master_seed);
  for (const auto& p : ens.paths) {
    detail::put(out, p.initial);
    detail::put_vec(out, p.values);
  }
}

inline void write_ensemble(const std::string& path, const JointEnsemble& ens) {
  if (ens.paths.empty()) throw DomainError("write_ensemble: empty ensemble");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  const SimConfig& cfg = ens.paths.front().variance.config;
  out.write(kEnsembleMagic, 8);
  detail::put(out, kEnsembleVersion);
  detail::put(out, std::uint32_t{1});
  detail::put(out, static_cast<std::uint64_t>(ens.paths.size()));
  detail::put(out, static_cast<std::uint64_t>(cfg.steps));
  detail::put(out, cfg.dt);
  detail::put(out, ens.master_seed);
  for (const auto& p : ens.paths) {
    detail::put(out, p.variance.initial);
    detail::put_vec(out, p.variance.values);
    detail::put_vec(out, p.returns);
  }
}

inline EnsembleFile read_ensemble(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path, 0);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kEnsembleMagic, 8) != 0)
    throw ParseError(path + ": not an ensemble file (bad magic)", 0);
  const auto version = detail::get<std::uint32_t>(in, path);
  if (version != kEnsembleVersion)
    throw ParseError(path + ": unsupported ensemble version " + std::to_string(version), 0);
  const auto flags = detail::get<std::uint32_t>(in, path);
  EnsembleFile f;
  f.n_paths = detail::get<std::uint64_t>(in, path);
  f.steps = detail::get<std::uint64_t>(in, path);
  f.dt = detail::get<double>(in, path);
  f.seed = detail::get<std::uint64_t>(in, path);
  auto read_vec = [&](std::vector<double>& v) {
    v.resize(f.steps);
    if (!in.read(reinterpret_cast<char*>(v.data()),
                 static_cast<std::streamsize>(f.steps * sizeof(double))))
      throw ParseError(path + ": truncated ensemble file", 0);
  };
  f.initial.resize(f.n_paths);
  f.v.resize(f.n_paths);
  if (flags & 1u) f.dx.resize(f.n_paths);
  for (std::uint64_t i = 0; i < f.n_paths; ++i) {
    f.initial[i] = detail::get<double>(in, path);
    read_vec(f.v[i]);
    if (flags & 1u) read_vec(f.dx[i]);
  }
  return f;
}

}  // namespace stochvar::io
