#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace stochvar {

/// SplitMix64 step; used only to derive seeds, never as a sampling engine.
inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of substream `index` under `master`. Depends only on (master, index),
/// so per-path streams are reproducible regardless of scheduling.
inline constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::uint64_t s = master ^ (0xD1B54A32D192ED03ULL * (index + 1));
  splitmix64(s);
  return splitmix64(s);
}

using Engine = std::mt19937_64;

/// Engine fully initialized from a 64-bit seed (all 312 state words are
/// filled through seed_seq, avoiding the weak single-word constructor).
inline Engine make_engine(std::uint64_t seed) {
  std::uint64_t s = seed;
  std::array<std::uint32_t, 8> words{};
  for (std::size_t i = 0; i < words.size(); i += 2) {
    const std::uint64_t w = splitmix64(s);
    words[i] = static_cast<std::uint32_t>(w);
    words[i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

/// Uniform on the open interval (0, 1), 53-bit resolution.
inline double open_uniform(Engine& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace stochvar
