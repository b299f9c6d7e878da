#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace projcap {

using Engine = std::mt19937_64;

/// Independent engine for the pair (seed, stream). Used for per-index draws
/// and per-chunk Monte-Carlo streams.
inline Engine stream_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  return Engine(seq);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  auto eng = stream_engine(seed, salt ^ 0xa5a5a5a5a5a5a5a5ull);
  return eng();
}

inline double uniform01(Engine& eng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(eng);
}

// Standard complex Gaussian (independent N(0,1) real and imaginary parts).
inline std::complex<double> complex_gaussian(Engine& eng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  double re = normal(eng);
  double im = normal(eng);
  return {re, im};
}

}  // namespace projcap
