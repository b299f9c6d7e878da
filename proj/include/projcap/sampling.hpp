#pragma once

// Fubini-Study sampling and Monte-Carlo energy estimation.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "projcap/geometry.hpp"
#include "projcap/measure.hpp"
#include "projcap/parallel.hpp"
#include "projcap/random.hpp"

namespace projcap {

/// Pairs per Monte-Carlo chunk. Every chunk owns an engine derived from
/// (seed, chunk index) and chunks are reduced in index order.
inline constexpr std::size_t kChunkSize = 4096;

/// FS-uniform point: a normalized standard complex Gaussian vector.
inline ProjectivePoint draw_fs(std::size_t n, Engine& eng) {
  CVector v(n + 1);
  for (;;) {
    for (auto& c : v) c = complex_gaussian(eng);
    if (detail::norm_sq(v) > 1e-200) return ProjectivePoint::from_homogeneous(v);
  }
}

struct MeasureSampler {
  std::size_t n = 1;
  std::string description;
  std::function<ProjectivePoint(Engine&)> draw;

  ProjectivePoint at(std::uint64_t seed, std::uint64_t index) const {
    auto eng = stream_engine(seed, index);
    return draw(eng);
  }
};

inline MeasureSampler fs_sampler(std::size_t n) {
  return {n, "fubini-study(n=" + std::to_string(n) + ")", [n](Engine& eng) { return draw_fs(n, eng); }};
}

inline MeasureSampler dirac_sampler(ProjectivePoint a) {
  std::size_t n = a.dim();
  return {n, "dirac", [a = std::move(a)](Engine&) { return a; }};
}

/// N FS-uniform points on P^n; point i depends only on (seed, i).
inline std::vector<ProjectivePoint> sample_fs(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (n < 1) throw Error(Errc::InvalidArgument, "dimension must be at least 1");
  std::vector<std::optional<ProjectivePoint>> slots(count);
  parallel_for(count, [&](std::size_t i) {
    auto eng = stream_engine(seed, i);
    slots[i] = draw_fs(n, eng);
  });
  std::vector<ProjectivePoint> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Mean of a per-draw value over `count` accepted draws. `draw` returns
/// nullopt for a rejected draw. A chunk gives up once its rejections exceed
/// its quota; if more than half of all attempts are rejected the estimate is
/// reported as +inf.
template <class Draw>
EnergyEstimate mc_mean(std::size_t count, std::uint64_t seed, Draw&& draw) {
  struct Partial {
    double sum = 0.0;
    double sumsq = 0.0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
  };
  const std::size_t chunks = (count + kChunkSize - 1) / kChunkSize;
  std::vector<Partial> parts(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    auto eng = stream_engine(seed, c);
    const std::size_t quota = std::min(kChunkSize, count - c * kChunkSize);
    Partial& p = parts[c];
    while (p.accepted < quota && p.rejected <= quota) {
      std::optional<double> v = draw(eng);
      if (!v) {
        ++p.rejected;
        continue;
      }
      p.sum += *v;
      p.sumsq += *v * *v;
      ++p.accepted;
    }
  });
  Partial total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sumsq += p.sumsq;
    total.accepted += p.accepted;
    total.rejected += p.rejected;
  }
  EnergyEstimate est;
  est.samples = total.accepted;
  est.rejected = total.rejected;
  if (total.accepted < 2 || total.rejected * 2 > total.accepted + total.rejected) {
    est.value = kInf;
    est.stderr_value = kInf;
    return est;
  }
  const double n = static_cast<double>(total.accepted);
  const double mean = total.sum / n;
  const double var = std::max(0.0, (total.sumsq - n * mean * mean) / (n - 1.0));
  est.value = mean;
  est.stderr_value = std::sqrt(var / n);
  return est;
}

/// Monte-Carlo I(mu) for a sampled measure: mean of -G over N independent
/// pairs. Coincident draws (sigma < 1e-14) are rejected and redrawn.
inline EnergyEstimate mc_energy(const MeasureSampler& sampler, std::size_t pairs, std::uint64_t seed) {
  if (pairs < 2) throw Error(Errc::InvalidArgument, "need at least two pairs");
  return mc_mean(pairs, seed, [&](Engine& eng) -> std::optional<double> {
    ProjectivePoint a = sampler.draw(eng);
    ProjectivePoint b = sampler.draw(eng);
    double c = detail::neg_kernel_unit(a, b);
    if (c == kInf) return std::nullopt;
    return c;
  });
}

}  // namespace projcap
