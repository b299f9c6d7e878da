#pragma once

// Evans-type measures on finite snapshots of polar sets: a probability
// measure mu_H = sum_{h<=H} 2^-h mu_{s_h} (renormalized) whose potential is
// pushed below -2^h level by level on E.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "projcap/chebyshev.hpp"
#include "projcap/geometry.hpp"
#include "projcap/measure.hpp"
#include "projcap/random.hpp"
#include "projcap/sampling.hpp"
#include "projcap/set_spec.hpp"

namespace projcap {

struct EvansOptions {
  std::size_t s_max = 64;
  std::uint64_t seed = 0;
  ChebyshevOptions chebyshev;  // seed is overridden per s
};

struct ChebyshevConfiguration {
  std::vector<ProjectivePoint> points;  // repetition allowed
  double level_value = 0.0;             // inf over E of (1/s) sum -G(z, x_j)
  double best_sup = 0.0;
  bool half_sup_ok = false;
};

/// s points of E maximizing the inner infimum over E (the solver's best sup).
inline ChebyshevConfiguration chebyshev_configuration(const std::vector<ProjectivePoint>& E, std::size_t s,
                                                      const EvansOptions& opts = {}) {
  if (E.empty()) throw Error(Errc::EmptySet, "snapshot has no points");
  auto set = sets::finite(E, "snapshot");
  ChebyshevOptions co = opts.chebyshev;
  co.seed = derive_seed(opts.seed, s);
  auto r = chebyshev_value(set, s, co);
  ChebyshevConfiguration c;
  c.points = r.maximizer_points;
  c.level_value = inner_infimum(c.points, E).first;
  c.best_sup = r.M;
  c.half_sup_ok = c.level_value >= 0.5 * c.best_sup;
  return c;
}

struct EvansLevel {
  std::size_t h = 0;
  std::size_t s_h = 0;
  double bound = 0.0;  // max over E of G_{mu_{s_h}}
  bool by_coincidence = false;
};

struct EvansCertificate {
  std::vector<EvansLevel> levels;
  std::size_t H = 0;
  double raw_mass = 0.0;      // sum_{h<=H} 2^-h
  double on_set_max_raw = 0.0;
  double on_set_max = 0.0;    // renormalized measure
  std::size_t atom_points = 0;
  std::size_t non_atom_points = 0;
  std::optional<double> non_atom_max;  // renormalized potential at non-atom points of E
  double off_set_margin = 0.0;         // min over grid of G_mu - log d(., E)
  std::size_t grid_size = 0;
  double grid_min_distance = 0.0;
};

namespace detail {

inline double distance_to_set(const ProjectivePoint& z, const std::vector<ProjectivePoint>& E) {
  double d = kInf;
  for (const auto& e : E) d = std::min(d, geodesic_distance(z, e));
  return d;
}

inline bool is_atom(const DiscreteMeasure& mu, const ProjectivePoint& z) {
  for (const auto& a : mu.atoms()) {
    if (sine_sq_unit(a, z) < kCoincidence * kCoincidence) return true;
  }
  return false;
}

}  // namespace detail

/// Test grid around E: half FS samples of the ambient space kept at distance
/// >= delta_min from E, half points on geodesics leaving the points of E at
/// log-spaced distances in [delta_min, 0.5].
inline std::vector<ProjectivePoint> offset_grid(const std::vector<ProjectivePoint>& E, std::size_t count,
                                                std::uint64_t seed, double delta_min = 1e-3) {
  if (E.empty()) throw Error(Errc::EmptySet, "snapshot has no points");
  const std::size_t n = E.front().dim();
  std::vector<ProjectivePoint> out;
  auto eng = stream_engine(seed, 0x9e1d);
  const std::size_t near = count / 2;
  for (std::size_t k = 0; k < near; ++k) {
    const auto& e = E[k % E.size()];
    double t = near > 1 ? static_cast<double>(k) / static_cast<double>(near - 1) : 0.0;
    // a little above delta_min so that rounding never lands inside
    double dist = 1.01 * delta_min * std::pow(0.5 / (1.01 * delta_min), t);
    CVector v;
    for (;;) {
      ProjectivePoint g = draw_fs(n, eng);
      if (detail::split_from_center(e, g, v) > 1e-8) break;
    }
    ProjectivePoint p = detail::combine(e, v, std::sin(dist * kInvSqrt2));
    if (detail::distance_to_set(p, E) >= delta_min) out.push_back(std::move(p));
  }
  while (out.size() < count) {
    ProjectivePoint p = draw_fs(n, eng);
    if (detail::distance_to_set(p, E) >= delta_min) out.push_back(std::move(p));
  }
  return out;
}

/// Fills the off-set part of `cert`: C_hat = min over the grid of
/// G_mu(z) - log d(z, E). Throws GridTooClose for grid points within delta_min.
inline EvansCertificate evans_verify(const DiscreteMeasure& mu, const std::vector<ProjectivePoint>& E,
                                     const std::vector<ProjectivePoint>& grid, EvansCertificate cert = {},
                                     double delta_min = 1e-3) {
  if (E.empty()) throw Error(Errc::EmptySet, "snapshot has no points");
  if (grid.empty()) throw Error(Errc::InvalidArgument, "empty grid");
  std::vector<double> margin(grid.size()), dist(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    dist[i] = detail::distance_to_set(grid[i], E);
    if (dist[i] < delta_min) return;
    margin[i] = potential(mu, grid[i]) - std::log(dist[i]);
  });
  double c_hat = kInf, dmin = kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (dist[i] < delta_min) throw Error(Errc::GridTooClose, "grid point within delta_min of the set");
    c_hat = std::min(c_hat, margin[i]);
    dmin = std::min(dmin, dist[i]);
  }
  cert.off_set_margin = c_hat;
  cert.grid_size = grid.size();
  cert.grid_min_distance = dmin;

  cert.atom_points = 0;
  cert.non_atom_points = 0;
  cert.non_atom_max.reset();
  cert.on_set_max = kNegInf;
  for (const auto& e : E) {
    double g = potential(mu, e);
    cert.on_set_max = std::max(cert.on_set_max, g);
    if (detail::is_atom(mu, e)) {
      ++cert.atom_points;
    } else {
      ++cert.non_atom_points;
      cert.non_atom_max = std::max(cert.non_atom_max.value_or(kNegInf), g);
    }
  }
  return cert;
}

struct EvansResult {
  DiscreteMeasure measure;
  EvansCertificate certificate;
};

/// Level h uses the smallest s in {1, 2, 4, ..., s_max} whose Chebyshev
/// configuration pushes max_E G below -2^h.
inline EvansResult evans_construct(const std::vector<ProjectivePoint>& E, std::size_t H,
                                   const std::vector<ProjectivePoint>& grid, const EvansOptions& opts = {}) {
  if (E.empty()) throw Error(Errc::EmptySet, "snapshot has no points");
  if (H < 1 || H > 30) throw Error(Errc::InvalidArgument, "truncation depth must lie in [1, 30]");
  struct Candidate {
    std::size_t s;
    DiscreteMeasure mu;
    double bound;
  };
  std::deque<Candidate> cache;
  auto level_measure = [&](std::size_t s) -> const Candidate& {
    for (const auto& c : cache) {
      if (c.s == s) return c;
    }
    auto cfg = chebyshev_configuration(E, s, opts);
    DiscreteMeasure mu = DiscreteMeasure::uniform(cfg.points);
    double b = kNegInf;
    for (const auto& e : E) b = std::max(b, potential(mu, e));
    cache.push_back({s, std::move(mu), b});
    return cache.back();
  };

  std::vector<ProjectivePoint> atoms;
  std::vector<double> weights;
  EvansCertificate cert;
  cert.H = H;
  for (std::size_t h = 1; h <= H; ++h) {
    const double target = -std::ldexp(1.0, static_cast<int>(h));
    std::optional<std::size_t> chosen;
    double best = kInf;
    for (std::size_t s = 1; s <= opts.s_max; s *= 2) {
      const auto& c = level_measure(s);
      best = std::min(best, c.bound);
      if (c.bound <= target) {
        chosen = s;
        break;
      }
    }
    if (!chosen)
      throw Error(Errc::LevelUnreachable, "level " + std::to_string(h) + " unreachable; best max potential " +
                                              std::to_string(best));
    const auto& c = level_measure(*chosen);
    const double scale = std::ldexp(1.0, -static_cast<int>(h));
    for (std::size_t i = 0; i < c.mu.size(); ++i) {
      atoms.push_back(c.mu.atoms()[i]);
      weights.push_back(scale * c.mu.weights()[i]);
    }
    cert.levels.push_back({h, *chosen, c.bound, c.bound == kNegInf});
    cert.raw_mass += scale;
  }
  DiscreteMeasure raw(atoms, weights);
  cert.on_set_max_raw = kNegInf;
  for (const auto& e : E) cert.on_set_max_raw = std::max(cert.on_set_max_raw, potential(raw, e));
  DiscreteMeasure mu = raw.scaled(1.0 / cert.raw_mass);
  cert = evans_verify(mu, E, grid, std::move(cert));
  return {std::move(mu), std::move(cert)};
}

}  // namespace projcap
