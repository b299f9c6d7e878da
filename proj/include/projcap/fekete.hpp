#pragma once

// Fekete configurations, diameters of order s and transfinite-diameter
// estimates.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "projcap/geometry.hpp"
#include "projcap/measure.hpp"
#include "projcap/parallel.hpp"
#include "projcap/random.hpp"
#include "projcap/set_spec.hpp"

namespace projcap {

/// theta(X) = 1/(s(s-1)) sum_{i != j} -G(x_i, x_j); +inf on a coincident pair.
inline double theta_objective(std::span<const ProjectivePoint> pts) {
  const std::size_t s = pts.size();
  if (s < 2) throw Error(Errc::TooFewPoints, "theta needs at least two points");
  for (std::size_t i = 1; i < s; ++i) detail::require_same_dim(pts[0].dim(), pts[i].dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i + 1; j < s; ++j) acc += detail::neg_kernel_unit(pts[i], pts[j]);
  }
  return 2.0 * acc / (static_cast<double>(s) * static_cast<double>(s - 1));
}

struct FeketeOptions {
  std::size_t restarts = 8;
  std::size_t pool = 2000;
  std::size_t sweeps_max = 200;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  std::size_t refine_iters = 4000;
};

struct FeketeConfiguration {
  std::vector<ProjectivePoint> points;
  double theta = kInf;
  std::size_t s = 0;
  std::size_t restarts_used = 0;
  std::size_t sweeps = 0;
  double initial_theta = kInf;  // best theta among the random pool starts
};

namespace detail {

inline bool config_less(const std::vector<ProjectivePoint>& a, const std::vector<ProjectivePoint>& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (coords_less(a[i].coords(), b[i].coords())) return true;
    if (coords_less(b[i].coords(), a[i].coords())) return false;
  }
  return a.size() < b.size();
}

inline std::vector<ProjectivePoint> canonical_sorted(const std::vector<ProjectivePoint>& pts) {
  std::vector<ProjectivePoint> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(p.canonical());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return coords_less(a.coords(), b.coords()); });
  return out;
}

// Sum over i < j of -G; the Fekete objective before the 2/(s(s-1)) factor.
inline double pair_sum(std::span<const ProjectivePoint> pts) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) acc += neg_kernel_unit(pts[i], pts[j]);
  }
  return acc;
}

// Riemannian gradient of pair_sum with respect to each point. Returns false
// if some pair is coincident.
inline bool pair_sum_gradient(std::span<const ProjectivePoint> pts, std::vector<CVector>& grad) {
  const std::size_t s = pts.size();
  const std::size_t d = pts[0].coords().size();
  grad.assign(s, CVector(d, Complex{0.0, 0.0}));
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i + 1; j < s; ++j) {
      double s2 = wedge_norm_sq(pts[i].coords().data(), pts[j].coords().data(), d);
      if (s2 < kCoincidence * kCoincidence) return false;
      Complex a = inner(pts[j].coords(), pts[i].coords());
      for (std::size_t k = 0; k < d; ++k) {
        grad[i][k] += a * pts[j][k] / s2;
        grad[j][k] += std::conj(a) * pts[i][k] / s2;
      }
    }
  }
  for (std::size_t i = 0; i < s; ++i) {
    Complex c = inner(pts[i].coords(), grad[i]);
    for (std::size_t k = 0; k < d; ++k) grad[i][k] -= c * pts[i][k];
  }
  return true;
}

inline std::vector<ProjectivePoint> step_points(std::span<const ProjectivePoint> pts, const std::vector<CVector>& grad,
                                                double eta, const SetSpec& set) {
  std::vector<ProjectivePoint> out;
  out.reserve(pts.size());
  CVector v(pts[0].coords().size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = pts[i][k] - eta * grad[i][k];
    out.push_back(set.project(ProjectivePoint::from_homogeneous(v)));
  }
  return out;
}

// Projected gradient descent on the pair sum with an adaptive step. Only
// improving steps are taken.
inline double refine_configuration(std::vector<ProjectivePoint>& pts, const SetSpec& set, std::size_t max_iters,
                                   double tol) {
  double f = pair_sum(pts);
  if (!std::isfinite(f)) return f;
  std::vector<CVector> grad;
  double eta = -1.0;
  std::size_t quiet = 0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    if (!pair_sum_gradient(pts, grad)) break;
    double gmax = 0.0;
    for (const auto& g : grad) gmax = std::max(gmax, std::sqrt(norm_sq(g)));
    if (gmax < 1e-14) break;
    if (eta < 0.0) eta = 0.05 / gmax;
    bool moved = false;
    while (eta * gmax > 1e-15) {
      auto trial = step_points(pts, grad, eta, set);
      double ft = pair_sum(trial);
      if (ft < f) {
        double gain = f - ft;
        pts = std::move(trial);
        f = ft;
        eta *= 1.5;
        moved = true;
        quiet = gain <= tol * 1e-3 * std::max(std::abs(f), 1e-12) ? quiet + 1 : 0;
        break;
      }
      eta *= 0.5;
    }
    if (!moved || quiet >= 20) break;
  }
  return f;
}

struct RestartOutcome {
  std::vector<ProjectivePoint> points;
  double theta = kInf;
  double initial_theta = kInf;
  std::size_t sweeps = 0;
};

inline RestartOutcome fekete_restart(const SetSpec& set, std::size_t s, const FeketeOptions& opts, std::uint64_t seed) {
  auto pool = draw_pool(set, opts.pool, seed);
  if (pool.size() < s) throw Error(Errc::SamplerExhausted, "set sampler produced fewer than s distinct points");
  auto eng = stream_engine(seed, 0xfe4e7eull);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), eng);
  std::vector<ProjectivePoint> cfg;
  for (std::size_t i = 0; i < s; ++i) cfg.push_back(pool[order[i]]);

  const double norm = 2.0 / (static_cast<double>(s) * static_cast<double>(s - 1));
  const std::size_t P = pool.size();
  std::vector<double> K(P * s);
  auto fill_column = [&](std::size_t j) {
    for (std::size_t c = 0; c < P; ++c) K[c * s + j] = neg_kernel_unit(pool[c], cfg[j]);
  };
  for (std::size_t j = 0; j < s; ++j) fill_column(j);

  RestartOutcome out;
  double total = pair_sum(cfg);
  out.initial_theta = norm * total;
  double theta = out.initial_theta;
  std::vector<double> row(s);
  for (std::size_t sweep = 1; sweep <= opts.sweeps_max; ++sweep) {
    out.sweeps = sweep;
    const double before = theta;
    for (std::size_t i = 0; i < s; ++i) {
      double current = 0.0;
      for (std::size_t j = 0; j < s; ++j) {
        if (j != i) current += neg_kernel_unit(cfg[i], cfg[j]);
      }
      double best = current;
      std::size_t best_c = P;
      for (std::size_t c = 0; c < P; ++c) {
        double acc = 0.0;
        const double* k = &K[c * s];
        for (std::size_t j = 0; j < s; ++j) {
          if (j != i) acc += k[j];
        }
        if (acc < best) {
          best = acc;
          best_c = c;
        }
      }
      if (best_c < P && best < current - 1e-14 * std::abs(current)) {
        cfg[i] = pool[best_c];
        fill_column(i);
      }
    }
    if (set.has_projection()) refine_configuration(cfg, set, opts.refine_iters, opts.tol);
    total = pair_sum(cfg);
    theta = norm * total;
    if (set.has_projection()) {
      for (std::size_t j = 0; j < s; ++j) fill_column(j);
    }
    if (!(before - theta > opts.tol * std::max(std::abs(theta), 1e-12))) break;
  }
  out.points = std::move(cfg);
  out.theta = theta;
  return out;
}

}  // namespace detail

/// Local minimizer of theta over s points of the set: exchange moves against
/// a candidate pool plus projected gradient refinement (when the set has a
/// projection), best of several restarts. Deterministic for a given seed.
inline FeketeConfiguration fekete_solve(const SetSpec& set, std::size_t s, const FeketeOptions& opts = {}) {
  if (s < 2) throw Error(Errc::TooFewPoints, "Fekete problem needs s >= 2");
  if (opts.restarts == 0) throw Error(Errc::InvalidArgument, "need at least one restart");
  std::vector<detail::RestartOutcome> runs(opts.restarts);
  parallel_for(opts.restarts, [&](std::size_t r) {
    runs[r] = detail::fekete_restart(set, s, opts, derive_seed(opts.seed, 1000 + r));
  });
  FeketeConfiguration best;
  best.s = s;
  best.restarts_used = opts.restarts;
  std::vector<ProjectivePoint> best_pts;
  for (auto& run : runs) {
    best.initial_theta = std::min(best.initial_theta, run.initial_theta);
    auto pts = detail::canonical_sorted(run.points);
    double th = theta_objective(pts);
    if (best_pts.empty() || th < best.theta || (th == best.theta && detail::config_less(pts, best_pts))) {
      best.theta = th;
      best_pts = std::move(pts);
      best.sweeps = run.sweeps;
    }
  }
  best.points = std::move(best_pts);
  return best;
}

/// D_s = exp(-theta_s) from a solved configuration.
inline double diameter_of_order(const SetSpec& set, std::size_t s, const FeketeOptions& opts = {}) {
  return std::exp(-fekete_solve(set, s, opts).theta);
}

struct TransfiniteRow {
  std::size_t s = 0;
  double theta = 0.0;
  double D = 0.0;
  double D_monotone = 0.0;  // running minimum of D
  std::size_t restarts = 0;
  std::size_t sweeps = 0;
  double wall_ms = 0.0;
};

struct TransfiniteTable {
  std::vector<TransfiniteRow> rows;
  std::vector<FeketeConfiguration> configurations;
  std::vector<std::size_t> violations;  // s where D_s > D_{s_prev} + slack
  double limit = 0.0;                   // mean of the last three monotone values
  std::optional<double> capacity_gap;   // |limit - kappa_hat| when supplied
};

inline constexpr double kMonotoneSlack = 1e-6;

inline TransfiniteTable transfinite_estimate(const SetSpec& set, std::span<const std::size_t> s_list,
                                             const FeketeOptions& opts = {},
                                             std::optional<double> kappa_hat = std::nullopt) {
  if (s_list.empty()) throw Error(Errc::InvalidArgument, "empty s list");
  for (std::size_t k = 0; k < s_list.size(); ++k) {
    if (s_list[k] < 2 || s_list[k] > 200) throw Error(Errc::InvalidArgument, "s must lie in [2, 200]");
    if (k && s_list[k] <= s_list[k - 1]) throw Error(Errc::InvalidArgument, "s list must be increasing");
  }
  TransfiniteTable table;
  for (std::size_t s : s_list) {
    auto t0 = std::chrono::steady_clock::now();
    FeketeOptions o = opts;
    o.seed = derive_seed(opts.seed, s);
    auto cfg = fekete_solve(set, s, o);
    auto t1 = std::chrono::steady_clock::now();
    TransfiniteRow row;
    row.s = s;
    row.theta = cfg.theta;
    row.D = std::exp(-cfg.theta);
    row.restarts = cfg.restarts_used;
    row.sweeps = cfg.sweeps;
    row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (!table.rows.empty()) {
      const auto& prev = table.rows.back();
      if (row.D > prev.D + kMonotoneSlack) table.violations.push_back(s);
      row.D_monotone = std::min(row.D, prev.D_monotone);
    } else {
      row.D_monotone = row.D;
    }
    table.rows.push_back(row);
    table.configurations.push_back(std::move(cfg));
  }
  std::size_t tail = std::min<std::size_t>(3, table.rows.size());
  double acc = 0.0;
  for (std::size_t k = table.rows.size() - tail; k < table.rows.size(); ++k) acc += table.rows[k].D_monotone;
  table.limit = acc / static_cast<double>(tail);
  if (kappa_hat) table.capacity_gap = std::abs(table.limit - *kappa_hat);
  return table;
}

struct EquidistributionEntry {
  std::size_t s = 0;
  double discrepancy = 0.0;
  std::size_t test_points_used = 0;
};

/// max |G_{nu_s} - G_ref| over test points at geodesic distance >= 0.1 from
/// every Fekete point, where nu_s is uniform on the configuration.
inline std::vector<EquidistributionEntry> equidistribution_check(std::span<const FeketeConfiguration> configs,
                                                                 const DiscreteMeasure& reference,
                                                                 std::span<const ProjectivePoint> testpoints,
                                                                 double exclusion = 0.1) {
  std::vector<EquidistributionEntry> out;
  for (const auto& cfg : configs) {
    DiscreteMeasure nu = DiscreteMeasure::uniform(cfg.points);
    EquidistributionEntry e;
    e.s = cfg.s;
    for (const auto& t : testpoints) {
      bool far = true;
      for (const auto& a : cfg.points) far = far && geodesic_distance(t, a) >= exclusion;
      if (!far) continue;
      double gap = std::abs(potential(nu, t) - potential(reference, t));
      if (std::isnan(gap)) continue;
      e.discrepancy = std::max(e.discrepancy, gap);
      ++e.test_points_used;
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace projcap
