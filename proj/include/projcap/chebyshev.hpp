#pragma once

// Chebyshev constants of order s:
//   M_s(K) = sup_{x_1..x_s in K} inf_{z in K} (1/s) sum_j -G(z, x_j).
// The outer sup runs over a candidate pool by exchange moves; the inner inf
// is a minimum over an adversarial pool that grows with locally refined
// minimizers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "projcap/fekete.hpp"
#include "projcap/geometry.hpp"
#include "projcap/parallel.hpp"
#include "projcap/random.hpp"
#include "projcap/set_spec.hpp"

namespace projcap {

struct ChebyshevOptions {
  std::size_t outer_pool = 400;
  std::size_t inner_pool = 2000;
  std::size_t restarts = 4;
  std::size_t sweeps_max = 30;
  double tol = 1e-3;  // declared accuracy of M_s, enters the inequality slack
  std::uint64_t seed = 0;
  std::vector<ProjectivePoint> initial;  // optional warm start, s points
};

struct ChebyshevResult {
  std::size_t s = 0;
  double M = 0.0;
  std::vector<ProjectivePoint> maximizer_points;
  std::optional<ProjectivePoint> witness;  // inner minimizer
  std::size_t outer_pool_used = 0;
  std::size_t inner_pool_used = 0;
  std::size_t sweeps = 0;
};

/// inf over `inner` of (1/s) sum_j -G(z, x_j); +inf if every z coincides
/// with some x_j. Returns the value and the index of the minimizer.
inline std::pair<double, std::size_t> inner_infimum(std::span<const ProjectivePoint> config,
                                                    std::span<const ProjectivePoint> inner) {
  double best = kInf;
  std::size_t arg = 0;
  for (std::size_t z = 0; z < inner.size(); ++z) {
    double acc = 0.0;
    for (const auto& x : config) acc += detail::neg_kernel_unit(inner[z], x);
    double v = acc / static_cast<double>(config.size());
    if (v < best) {
      best = v;
      arg = z;
    }
  }
  return {best, arg};
}

namespace detail {

// Projected gradient descent for z -> (1/s) sum_j -G(z, x_j) on the set.
inline ProjectivePoint minimize_potential_point(ProjectivePoint z, std::span<const ProjectivePoint> config,
                                                const SetSpec& set, std::size_t iters = 300) {
  const double inv_s = 1.0 / static_cast<double>(config.size());
  auto value = [&](const ProjectivePoint& p) {
    double acc = 0.0;
    for (const auto& x : config) acc += neg_kernel_unit(p, x);
    return acc * inv_s;
  };
  double f = value(z);
  if (!std::isfinite(f)) return z;
  const std::size_t d = z.coords().size();
  CVector g(d), v(d);
  double eta = -1.0;
  for (std::size_t it = 0; it < iters; ++it) {
    std::fill(g.begin(), g.end(), Complex{0.0, 0.0});
    for (const auto& x : config) {
      double s2 = wedge_norm_sq(z.coords().data(), x.coords().data(), d);
      Complex a = inner(x.coords(), z.coords());
      for (std::size_t k = 0; k < d; ++k) g[k] += a * x[k] / s2;
    }
    Complex c = inner(z.coords(), g);
    for (std::size_t k = 0; k < d; ++k) g[k] = (g[k] - c * z[k]) * inv_s;
    double gn = std::sqrt(norm_sq(g));
    if (gn < 1e-13) break;
    if (eta < 0.0) eta = 0.05 / gn;
    bool moved = false;
    while (eta * gn > 1e-15) {
      for (std::size_t k = 0; k < d; ++k) v[k] = z[k] - eta * g[k];
      ProjectivePoint t = set.project(ProjectivePoint::from_homogeneous(v));
      double ft = value(t);
      if (ft < f) {
        z = std::move(t);
        f = ft;
        eta *= 1.5;
        moved = true;
        break;
      }
      eta *= 0.5;
    }
    if (!moved) break;
  }
  return z;
}

// Random tangent perturbation of x with geodesic step of order `radius`.
inline ProjectivePoint perturb(const ProjectivePoint& x, double radius, Engine& eng, const SetSpec& set) {
  const std::size_t d = x.coords().size();
  CVector v(d);
  for (auto& c : v) c = complex_gaussian(eng);
  Complex a = inner(x.coords(), v);
  for (std::size_t k = 0; k < d; ++k) v[k] -= a * x[k];
  double vn = std::sqrt(norm_sq(v));
  for (std::size_t k = 0; k < d; ++k) v[k] = x[k] + radius * v[k] / vn;
  return set.project(ProjectivePoint::from_homogeneous(v));
}

class ChebyshevSearch {
 public:
  ChebyshevSearch(const SetSpec& set, std::size_t s, std::vector<ProjectivePoint> outer,
                  std::vector<ProjectivePoint> inner)
      : set_(set), s_(s), outer_(std::move(outer)), inner_(std::move(inner)) {
    cols_.resize(outer_.size());
    for (std::size_t c = 0; c < outer_.size(); ++c) fill_column(c);
  }

  void start(std::vector<std::size_t> config) {
    config_ = std::move(config);
    fin_.assign(inner_.size(), 0.0);
    cnt_.assign(inner_.size(), 0);
    for (std::size_t j : config_) add_column(j, +1);
  }

  // One sweep of exchange moves; returns true if anything changed.
  bool exchange_pass() {
    bool changed = false;
    for (std::size_t pos = 0; pos < s_; ++pos) {
      auto [f0, pen0] = score_current();
      if (f0 == kInf) return changed;
      const std::size_t old = config_[pos];
      std::size_t best_c = old;
      double best_f = f0, best_pen = pen0;
      for (std::size_t c = 0; c < outer_.size(); ++c) {
        if (c == old) continue;
        auto [f, pen] = score_swap(old, c, best_f);
        if (better(f, pen, best_f, best_pen)) {
          best_f = f;
          best_pen = pen;
          best_c = c;
        }
      }
      if (best_c != old) {
        add_column(old, -1);
        add_column(best_c, +1);
        config_[pos] = best_c;
        changed = true;
      }
    }
    return changed;
  }

  // Adds locally refined minimizers of the inner problem to the inner pool.
  void refine_inner(std::size_t starts = 3) {
    if (!set_.has_projection()) return;
    std::vector<std::size_t> order(inner_.size());
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + std::min(starts, order.size()), order.end(),
                      [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
    auto pts = config_points();
    for (std::size_t k = 0; k < std::min(starts, order.size()); ++k) {
      if (value(order[k]) == kInf) break;
      add_inner(minimize_potential_point(inner_[order[k]], pts, set_));
    }
  }

  // Tries continuous moves of the configuration points.
  bool refine_outer(Engine& eng) {
    if (!set_.has_projection()) return false;
    bool changed = false;
    for (std::size_t pos = 0; pos < s_; ++pos) {
      for (double radius : {0.05, 0.01, 0.002}) {
        for (int trial = 0; trial < 4; ++trial) {
          auto [f0, pen0] = score_current();
          if (f0 == kInf) return changed;
          ProjectivePoint cand = perturb(outer_[config_[pos]], radius, eng, set_);
          std::vector<double> col(inner_.size());
          for (std::size_t z = 0; z < inner_.size(); ++z) col[z] = neg_kernel_unit(inner_[z], cand);
          auto [f, pen] = score_with(config_[pos], col, f0);
          if (better(f, pen, f0, pen0)) {
            outer_.push_back(std::move(cand));
            cols_.push_back(std::move(col));
            std::size_t c = outer_.size() - 1;
            add_column(config_[pos], -1);
            add_column(c, +1);
            config_[pos] = c;
            changed = true;
          }
        }
      }
    }
    return changed;
  }

  std::vector<ProjectivePoint> config_points() const {
    std::vector<ProjectivePoint> pts;
    for (std::size_t j : config_) pts.push_back(outer_[j]);
    return pts;
  }

  double current_value() const { return score_current().first; }
  std::size_t outer_size() const { return outer_.size(); }
  std::size_t inner_size() const { return inner_.size(); }
  const std::vector<ProjectivePoint>& inner_points() const { return inner_; }

 private:
  static constexpr double kPenaltyWidth = 0.05;

  static bool better(double f, double pen, double bf, double bpen) {
    if (f == kInf) return bf != kInf;
    if (bf == kInf) return false;
    double eps = 1e-12 * (1.0 + std::abs(bf));
    if (f > bf + eps) return true;
    if (f < bf - eps) return false;
    return pen < bpen * (1.0 - 1e-9) - 1e-300;
  }

  double value(std::size_t z) const { return cnt_[z] ? kInf : fin_[z] / static_cast<double>(s_); }

  void fill_column(std::size_t c) {
    cols_[c].resize(inner_.size());
    for (std::size_t z = 0; z < inner_.size(); ++z) cols_[c][z] = neg_kernel_unit(inner_[z], outer_[c]);
  }

  void add_column(std::size_t c, int sign) {
    const auto& col = cols_[c];
    for (std::size_t z = 0; z < inner_.size(); ++z) {
      if (col[z] == kInf) {
        cnt_[z] = static_cast<std::size_t>(static_cast<long>(cnt_[z]) + sign);
      } else {
        fin_[z] += sign * col[z];
      }
    }
  }

  void add_inner(ProjectivePoint p) {
    inner_.push_back(std::move(p));
    const auto& z = inner_.back();
    double fin = 0.0;
    std::size_t cnt = 0;
    for (std::size_t c = 0; c < outer_.size(); ++c) cols_[c].push_back(neg_kernel_unit(z, outer_[c]));
    for (std::size_t j : config_) {
      double v = cols_[j].back();
      if (v == kInf) {
        ++cnt;
      } else {
        fin += v;
      }
    }
    fin_.push_back(fin);
    cnt_.push_back(cnt);
  }

  std::pair<double, double> score_current() const {
    double f = kInf;
    for (std::size_t z = 0; z < inner_.size(); ++z) f = std::min(f, value(z));
    return {f, penalty(f, [&](std::size_t z) { return value(z); })};
  }

  template <class V>
  double penalty(double f, V&& val) const {
    if (f == kInf) return 0.0;
    double pen = 0.0;
    for (std::size_t z = 0; z < inner_.size(); ++z) {
      double v = val(z);
      if (v != kInf) pen += std::exp(-(v - f) / kPenaltyWidth);
    }
    return pen;
  }

  // Score after replacing column `old` by `col`. The penalty is evaluated
  // only when the minimum ties or beats `bar`.
  std::pair<double, double> score_with(std::size_t old, const std::vector<double>& col, double bar) const {
    const auto& oc = cols_[old];
    const double inv_s = 1.0 / static_cast<double>(s_);
    auto val = [&](std::size_t z) {
      std::size_t cnt = cnt_[z] - (oc[z] == kInf ? 1 : 0) + (col[z] == kInf ? 1 : 0);
      if (cnt) return kInf;
      double fin = fin_[z] - (oc[z] == kInf ? 0.0 : oc[z]) + (col[z] == kInf ? 0.0 : col[z]);
      return fin * inv_s;
    };
    double f = kInf;
    for (std::size_t z = 0; z < inner_.size(); ++z) {
      f = std::min(f, val(z));
      if (bar != kInf && f < bar - 1e-12 * (1.0 + std::abs(bar))) return {f, kInf};
    }
    return {f, penalty(f, val)};
  }

  std::pair<double, double> score_swap(std::size_t old, std::size_t c, double bar) const {
    return score_with(old, cols_[c], bar);
  }

  const SetSpec& set_;
  std::size_t s_;
  std::vector<ProjectivePoint> outer_;
  std::vector<ProjectivePoint> inner_;
  std::vector<std::vector<double>> cols_;  // cols_[c][z] = -G(inner z, outer c)
  std::vector<std::size_t> config_;
  std::vector<double> fin_;
  std::vector<std::size_t> cnt_;
};

}  // namespace detail

inline ChebyshevResult chebyshev_value(const SetSpec& set, std::size_t s, const ChebyshevOptions& opts = {}) {
  if (s < 1) throw Error(Errc::InvalidArgument, "Chebyshev order must be at least 1");
  if (opts.restarts == 0) throw Error(Errc::InvalidArgument, "need at least one restart");
  if (!opts.initial.empty() && opts.initial.size() != s)
    throw Error(Errc::InvalidArgument, "warm start must have exactly s points");

  struct Run {
    double M = -kInf;
    std::vector<ProjectivePoint> config;
    std::optional<ProjectivePoint> witness;
    std::size_t outer = 0, inner = 0, sweeps = 0;
  };
  std::vector<Run> runs(opts.restarts);
  auto inner_base = draw_pool(set, opts.inner_pool, derive_seed(opts.seed, 7));
  if (inner_base.empty()) throw Error(Errc::SamplerExhausted, "set sampler produced no points");

  parallel_for(opts.restarts, [&](std::size_t r) {
    const std::uint64_t rs = derive_seed(opts.seed, 100 + r);
    auto outer = draw_pool(set, opts.outer_pool, rs);
    if (outer.empty()) throw Error(Errc::SamplerExhausted, "set sampler produced no points");
    auto eng = stream_engine(rs, 0xc4eb);
    std::vector<std::size_t> start(s);
    if (!opts.initial.empty() && r == 0) {
      for (std::size_t j = 0; j < s; ++j) {
        outer.push_back(opts.initial[j]);
        start[j] = outer.size() - 1;
      }
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, outer.size() - 1);
      for (auto& j : start) j = pick(eng);
    }
    detail::ChebyshevSearch search(set, s, std::move(outer), inner_base);
    search.start(std::move(start));
    Run& run = runs[r];
    for (std::size_t sweep = 1; sweep <= opts.sweeps_max; ++sweep) {
      run.sweeps = sweep;
      bool changed = search.exchange_pass();
      search.refine_inner();
      changed = search.refine_outer(eng) || changed;
      search.refine_inner();
      if (!changed) break;
    }
    run.config = search.config_points();
    auto [M, arg] = inner_infimum(run.config, search.inner_points());
    run.M = M;
    run.witness = search.inner_points()[arg];
    run.outer = search.outer_size();
    run.inner = search.inner_size();
  });

  ChebyshevResult best;
  best.s = s;
  best.M = -kInf;
  std::vector<ProjectivePoint> best_cfg;
  for (auto& run : runs) {
    auto cfg = detail::canonical_sorted(run.config);
    if (best_cfg.empty() || run.M > best.M || (run.M == best.M && detail::config_less(cfg, best_cfg))) {
      best.M = run.M;
      best_cfg = std::move(cfg);
      best.witness = run.witness;
      best.outer_pool_used = run.outer;
      best.inner_pool_used = run.inner;
      best.sweeps = run.sweeps;
    }
  }
  best.maximizer_points = std::move(best_cfg);
  return best;
}

/// 3x the larger of the two declared solver tolerances.
inline double solver_slack(const FeketeOptions& fekete, const ChebyshevOptions& cheb) {
  return 3.0 * std::max(fekete.tol, cheb.tol);
}

struct SuperadditivityReport {
  std::size_t s = 0, t = 0;
  double M_s = 0.0, M_t = 0.0, M_st = 0.0;
  double residual = 0.0;  // (s+t) M_{s+t} - s M_s - t M_t
  double epsilon = 0.0;
  bool passed = false;
};

/// The (s+t) search is warm-started from the union of the s and t
/// maximizers, so it begins no worse than the superadditive combination.
inline SuperadditivityReport chebyshev_superadditivity_check(const SetSpec& set, std::size_t s, std::size_t t,
                                                             const ChebyshevOptions& opts = {},
                                                             const FeketeOptions& fopts = {}) {
  if (s < 1 || t < 1) throw Error(Errc::InvalidArgument, "orders must be at least 1");
  auto rs = chebyshev_value(set, s, opts);
  auto rt = chebyshev_value(set, t, opts);
  ChebyshevOptions warm = opts;
  warm.initial = rs.maximizer_points;
  warm.initial.insert(warm.initial.end(), rt.maximizer_points.begin(), rt.maximizer_points.end());
  auto rst = chebyshev_value(set, s + t, warm);
  SuperadditivityReport rep;
  rep.s = s;
  rep.t = t;
  rep.M_s = rs.M;
  rep.M_t = rt.M;
  rep.M_st = rst.M;
  const double ds = static_cast<double>(s), dt = static_cast<double>(t);
  rep.residual = (ds + dt) * rst.M - ds * rs.M - dt * rt.M;
  if (std::isnan(rep.residual)) rep.residual = rst.M == kInf ? kInf : -kInf;
  rep.epsilon = solver_slack(fopts, opts);
  rep.passed = rep.residual >= -rep.epsilon;
  return rep;
}

struct ThetaChebyshevReport {
  std::size_t s = 0;
  double theta = 0.0;
  double M = 0.0;
  double gap = 0.0;  // M - theta
  double epsilon = 0.0;
  bool passed = false;
};

inline ThetaChebyshevReport theta_vs_chebyshev(const SetSpec& set, std::size_t s, const FeketeOptions& fopts = {},
                                               const ChebyshevOptions& copts = {}) {
  if (s < 2) throw Error(Errc::TooFewPoints, "theta needs s >= 2");
  ThetaChebyshevReport rep;
  rep.s = s;
  rep.theta = fekete_solve(set, s, fopts).theta;
  rep.M = chebyshev_value(set, s, copts).M;
  rep.gap = rep.M - rep.theta;
  rep.epsilon = solver_slack(fopts, copts);
  rep.passed = rep.gap >= -rep.epsilon;
  return rep;
}

}  // namespace projcap
