#pragma once

// Discretized equilibrium problem: minimize w^T A w over the probability
// simplex, where A is the pairwise -G matrix of sample points with a
// nearest-neighbour self-energy on the diagonal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "projcap/geometry.hpp"
#include "projcap/measure.hpp"
#include "projcap/parallel.hpp"
#include "projcap/set_spec.hpp"

namespace projcap {

/// A_ii = -log(scale * sigma_i), sigma_i the sine distance from sample i to
/// its nearest other sample.
struct DiagRule {
  double scale = 0.5;

  std::string label() const { return "nn-sine(scale=" + std::to_string(scale) + ")"; }
};

/// Dense symmetric matrix, row major.
struct EnergyMatrix {
  std::size_t m = 0;
  std::vector<double> a;

  double operator()(std::size_t i, std::size_t j) const { return a[i * m + j]; }
  const double* row(std::size_t i) const { return &a[i * m]; }
};

inline EnergyMatrix energy_matrix(std::span<const ProjectivePoint> samples, const DiagRule& rule = {}) {
  const std::size_t m = samples.size();
  if (m < 2) throw Error(Errc::TooFewPoints, "energy matrix needs at least two samples");
  if (!(rule.scale > 0.0)) throw Error(Errc::InvalidArgument, "diagonal scale must be positive");
  EnergyMatrix A{m, std::vector<double>(m * m, 0.0)};
  std::vector<double> nearest(m, 1.0);
  parallel_for(m, [&](std::size_t i) {
    double nn = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      double s2 = detail::sine_sq_unit(samples[i], samples[j]);
      if (s2 < 1e-24) throw Error(Errc::CoincidentSamples, "samples closer than 1e-12");
      nn = std::min(nn, s2);
      if (j > i) A.a[i * m + j] = -0.5 * std::log(s2);
    }
    nearest[i] = std::sqrt(nn);
  });
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < i; ++j) A.a[i * m + j] = A.a[j * m + i];
    A.a[i * m + i] = -std::log(rule.scale * nearest[i]);
  }
  return A;
}

struct QuadraticSimplexResult {
  std::vector<double> weights;
  double objective = 0.0;
  double gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // objective after each iteration
};

/// Frank-Wolfe with away steps and exact line search for min w^T A w on the
/// simplex. The gap returned is the Frank-Wolfe duality gap
/// 2 (w^T A w - min_j (A w)_j), an upper bound on the suboptimality.
///
/// Weights, A w and the objective are carried in long double: near a gap of
/// 1e-8 the per-step decrease is ~1e-17, below double resolution at 0.5.
inline QuadraticSimplexResult minimize_on_simplex(const EnergyMatrix& A, std::size_t max_iters, double gap_tol,
                                                  bool keep_trace = true) {
  using Real = long double;
  const std::size_t m = A.m;
  QuadraticSimplexResult res;
  std::vector<Real> w(m, Real(1) / static_cast<Real>(m));
  std::vector<Real> Aw(m, 0.0L);
  auto recompute = [&] {
    Real sum = 0.0L;
    for (Real v : w) sum += v;
    for (Real& v : w) v /= sum;
    for (std::size_t i = 0; i < m; ++i) {
      const double* r = A.row(i);
      Real acc = 0.0L;
      for (std::size_t j = 0; j < m; ++j) acc += r[j] * w[j];
      Aw[i] = acc;
    }
  };
  auto quad = [&] {
    Real acc = 0.0L;
    for (std::size_t i = 0; i < m; ++i) acc += w[i] * Aw[i];
    return acc;
  };
  auto min_grad = [&] { return *std::min_element(Aw.begin(), Aw.end()); };
  recompute();
  Real f = quad();
  std::vector<Real> w_prev, Aw_prev;
  for (std::size_t it = 0;; ++it) {
    std::size_t fw = 0, away = m;
    for (std::size_t i = 1; i < m; ++i) {
      if (Aw[i] < Aw[fw]) fw = i;
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (w[i] > 0.0L && (away == m || Aw[i] > Aw[away])) away = i;
    }
    const Real gap = 2.0L * (f - Aw[fw]);
    res.iterations = it;
    if (gap <= gap_tol) {
      res.converged = true;
      break;
    }
    if (it >= max_iters) break;
    const Real away_gap = 2.0L * (Aw[away] - f);
    w_prev = w;
    Aw_prev = Aw;
    if (gap >= away_gap) {
      // toward vertex fw: d = e_fw - w
      Real slope = Aw[fw] - f;
      Real curv = A(fw, fw) - 2.0L * Aw[fw] + f;
      Real alpha = curv > 0.0L ? std::min(Real(1), -slope / curv) : Real(1);
      for (std::size_t i = 0; i < m; ++i) w[i] *= (1.0L - alpha);
      w[fw] += alpha;
      const double* col = A.row(fw);
      for (std::size_t i = 0; i < m; ++i) Aw[i] = (1.0L - alpha) * Aw[i] + alpha * col[i];
    } else {
      // away from vertex `away`: d = w - e_away
      Real wa = w[away];
      Real alpha_max = wa / (1.0L - wa);
      Real slope = f - Aw[away];
      Real curv = f - 2.0L * Aw[away] + A(away, away);
      Real alpha = curv > 0.0L ? std::min(alpha_max, -slope / curv) : alpha_max;
      for (std::size_t i = 0; i < m; ++i) w[i] *= (1.0L + alpha);
      w[away] -= alpha;
      if (alpha == alpha_max) w[away] = 0.0L;
      const double* col = A.row(away);
      for (std::size_t i = 0; i < m; ++i) Aw[i] = (1.0L + alpha) * Aw[i] - alpha * col[i];
    }
    if ((it + 1) % 256 == 0) recompute();
    Real fn = quad();
    if (!(fn <= f)) {
      // No further progress representable.
      w = std::move(w_prev);
      Aw = std::move(Aw_prev);
      res.converged = 2.0L * (f - min_grad()) <= gap_tol;
      break;
    }
    f = fn;
    if (keep_trace) res.trace.push_back(static_cast<double>(f));
  }
  res.weights.resize(m);
  for (std::size_t i = 0; i < m; ++i) res.weights[i] = static_cast<double>(w[i]);
  res.objective = static_cast<double>(f);
  res.gap = static_cast<double>(2.0L * (f - min_grad()));
  return res;
}

}  // namespace projcap
