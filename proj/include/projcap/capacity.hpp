#pragma once

// Robin constant and capacity from the discretized equilibrium problem, and
// the numerical checks built on it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "projcap/equilibrium.hpp"
#include "projcap/fekete.hpp"
#include "projcap/geometry.hpp"
#include "projcap/measure.hpp"
#include "projcap/sampling.hpp"
#include "projcap/set_spec.hpp"

namespace projcap {

struct EquilibriumOptions {
  std::size_t max_iters = 100000;
  double gap_tol = 1e-8;
  std::uint64_t seed = 0;
  DiagRule diag;
};

struct EquilibriumResult {
  std::vector<ProjectivePoint> samples;
  std::vector<double> weights;
  double gamma_hat = 0.0;
  double kappa_hat = 0.0;
  double fw_gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool polar_suspect = false;  // finite sample set: gamma only reflects the diagonal rule
  DiagRule diag;
  std::vector<double> trace;

  std::string diag_rule() const { return diag.label(); }
  DiscreteMeasure measure() const { return DiscreteMeasure(samples, weights); }
};

/// Minimizes w^T A w over the simplex for m samples of the set. Does not throw
/// on non-convergence; the result carries `converged = false` instead.
inline EquilibriumResult equilibrium_solve(const SetSpec& set, std::size_t m, const EquilibriumOptions& opts = {}) {
  if (m < 2) throw Error(Errc::TooFewPoints, "equilibrium needs m >= 2");
  EquilibriumResult res;
  res.samples = draw_pool(set, m, opts.seed);
  if (res.samples.size() < 2) throw Error(Errc::SamplerExhausted, "set yields fewer than two distinct samples");
  res.polar_suspect = set.is_finite();
  res.diag = opts.diag;
  auto A = energy_matrix(res.samples, opts.diag);
  auto qs = minimize_on_simplex(A, opts.max_iters, opts.gap_tol);
  res.weights = std::move(qs.weights);
  res.gamma_hat = qs.objective;
  res.kappa_hat = std::exp(-res.gamma_hat);
  res.fw_gap = qs.gap;
  res.iterations = qs.iterations;
  res.converged = qs.converged;
  res.trace = std::move(qs.trace);
  return res;
}

/// w^T A w for a weight vector on the result's samples.
inline double quadratic_energy(const EnergyMatrix& A, std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < A.m; ++i) {
    const double* r = A.row(i);
    double row = 0.0;
    for (std::size_t j = 0; j < A.m; ++j) row += r[j] * v[j];
    acc += v[i] * row;
  }
  return acc;
}

struct CapacityOptions {
  std::size_t m = 400;
  EquilibriumOptions equilibrium;
  std::size_t fekete_s = 50;  // 0 skips the Fekete cross-check
  FeketeOptions fekete;
};

struct CapacityReport {
  double gamma_hat = 0.0;
  double kappa_hat = 0.0;
  double fw_gap = 0.0;
  bool converged = false;
  std::size_t m = 0;
  double gamma_hat_2m = 0.0;
  double kappa_hat_2m = 0.0;
  std::optional<double> fekete_D;
  std::optional<double> cross_gap;  // |kappa_hat - D_s|
  std::string diag_rule;
  bool polar_suspect = false;
  EquilibriumResult result;  // the size-m solve
};

inline CapacityReport capacity(const SetSpec& set, const CapacityOptions& opts = {}) {
  CapacityReport rep;
  rep.result = equilibrium_solve(set, opts.m, opts.equilibrium);
  auto r2 = equilibrium_solve(set, 2 * opts.m, opts.equilibrium);
  rep.gamma_hat = rep.result.gamma_hat;
  rep.kappa_hat = rep.result.kappa_hat;
  rep.fw_gap = rep.result.fw_gap;
  rep.converged = rep.result.converged && r2.converged;
  rep.m = rep.result.samples.size();
  rep.gamma_hat_2m = r2.gamma_hat;
  rep.kappa_hat_2m = r2.kappa_hat;
  rep.diag_rule = rep.result.diag_rule();
  rep.polar_suspect = rep.result.polar_suspect;
  if (opts.fekete_s >= 2 && !set.is_finite()) {
    rep.fekete_D = diameter_of_order(set, opts.fekete_s, opts.fekete);
    rep.cross_gap = std::abs(rep.kappa_hat - *rep.fekete_D);
  }
  return rep;
}

// ---------------------------------------------------------------- duality

/// Uniform weights on the samples nearest to each point (weights of points
/// sharing a nearest sample add up).
inline std::vector<double> snap_to_samples(const EquilibriumResult& res, std::span<const ProjectivePoint> pts) {
  std::vector<double> v(res.samples.size(), 0.0);
  for (const auto& p : pts) {
    std::size_t best = 0;
    double best_s = kInf;
    for (std::size_t i = 0; i < res.samples.size(); ++i) {
      double s = detail::sine_sq_unit(res.samples[i], p);
      if (s < best_s) {
        best_s = s;
        best = i;
      }
    }
    v[best] += 1.0 / static_cast<double>(pts.size());
  }
  return v;
}

struct DualityReport {
  double gamma_hat = 0.0;
  double bound = 0.0;            // 1 / sqrt(gamma_hat)
  double nu_star_energy = 0.0;   // should be 1
  double nu_star_mass = 0.0;     // should equal bound
  std::size_t trials_used = 0;
  std::size_t trials_excluded = 0;  // energy above 1
  double max_trial_mass = 0.0;
  std::size_t violations = 0;
  double tol = 1e-6;
  bool passed = false;
};

/// Trials are nonnegative weight vectors on res.samples. Energies use the
/// same quadratic form as gamma_hat, so every trial with energy <= 1 must
/// have mass <= 1/sqrt(gamma_hat) up to the solver gap.
inline DualityReport duality_check(const EquilibriumResult& res, const std::vector<std::vector<double>>& trials,
                                   double tol = 1e-6) {
  if (!(res.gamma_hat > 0.0)) throw Error(Errc::DegenerateGamma, "gamma_hat must be positive");
  DualityReport rep;
  rep.gamma_hat = res.gamma_hat;
  rep.bound = 1.0 / std::sqrt(res.gamma_hat);
  rep.tol = tol;
  auto A = energy_matrix(res.samples, res.diag);
  std::vector<double> star(res.weights);
  for (auto& w : star) w *= rep.bound;
  rep.nu_star_energy = quadratic_energy(A, star);
  rep.nu_star_mass = 0.0;
  for (double w : star) rep.nu_star_mass += w;
  for (const auto& v : trials) {
    if (v.size() != res.samples.size()) throw Error(Errc::DimensionMismatch, "trial length differs from sample count");
    double e = quadratic_energy(A, v);
    if (e > 1.0 + 1e-12) {
      ++rep.trials_excluded;
      continue;
    }
    double mass = 0.0;
    for (double w : v) mass += w;
    ++rep.trials_used;
    rep.max_trial_mass = std::max(rep.max_trial_mass, mass);
    if (mass > rep.bound + tol) ++rep.violations;
  }
  rep.passed = std::abs(rep.nu_star_energy - 1.0) <= 1e-9 && std::abs(rep.nu_star_mass - rep.bound) <= 1e-12 &&
               rep.violations == 0;
  return rep;
}

/// Scales v so that its quadratic energy equals `target`.
inline std::vector<double> rescale_to_energy(const EquilibriumResult& res, std::vector<double> v, double target = 1.0) {
  auto A = energy_matrix(res.samples, res.diag);
  double e = quadratic_energy(A, v);
  if (!(e > 0.0)) throw Error(Errc::DegenerateGamma, "trial has zero energy");
  double c = std::sqrt(target / e);
  for (auto& w : v) w *= c;
  return v;
}

// ---------------------------------------------------------------- volume

struct VolumeBoundReport {
  double volume = 0.0;
  double volume_stderr = 0.0;
  double gamma_hat = 0.0;
  double gamma_spread = 0.0;  // estimator uncertainty of gamma_hat
  double bound = 0.0;         // sqrt(1/(2n)) / sqrt(gamma_hat)
  double bound_stderr = 0.0;
  double stderr_total = 0.0;
  std::size_t samples = 0;
  bool passed = false;
};

/// FS volume by hit fraction, compared with sqrt(1/(2n))/sqrt(gamma).
/// `gamma_spread` is the uncertainty of gamma_hat; it is propagated into the
/// bound and combined with the hit-fraction standard error.
inline VolumeBoundReport volume_bound_check(const SetSpec& set, double gamma_hat, double gamma_spread,
                                            std::size_t N = 200000, std::uint64_t seed = 0) {
  if (!(gamma_hat > 0.0)) throw Error(Errc::DegenerateGamma, "gamma_hat must be positive");
  VolumeBoundReport rep;
  auto hits = mc_mean(N, seed, [&](Engine& eng) -> std::optional<double> {
    return set.contains(draw_fs(set.n, eng)) ? 1.0 : 0.0;
  });
  rep.volume = hits.value;
  rep.volume_stderr = hits.stderr_value.value_or(0.0);
  rep.samples = hits.samples;
  rep.gamma_hat = gamma_hat;
  rep.gamma_spread = gamma_spread;
  const double a = std::sqrt(1.0 / (2.0 * static_cast<double>(set.n)));
  rep.bound = a / std::sqrt(gamma_hat);
  rep.bound_stderr = 0.5 * a * std::pow(gamma_hat, -1.5) * gamma_spread;
  rep.stderr_total = std::hypot(rep.volume_stderr, rep.bound_stderr);
  rep.passed = rep.volume <= rep.bound + 3.0 * rep.stderr_total;
  return rep;
}

/// Spread of gamma_hat over independent sample seeds (sample standard
/// deviation) together with the mean.
struct GammaReplicates {
  double mean = 0.0;
  double spread = 0.0;
  std::vector<double> values;
};

inline GammaReplicates gamma_replicates(const SetSpec& set, std::size_t m, std::size_t reps,
                                        const EquilibriumOptions& opts = {}) {
  GammaReplicates g;
  for (std::size_t r = 0; r < reps; ++r) {
    EquilibriumOptions o = opts;
    o.seed = derive_seed(opts.seed, 0x5eed + r);
    g.values.push_back(equilibrium_solve(set, m, o).gamma_hat);
  }
  for (double v : g.values) g.mean += v;
  g.mean /= static_cast<double>(reps);
  double ss = 0.0;
  for (double v : g.values) ss += (v - g.mean) * (v - g.mean);
  g.spread = reps > 1 ? std::sqrt(ss / static_cast<double>(reps - 1)) : 0.0;
  return g;
}

// ---------------------------------------------------------------- subadditivity

struct SubadditivityReport {
  double lhs = 0.0;  // 1/sqrt(gamma(union))
  std::vector<double> terms;
  double rhs = 0.0;
  double tol = 0.0;
  bool passed = false;
};

/// 1/sqrt(gamma(U E_j)) <= sum_j 1/sqrt(gamma(E_j)). The tolerance is the sum
/// of |f(m) - f(2m)| over all sets, f = 1/sqrt(gamma).
inline SubadditivityReport subadditivity_check(const std::vector<SetSpec>& parts, const CapacityOptions& opts = {}) {
  if (parts.empty()) throw Error(Errc::EmptySet, "no sets given");
  CapacityOptions o = opts;
  o.fekete_s = 0;
  SubadditivityReport rep;
  auto f = [](double g) { return 1.0 / std::sqrt(g); };
  auto whole = capacity(sets::set_union(parts), o);
  rep.lhs = f(whole.gamma_hat);
  rep.tol = std::abs(f(whole.gamma_hat) - f(whole.gamma_hat_2m));
  for (const auto& p : parts) {
    auto c = capacity(p, o);
    rep.terms.push_back(f(c.gamma_hat));
    rep.rhs += f(c.gamma_hat);
    rep.tol += std::abs(f(c.gamma_hat) - f(c.gamma_hat_2m));
  }
  rep.passed = rep.lhs <= rep.rhs + rep.tol;
  return rep;
}

// ---------------------------------------------------------------- monotone limits

struct MonotoneLimitReport {
  std::vector<double> radii;
  std::vector<double> kappa;
  double limit_radius = 0.0;
  double kappa_limit = 0.0;
  double final_rel_gap = 0.0;
  std::size_t monotone_violations = 0;
  double tol = 0.0;
  bool passed = false;
};

/// kappa_hat of balls B(center, r_k) for r_k converging monotonically to
/// r_limit. Every ball uses the same sample seed, so the samples move
/// continuously with the radius.
inline MonotoneLimitReport monotone_limit_check(const ProjectivePoint& center, const std::vector<double>& radii,
                                                double r_limit, std::size_t m = 400,
                                                const EquilibriumOptions& opts = {}, double tol = 1e-3) {
  if (radii.empty()) throw Error(Errc::InvalidArgument, "no radii given");
  if (!(r_limit > 0.0)) throw Error(Errc::InvalidArgument, "limit radius must be positive");
  const bool decreasing = radii.front() >= r_limit;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    bool ok = decreasing ? radii[k] >= r_limit : radii[k] <= r_limit;
    if (k) ok = ok && (decreasing ? radii[k] <= radii[k - 1] : radii[k] >= radii[k - 1]);
    if (!ok) throw Error(Errc::InvalidArgument, "radii must be monotone toward the limit");
  }
  MonotoneLimitReport rep;
  rep.radii = radii;
  rep.limit_radius = r_limit;
  rep.tol = tol;
  rep.kappa.resize(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k)
    rep.kappa[k] = equilibrium_solve(sets::geodesic_ball(center, radii[k]), m, opts).kappa_hat;
  rep.kappa_limit = equilibrium_solve(sets::geodesic_ball(center, r_limit), m, opts).kappa_hat;
  for (std::size_t k = 1; k < radii.size(); ++k) {
    double step = rep.kappa[k] - rep.kappa[k - 1];
    if (decreasing ? step > tol : step < -tol) ++rep.monotone_violations;
  }
  rep.final_rel_gap = std::abs(rep.kappa.back() - rep.kappa_limit) / rep.kappa_limit;
  rep.passed = rep.monotone_violations == 0 && rep.final_rel_gap <= 0.05;
  return rep;
}

// ---------------------------------------------------------------- disk example

struct DiskExampleReport {
  EnergyEstimate energy_N;
  EnergyEstimate energy_4N;
  double z_score = 0.0;  // |I_N - I_4N| / combined stderr
  bool stable = false;
  double kappa_hat = 0.0;
  double gamma_hat = 0.0;
  double radius = 1.0;
  double D2_bound = 0.0;  // sin(diam/sqrt2) of the disk
  bool passed = false;
};

/// I(mu) for normalized Lebesgue measure on {[1:z:0] : |z| <= radius} by
/// Monte Carlo over pairs in the affine chart, plus kappa_hat from the
/// equilibrium solver.
inline DiskExampleReport disk_example(std::size_t m, std::size_t N, std::uint64_t seed, double radius = 1.0) {
  DiskExampleReport rep;
  rep.radius = radius;
  auto draw = [radius](Engine& eng) {
    double rho = radius * std::sqrt(uniform01(eng));
    double phi = 2.0 * std::numbers::pi * uniform01(eng);
    return AffinePoint{CVector{std::polar(rho, phi), Complex(0.0, 0.0)}, 0};
  };
  auto pairs = [&](std::size_t count, std::uint64_t s) {
    return mc_mean(count, s, [&](Engine& eng) -> std::optional<double> {
      double v = -normalized_kernel_N(draw(eng), draw(eng));
      if (v == kInf) return std::nullopt;
      return v;
    });
  };
  rep.energy_N = pairs(N, derive_seed(seed, 1));
  rep.energy_4N = pairs(4 * N, derive_seed(seed, 2));
  double se = std::hypot(rep.energy_N.stderr_value.value_or(kInf), rep.energy_4N.stderr_value.value_or(kInf));
  rep.z_score = std::abs(rep.energy_N.value - rep.energy_4N.value) / se;
  rep.stable = std::isfinite(rep.energy_N.value) && std::isfinite(rep.energy_4N.value) && rep.z_score <= 3.0;
  EquilibriumOptions eo;
  eo.seed = seed;
  auto eq = equilibrium_solve(sets::disk_slice(radius), m, eo);
  rep.kappa_hat = eq.kappa_hat;
  rep.gamma_hat = eq.gamma_hat;
  rep.D2_bound = 2.0 * radius / (1.0 + radius * radius);
  rep.passed = rep.stable && rep.kappa_hat > 0.01;
  return rep;
}

/// Equidistribution against an equilibrium result.
inline std::vector<EquidistributionEntry> equidistribution_check(std::span<const FeketeConfiguration> configs,
                                                                 const EquilibriumResult& reference,
                                                                 std::span<const ProjectivePoint> testpoints,
                                                                 double exclusion = 0.1) {
  return equidistribution_check(configs, reference.measure(), testpoints, exclusion);
}

}  // namespace projcap
