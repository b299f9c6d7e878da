#pragma once

// Finite atomic measures on P^n, their potentials and logarithmic energies.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "projcap/error.hpp"
#include "projcap/geometry.hpp"
#include "projcap/parallel.hpp"

namespace projcap {

/// I(mu) or I(mu, nu). `value` may be +inf. `stderr_value` is present only for
/// Monte-Carlo estimates.
struct EnergyEstimate {
  double value = 0.0;
  std::optional<double> stderr_value;
  std::size_t samples = 0;
  std::size_t rejected = 0;
};

class DiscreteMeasure {
 public:
  /// Drops zero weights and merges atoms closer than the coincidence
  /// threshold by summing their weights. Throws EmptyMeasure when nothing
  /// with positive weight remains.
  DiscreteMeasure(std::vector<ProjectivePoint> atoms, std::vector<double> weights) {
    if (atoms.size() != weights.size()) throw Error(Errc::InvalidArgument, "atoms and weights differ in length");
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw Error(Errc::InvalidArgument, "weights must be finite and nonnegative");
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (weights[i] == 0.0) continue;
      if (!atoms_.empty()) detail::require_same_dim(atoms_.front().dim(), atoms[i].dim());
      bool merged = false;
      for (std::size_t k = 0; k < atoms_.size(); ++k) {
        if (detail::sine_sq_unit(atoms_[k], atoms[i]) < kCoincidence * kCoincidence) {
          weights_[k] += weights[i];
          merged = true;
          break;
        }
      }
      if (!merged) {
        atoms_.push_back(std::move(atoms[i]));
        weights_.push_back(weights[i]);
      }
    }
    if (atoms_.empty()) throw Error(Errc::EmptyMeasure, "measure has no atom of positive weight");
  }

  static DiscreteMeasure dirac(ProjectivePoint a, double mass = 1.0) {
    return DiscreteMeasure({std::move(a)}, {mass});
  }

  static DiscreteMeasure uniform(std::vector<ProjectivePoint> atoms) {
    if (atoms.empty()) throw Error(Errc::EmptyMeasure, "uniform measure on no points");
    std::vector<double> w(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
    return DiscreteMeasure(std::move(atoms), std::move(w));
  }

  std::size_t size() const { return atoms_.size(); }
  std::size_t dim() const { return atoms_.front().dim(); }
  const std::vector<ProjectivePoint>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }

  double total_mass() const {
    double m = 0.0;
    for (double w : weights_) m += w;
    return m;
  }

  bool is_probability() const { return std::abs(total_mass() - 1.0) <= 1e-12; }

  DiscreteMeasure scaled(double factor) const {
    std::vector<double> w = weights_;
    for (auto& v : w) v *= factor;
    return DiscreteMeasure(atoms_, std::move(w));
  }

  friend DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    std::vector<ProjectivePoint> atoms = a.atoms_;
    atoms.insert(atoms.end(), b.atoms_.begin(), b.atoms_.end());
    std::vector<double> weights = a.weights_;
    weights.insert(weights.end(), b.weights_.begin(), b.weights_.end());
    return DiscreteMeasure(std::move(atoms), std::move(weights));
  }

 private:
  std::vector<ProjectivePoint> atoms_;
  std::vector<double> weights_;
};

namespace detail {

// Fixed argument order for symmetric pairings.
inline bool measure_less(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& pa = a.atoms()[i].coords();
    const auto& pb = b.atoms()[i].coords();
    if (coords_less(pa, pb)) return true;
    if (coords_less(pb, pa)) return false;
    if (a.weights()[i] != b.weights()[i]) return a.weights()[i] < b.weights()[i];
  }
  return false;
}

// 1/sqrt(2) cot(s/sqrt(2)): derivative of -log sin(s/sqrt 2).
inline double layer_cake_kernel(double s) { return kInvSqrt2 / std::tan(s * kInvSqrt2); }

}  // namespace detail

/// G_mu(zeta) = sum_i w_i G(zeta, a_i).
inline double potential(const DiscreteMeasure& mu, const ProjectivePoint& zeta) {
  detail::require_same_dim(mu.dim(), zeta.dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double g = kernel_G(zeta, mu.atoms()[i]);
    if (g == kNegInf) return kNegInf;
    acc += mu.weights()[i] * g;
  }
  return acc;
}

/// Exact double sum I(mu, nu) = sum_ij w_i v_j (-G(a_i, b_j)).
inline EnergyEstimate mutual_energy(const DiscreteMeasure& mu_in, const DiscreteMeasure& nu_in) {
  detail::require_same_dim(mu_in.dim(), nu_in.dim());
  const bool swap = detail::measure_less(nu_in, mu_in);
  const DiscreteMeasure& mu = swap ? nu_in : mu_in;
  const DiscreteMeasure& nu = swap ? mu_in : nu_in;
  std::vector<double> rows(mu.size(), 0.0);
  parallel_for(mu.size(), [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < nu.size(); ++j) {
      double c = -kernel_G(mu.atoms()[i], nu.atoms()[j]);
      if (c == kInf) {
        acc = kInf;
        break;
      }
      acc += nu.weights()[j] * c;
    }
    rows[i] = mu.weights()[i] * acc;
  });
  double total = 0.0;
  for (double r : rows) total += r;
  return {total, std::nullopt, mu.size() * nu.size(), 0};
}

/// I(mu) = I(mu, mu). Infinite for every atomic measure.
inline EnergyEstimate energy(const DiscreteMeasure& mu) { return mutual_energy(mu, mu); }

/// sum_{i != j} w_i w_j (-G(a_i, a_j)): the self-energy with the diagonal
/// removed.
inline double offdiag_energy(const DiscreteMeasure& mu) {
  if (mu.size() < 2) throw Error(Errc::SingleAtom, "off-diagonal energy needs at least two atoms");
  const auto& a = mu.atoms();
  const auto& w = mu.weights();
  std::vector<double> rows(mu.size(), 0.0);
  parallel_for(mu.size(), [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = i + 1; j < mu.size(); ++j) acc += w[j] * detail::neg_kernel_unit(a[i], a[j]);
    rows[i] = w[i] * acc;
  });
  double total = 0.0;
  for (double r : rows) total += r;
  return 2.0 * total;
}

/// |I'(mu+nu) - I'(mu) - I'(nu) - 2 I(mu,nu)| with I' the off-diagonal form.
inline double polarization_residual(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  detail::require_same_dim(mu.dim(), nu.dim());
  for (const auto& a : mu.atoms()) {
    for (const auto& b : nu.atoms()) {
      if (detail::sine_sq_unit(a, b) < kCoincidence * kCoincidence)
        throw Error(Errc::SharedAtoms, "measures share an atom");
    }
  }
  auto self = [](const DiscreteMeasure& m) { return m.size() < 2 ? 0.0 : offdiag_energy(m); };
  double lhs = self(mu + nu);
  double rhs = self(mu) + self(nu) + 2.0 * mutual_energy(mu, nu).value;
  return std::abs(lhs - rhs);
}

inline void require_increasing(std::span<const double> grid) {
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw Error(Errc::UnsortedGrid, "radius grid must be strictly increasing");
  }
}

/// mu(B(zeta, r)) for every r in `grid` (closed geodesic balls).
inline std::vector<double> ball_mass_profile(const DiscreteMeasure& mu, const ProjectivePoint& zeta,
                                             std::span<const double> grid) {
  require_increasing(grid);
  std::vector<std::pair<double, double>> dist(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) dist[i] = {geodesic_distance(zeta, mu.atoms()[i]), mu.weights()[i]};
  std::sort(dist.begin(), dist.end());
  std::vector<double> out(grid.size());
  double mass = 0.0;
  std::size_t next = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    // Full-space radius is compared with slack so asin rounding cannot drop an atom.
    double r = grid[k] >= kDiameter * (1.0 - 1e-15) ? kInf : grid[k];
    while (next < dist.size() && dist[next].first <= r) mass += dist[next++].second;
    out[k] = mass;
  }
  return out;
}

/// Log-spaced radii from `smallest` to pi/sqrt 2 inclusive.
inline std::vector<double> layer_cake_grid(double smallest, std::size_t count = 4000) {
  if (!(smallest > 0.0) || smallest >= kDiameter || count < 2) throw Error(Errc::InvalidArgument, "bad layer-cake grid request");
  std::vector<double> g(count);
  const double ratio = std::log(kDiameter / smallest) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) g[k] = smallest * std::exp(ratio * static_cast<double>(k));
  g.back() = kDiameter;
  return g;
}

/// -G_mu(zeta) rebuilt from the ball-mass profile:
///   int_0^{pi/sqrt2} mu(B(zeta, s)) (1/sqrt2) cot(s/sqrt2) ds
/// by the trapezoid rule on `grid`. The profile is zero below grid[0], which
/// must be at most a tenth of the distance from zeta to the nearest atom.
inline double potential_from_growth(const DiscreteMeasure& mu, const ProjectivePoint& zeta, std::span<const double> grid) {
  require_increasing(grid);
  if (grid.size() < 2) throw Error(Errc::InvalidArgument, "grid needs at least two radii");
  double nearest = kInf;
  for (const auto& a : mu.atoms()) nearest = std::min(nearest, geodesic_distance(zeta, a));
  if (nearest < kCoincidence) throw Error(Errc::AtomCoincidence, "evaluation point is an atom");
  if (grid.front() > nearest / 10.0) throw Error(Errc::InvalidArgument, "grid does not resolve the nearest atom");
  auto mass = ball_mass_profile(mu, zeta, grid);
  double acc = 0.0;
  double prev = mass[0] * detail::layer_cake_kernel(grid[0]);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    double cur = grid[k] >= kDiameter ? 0.0 : mass[k] * detail::layer_cake_kernel(grid[k]);
    acc += 0.5 * (prev + cur) * (grid[k] - grid[k - 1]);
    prev = cur;
  }
  return acc;
}

struct GrowthWitness {
  ProjectivePoint center;
  double radius;
  double mass;
  double allowed;
};

struct GrowthCertificate {
  double bound;        // uniform bound on -G_mu
  double min_radius;   // resolution of the check
  double max_atom_weight;
};

/// Either a bound or the (center, radius) where mu(B) > C r^m.
using CertificateResult = std::variant<GrowthCertificate, GrowthWitness>;

/// C * int_0^{pi/sqrt2} s^m (1/sqrt2) cot(s/sqrt2) ds, by composite Simpson on
/// a substitution s = D u^2 that tames the s^{m-1} endpoint.
inline double growth_bound_integral(double m, double C) {
  const std::size_t panels = 20000;
  auto f = [&](double u) {
    if (u <= 0.0) return 0.0;
    double s = kDiameter * u * u;
    if (s >= kDiameter) return 0.0;
    return std::pow(s, m) * detail::layer_cake_kernel(s) * 2.0 * kDiameter * u;
  };
  double h = 1.0 / static_cast<double>(panels);
  double acc = f(0.0) + f(1.0);
  for (std::size_t k = 1; k < panels; ++k) acc += f(h * static_cast<double>(k)) * (k % 2 ? 4.0 : 2.0);
  return C * acc * h / 3.0;
}

/// Checks mu(B(zeta, r)) <= C r^m for every center and radius supplied.
/// Atoms are always added to the centers, so success implies every atom
/// weight is at most C * radii[0]^m.
inline CertificateResult finite_energy_certificate(const DiscreteMeasure& mu, double m, double C,
                                                   std::span<const ProjectivePoint> centers,
                                                   std::span<const double> radii) {
  if (!(m > 0.0) || !(C > 0.0)) throw Error(Errc::InvalidArgument, "growth exponent and constant must be positive");
  require_increasing(radii);
  if (radii.empty()) throw Error(Errc::InvalidArgument, "no radii supplied");
  std::vector<ProjectivePoint> all(centers.begin(), centers.end());
  all.insert(all.end(), mu.atoms().begin(), mu.atoms().end());
  std::vector<std::optional<GrowthWitness>> found(all.size());
  parallel_for(all.size(), [&](std::size_t c) {
    auto profile = ball_mass_profile(mu, all[c], radii);
    for (std::size_t k = 0; k < radii.size(); ++k) {
      double allowed = C * std::pow(radii[k], m);
      if (profile[k] > allowed) {
        found[c] = GrowthWitness{all[c], radii[k], profile[k], allowed};
        return;
      }
    }
  });
  for (auto& f : found) {
    if (f) return *f;
  }
  double heaviest = *std::max_element(mu.weights().begin(), mu.weights().end());
  return GrowthCertificate{growth_bound_integral(m, C), radii.front(), heaviest};
}

}  // namespace projcap
