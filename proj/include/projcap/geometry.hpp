#pragma once

// Points of complex projective space and the projective logarithmic kernel.
//
// A point of P^n is stored as a unit vector in C^{n+1}. Distances are
// phase-invariant, so two stored vectors represent the same point exactly
// when their sine distance vanishes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "projcap/error.hpp"

namespace projcap {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Sine distances below this are treated as coincident points.
inline constexpr double kCoincidence = 1e-14;
/// Largest geodesic distance on P^n for the Fubini-Study metric.
inline constexpr double kDiameter = std::numbers::pi / std::numbers::sqrt2;
inline constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

class ProjectivePoint {
 public:
  /// Normalizes a homogeneous coordinate vector. Throws ZeroVector when the
  /// input has (numerically) zero norm.
  static ProjectivePoint from_homogeneous(std::span<const Complex> raw) {
    if (raw.size() < 2) throw Error(Errc::InvalidArgument, "need at least two homogeneous coordinates");
    double norm2 = 0.0;
    for (const auto& c : raw) norm2 += std::norm(c);
    double norm = std::sqrt(norm2);
    if (!(norm >= 1e-300) || !std::isfinite(norm)) throw Error(Errc::ZeroVector, "homogeneous vector has zero norm");
    CVector coords(raw.begin(), raw.end());
    for (auto& c : coords) c /= norm;
    return ProjectivePoint(std::move(coords));
  }

  static ProjectivePoint from_homogeneous(std::initializer_list<Complex> raw) {
    return from_homogeneous(std::span<const Complex>(raw.begin(), raw.size()));
  }

  std::size_t dim() const { return coords_.size() - 1; }
  std::span<const Complex> coords() const { return coords_; }
  const Complex& operator[](std::size_t i) const { return coords_[i]; }

  /// Same point with the phase fixed so that the first coordinate of modulus
  /// above 1e-8 is real and positive.
  ProjectivePoint canonical() const {
    CVector c = coords_;
    for (const auto& v : c) {
      if (std::abs(v) > 1e-8) {
        Complex phase = std::conj(v) / std::abs(v);
        for (auto& w : c) w *= phase;
        break;
      }
    }
    return ProjectivePoint(std::move(c));
  }

  /// Coordinates j and k exchanged; no renormalization, so swapping twice
  /// reproduces the input bit for bit.
  ProjectivePoint swapped(std::size_t j, std::size_t k) const {
    CVector c = coords_;
    std::swap(c[j], c[k]);
    return ProjectivePoint(std::move(c));
  }

 private:
  explicit ProjectivePoint(CVector coords) : coords_(std::move(coords)) {}
  CVector coords_;
};

inline ProjectivePoint normalize(std::span<const Complex> raw) { return ProjectivePoint::from_homogeneous(raw); }

struct AffinePoint {
  CVector z;
  std::size_t chart = 0;
};

namespace detail {

inline void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) throw Error(Errc::DimensionMismatch, "points live in different dimensions");
}

// |p ^ q|^2 through the Lagrange identity: the sum of squared 2x2 minors.
// Equal to |p|^2|q|^2 - |<p,q>|^2 but free of cancellation near p ~ q.
inline double wedge_norm_sq(const Complex* p, const Complex* q, std::size_t size) {
  double acc = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = i + 1; j < size; ++j) acc += std::norm(p[i] * q[j] - p[j] * q[i]);
  }
  return acc;
}

inline double norm_sq(std::span<const Complex> v) {
  double acc = 0.0;
  for (const auto& c : v) acc += std::norm(c);
  return acc;
}

// Lexicographic order on (re, im) pairs; used to fix the evaluation order of
// symmetric quantities.
inline bool coords_less(std::span<const Complex> a, std::span<const Complex> b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return a.size() < b.size();
}

// Squared sine distance between unit vectors, clamped to [0, 1].
inline double sine_sq_unit(const ProjectivePoint& p, const ProjectivePoint& q) {
  return std::clamp(wedge_norm_sq(p.coords().data(), q.coords().data(), p.coords().size()), 0.0, 1.0);
}

// -G(p, q) = -log sigma for unit vectors; +inf for coincident points.
inline double neg_kernel_unit(const ProjectivePoint& p, const ProjectivePoint& q) {
  double s2 = sine_sq_unit(p, q);
  if (s2 < kCoincidence * kCoincidence) return kInf;
  return -0.5 * std::log(s2);
}

}  // namespace detail

inline double wedge_norm(std::span<const Complex> p, std::span<const Complex> q) {
  detail::require_same_dim(p.size(), q.size());
  return std::sqrt(detail::wedge_norm_sq(p.data(), q.data(), p.size()));
}

inline double wedge_norm(const ProjectivePoint& p, const ProjectivePoint& q) { return wedge_norm(p.coords(), q.coords()); }

/// sigma(p, q) = |p ^ q| / (|p| |q|), invariant under rescaling either vector.
inline double sine_distance(std::span<const Complex> p, std::span<const Complex> q) {
  detail::require_same_dim(p.size(), q.size());
  double denom = detail::norm_sq(p) * detail::norm_sq(q);
  if (!(denom > 0.0)) throw Error(Errc::ZeroVector, "sine distance of a zero vector");
  return std::sqrt(std::clamp(detail::wedge_norm_sq(p.data(), q.data(), p.size()) / denom, 0.0, 1.0));
}

inline double sine_distance(const ProjectivePoint& p, const ProjectivePoint& q) {
  detail::require_same_dim(p.dim(), q.dim());
  return std::sqrt(detail::sine_sq_unit(p, q));
}

/// Fubini-Study geodesic distance, d = sqrt(2) * asin(sigma), in [0, pi/sqrt 2].
inline double geodesic_distance(const ProjectivePoint& p, const ProjectivePoint& q) {
  return std::numbers::sqrt2 * std::asin(std::min(1.0, sine_distance(p, q)));
}

/// G(p, q) = log sin(d/sqrt 2) = log sigma. Returns -inf for sigma < 1e-14.
inline double kernel_G(const ProjectivePoint& p, const ProjectivePoint& q) {
  detail::require_same_dim(p.dim(), q.dim());
  const bool swap = detail::coords_less(q.coords(), p.coords());
  const ProjectivePoint& a = swap ? q : p;
  const ProjectivePoint& b = swap ? p : q;
  double s2 = detail::sine_sq_unit(a, b);
  if (s2 < kCoincidence * kCoincidence) return kNegInf;
  return 0.5 * std::log(s2);
}

/// Homogeneous lift of an affine chart point: insert 1 at position `chart`.
inline ProjectivePoint affine_lift(const AffinePoint& a) {
  if (a.chart > a.z.size()) throw Error(Errc::IndexOutOfRange, "chart index exceeds dimension");
  CVector raw;
  raw.reserve(a.z.size() + 1);
  for (std::size_t i = 0, k = 0; i <= a.z.size(); ++i) {
    if (i == a.chart) {
      raw.emplace_back(1.0, 0.0);
    } else {
      const Complex& v = a.z[k++];
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw Error(Errc::InvalidArgument, "affine coordinates must be finite");
      raw.push_back(v);
    }
  }
  return ProjectivePoint::from_homogeneous(raw);
}

/// Chart map phi_j: divide by the j-th coordinate and drop it.
inline AffinePoint chart_coords(const ProjectivePoint& p, std::size_t chart) {
  if (chart > p.dim()) throw Error(Errc::IndexOutOfRange, "chart index exceeds dimension");
  const Complex pivot = p[chart];
  if (std::abs(pivot) <= 1e-12) throw Error(Errc::ChartUndefined, "point lies on the excluded hyperplane of chart " + std::to_string(chart));
  AffinePoint out;
  out.chart = chart;
  out.z.reserve(p.dim());
  for (std::size_t i = 0; i <= p.dim(); ++i) {
    if (i != chart) out.z.push_back(p[i] / pivot);
  }
  return out;
}

/// N(z, w) = 1/2 log[(|z-w|^2 + |z^w|^2) / ((1+|z|^2)(1+|w|^2))], the kernel
/// written in an affine chart. Equals kernel_G of the lifts.
inline double normalized_kernel_N(const AffinePoint& z, const AffinePoint& w) {
  if (z.chart != w.chart) throw Error(Errc::ChartMismatch, "affine points use different charts");
  detail::require_same_dim(z.z.size(), w.z.size());
  double diff2 = 0.0;
  for (std::size_t i = 0; i < z.z.size(); ++i) diff2 += std::norm(z.z[i] - w.z[i]);
  double wedge2 = detail::wedge_norm_sq(z.z.data(), w.z.data(), z.z.size());
  double num = diff2 + wedge2;
  double den = (1.0 + detail::norm_sq(z.z)) * (1.0 + detail::norm_sq(w.z));
  double ratio = num / den;
  if (ratio < kCoincidence * kCoincidence) return kNegInf;
  return 0.5 * std::log(std::min(1.0, ratio));
}

/// Exchanges homogeneous coordinates j and k.
inline ProjectivePoint chart_swap(const ProjectivePoint& p, std::size_t j, std::size_t k) {
  if (j > p.dim() || k > p.dim() || j == k) throw Error(Errc::IndexOutOfRange, "invalid coordinate pair for swap");
  return p.swapped(j, k);
}

}  // namespace projcap
