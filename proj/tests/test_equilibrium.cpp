#include <gtest/gtest.h>

#include <cmath>

#include "projcap/capacity.hpp"
#include "projcap/equilibrium.hpp"

using namespace projcap;

namespace {

ProjectivePoint pt(Complex a, Complex b) { return ProjectivePoint::from_homogeneous({a, b}); }

EnergyMatrix small(std::vector<double> vals) {
  std::size_t m = static_cast<std::size_t>(std::lround(std::sqrt(vals.size())));
  return EnergyMatrix{m, std::move(vals)};
}

// Exhaustive grid search over the 2-simplex.
double grid_min3(const EnergyMatrix& A) {
  double best = kInf;
  const int N = 600;
  for (int i = 0; i <= N; ++i)
    for (int j = 0; i + j <= N; ++j) {
      std::vector<double> w = {i / double(N), j / double(N), (N - i - j) / double(N)};
      best = std::min(best, quadratic_energy(A, w));
    }
  return best;
}

}  // namespace

TEST(EnergyMatrix, OrthogonalPair) {
  std::vector<ProjectivePoint> s = {pt(1.0, 0.0), pt(0.0, 1.0)};
  auto A = energy_matrix(s);
  EXPECT_EQ(A(0, 1), 0.0);
  EXPECT_EQ(A(1, 0), 0.0);
  EXPECT_NEAR(A(0, 0), std::log(2.0), 1e-15);
  EXPECT_NEAR(A(1, 1), std::log(2.0), 1e-15);
}

TEST(EnergyMatrix, SymmetricWithNearestNeighbourDiagonal) {
  auto pts = sample_fs(2, 60, 9);
  auto A = energy_matrix(pts);
  for (std::size_t i = 0; i < A.m; ++i) {
    double nn = 1.0;
    for (std::size_t j = 0; j < A.m; ++j) {
      EXPECT_EQ(A(i, j), A(j, i));
      if (j != i) {
        EXPECT_NEAR(A(i, j), -kernel_G(pts[i], pts[j]), 1e-12);
        nn = std::min(nn, sine_distance(pts[i], pts[j]));
      }
    }
    EXPECT_NEAR(A(i, i), -std::log(0.5 * nn), 1e-12);
  }
}

TEST(EnergyMatrix, Errors) {
  std::vector<ProjectivePoint> one = {pt(1.0, 0.0)};
  EXPECT_THROW(energy_matrix(one), Error);
  std::vector<ProjectivePoint> dup = {pt(1.0, 0.0), pt(1.0, 0.0)};
  try {
    energy_matrix(dup);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::CoincidentSamples);
  }
  std::vector<ProjectivePoint> two = {pt(1.0, 0.0), pt(0.0, 1.0)};
  EXPECT_THROW(energy_matrix(two, DiagRule{0.0}), Error);
}

TEST(Simplex, TwoByTwoClosedForm) {
  auto A = small({2.0, 0.5, 0.5, 1.0});
  auto r = minimize_on_simplex(A, 10000, 1e-12);
  double w0 = (1.0 - 0.5) / (2.0 + 1.0 - 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.weights[0], w0, 1e-6);
  double f = 2.0 * w0 * w0 + 2 * 0.5 * w0 * (1 - w0) + (1 - w0) * (1 - w0);
  EXPECT_NEAR(r.objective, f, 1e-10);
}

TEST(Simplex, VertexOptimum) {
  auto A = small({0.1, 1.0, 1.0, 5.0});
  auto r = minimize_on_simplex(A, 10000, 1e-12);
  EXPECT_NEAR(r.weights[0], 1.0, 1e-9);
  EXPECT_NEAR(r.objective, 0.1, 1e-9);
}

TEST(Simplex, MatchesGridSearch) {
  auto A = small({1.0, 0.2, 0.4, 0.2, 1.5, 0.1, 0.4, 0.1, 0.8});
  auto r = minimize_on_simplex(A, 10000, 1e-12);
  double g = grid_min3(A);
  EXPECT_LE(r.objective, g + 1e-12);
  EXPECT_NEAR(r.objective, g, 1e-5);
}

TEST(Simplex, TraceMonotoneAndFeasible) {
  auto A = energy_matrix(sample_fs(1, 150, 2));
  auto r = minimize_on_simplex(A, 100000, 1e-8);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.gap, 1e-8);
  for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_LE(r.trace[k], r.trace[k - 1] + 1e-14);
  double sum = 0.0;
  for (double w : r.weights) {
    EXPECT_GE(w, 0.0);
    sum += w;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_NEAR(quadratic_energy(A, r.weights), r.objective, 1e-10);
}

TEST(Simplex, IterationCapReported) {
  auto A = energy_matrix(sample_fs(1, 100, 5));
  auto r = minimize_on_simplex(A, 3, 1e-14);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3u);
}

TEST(EquilibriumSolve, ProbabilityWeightsAndKappa) {
  auto r = equilibrium_solve(sets::full_space(1), 200);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.samples.size(), 200u);
  EXPECT_NEAR(r.kappa_hat, std::exp(-r.gamma_hat), 1e-15);
  EXPECT_FALSE(r.polar_suspect);
  EXPECT_EQ(r.diag_rule(), DiagRule{}.label());
  EXPECT_NEAR(r.measure().total_mass(), 1.0, 1e-12);
  EXPECT_THROW(equilibrium_solve(sets::full_space(1), 1), Error);
}

TEST(EquilibriumSolve, Deterministic) {
  EquilibriumOptions o;
  o.seed = 17;
  auto a = equilibrium_solve(sets::full_space(2), 120, o);
  auto b = equilibrium_solve(sets::full_space(2), 120, o);
  EXPECT_EQ(a.gamma_hat, b.gamma_hat);
  EXPECT_EQ(a.weights, b.weights);
}
