#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "projcap/capacity.hpp"
#include "projcap/fekete.hpp"

using namespace projcap;

namespace {

// Inverse stereographic map from the unit sphere to P^1.
ProjectivePoint from_sphere(double x, double y, double z) {
  if (z > 1.0 - 1e-15) return ProjectivePoint::from_homogeneous({0.0, 1.0});
  return ProjectivePoint::from_homogeneous({Complex(1.0 - z, 0.0), Complex(x, y)});
}

ProjectivePoint north() { return ProjectivePoint::from_homogeneous({1.0, 0.0}); }

}  // namespace

TEST(Theta, Examples) {
  std::vector<ProjectivePoint> orth = {north(), ProjectivePoint::from_homogeneous({0.0, 1.0})};
  EXPECT_EQ(theta_objective(orth), 0.0);
  std::vector<ProjectivePoint> tri;
  for (int k = 0; k < 3; ++k) tri.push_back(from_sphere(std::cos(2 * std::numbers::pi * k / 3), std::sin(2 * std::numbers::pi * k / 3), 0.0));
  EXPECT_NEAR(theta_objective(tri), -std::log(std::sqrt(3.0) / 2.0), 1e-15);
  std::vector<ProjectivePoint> dup = {north(), north()};
  EXPECT_EQ(theta_objective(dup), kInf);
  std::vector<ProjectivePoint> one = {north()};
  EXPECT_THROW(theta_objective(one), Error);
}

TEST(Theta, TetrahedronOracle) {
  const double c = 1.0 / std::sqrt(3.0);
  std::vector<ProjectivePoint> tet = {from_sphere(c, c, c), from_sphere(c, -c, -c), from_sphere(-c, c, -c),
                                      from_sphere(-c, -c, c)};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) EXPECT_NEAR(sine_distance(tet[i], tet[j]), std::sqrt(2.0 / 3.0), 1e-14);
  EXPECT_NEAR(std::exp(-theta_objective(tet)), std::sqrt(2.0 / 3.0), 1e-14);
}

TEST(FeketeSolve, SmallOrdersOnP1) {
  auto P1 = sets::full_space(1);
  EXPECT_NEAR(diameter_of_order(P1, 2), 1.0, 1e-6);
  EXPECT_NEAR(diameter_of_order(P1, 3), std::sqrt(3.0) / 2.0, 1e-4);
  EXPECT_NEAR(diameter_of_order(P1, 4), std::sqrt(2.0 / 3.0), 1e-4);
}

TEST(FeketeSolve, InvariantsOfTheResult) {
  auto P1 = sets::full_space(1);
  auto cfg = fekete_solve(P1, 7);
  EXPECT_EQ(cfg.points.size(), 7u);
  EXPECT_NEAR(cfg.theta, theta_objective(cfg.points), 1e-12);
  EXPECT_LE(cfg.theta, cfg.initial_theta);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = i + 1; j < 7; ++j) EXPECT_GE(sine_distance(cfg.points[i], cfg.points[j]), 1e-12);
}

TEST(FeketeSolve, DeterministicPerSeed) {
  auto ball = sets::geodesic_ball(north(), 0.5);
  FeketeOptions o;
  o.seed = 4;
  auto a = fekete_solve(ball, 5, o);
  auto b = fekete_solve(ball, 5, o);
  EXPECT_EQ(a.theta, b.theta);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(a.points[i][k], b.points[i][k]);
  for (const auto& p : a.points) EXPECT_TRUE(ball.contains(p));
}

TEST(FeketeSolve, FiniteSetTooSmall) {
  auto fin = sets::finite({north(), ProjectivePoint::from_homogeneous({0.0, 1.0})});
  try {
    fekete_solve(fin, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SamplerExhausted);
  }
  EXPECT_NEAR(diameter_of_order(fin, 2), 1.0, 1e-15);
}

TEST(FeketeSolve, BallDiameterBound) {
  for (double r : {0.2, 0.5}) {
    auto ball = sets::geodesic_ball(north(), r);
    double d2 = diameter_of_order(ball, 2);
    double bound = std::sin(2.0 * r / std::sqrt(2.0));
    EXPECT_LE(d2, bound + 1e-9);
    EXPECT_NEAR(d2, bound, 1e-6);
  }
  auto tiny = sets::geodesic_ball(north(), 1e-6);
  EXPECT_LE(diameter_of_order(tiny, 3), 2e-6 / std::sqrt(2.0) + 1e-12);
}

TEST(Transfinite, MonotoneTableAndLimit) {
  std::vector<std::size_t> s_list;
  for (std::size_t s = 2; s <= 20; ++s) s_list.push_back(s);
  auto table = transfinite_estimate(sets::full_space(1), s_list, {}, std::exp(-0.5));
  EXPECT_TRUE(table.violations.empty());
  for (std::size_t k = 1; k < table.rows.size(); ++k) {
    EXPECT_LE(table.rows[k].D, table.rows[k - 1].D + kMonotoneSlack);
    EXPECT_GE(table.rows[k].theta, table.rows[k - 1].theta - 2e-9);
  }
  EXPECT_GT(table.limit, std::exp(-0.5));
  EXPECT_LT(*table.capacity_gap, 0.1);
  std::vector<std::size_t> bad = {3, 2};
  EXPECT_THROW(transfinite_estimate(sets::full_space(1), bad), Error);
}

TEST(Equidistribution, DiscrepancyShrinks) {
  auto P1 = sets::full_space(1);
  auto eq = equilibrium_solve(P1, 400);
  std::vector<FeketeConfiguration> configs;
  for (std::size_t s : {10, 20, 40}) configs.push_back(fekete_solve(P1, s));
  auto tests = sample_fs(1, 300, 3);
  auto rep = equidistribution_check(configs, eq, tests);
  ASSERT_EQ(rep.size(), 3u);
  EXPECT_GT(rep[0].discrepancy, rep[2].discrepancy);
  EXPECT_GT(rep[2].test_points_used, 0u);
}

TEST(Equidistribution, SelfComparisonAndAntipodalPair) {
  auto P1 = sets::full_space(1);
  auto cfg = fekete_solve(P1, 6);
  std::vector<FeketeConfiguration> configs = {cfg};
  auto tests = sample_fs(1, 100, 4);
  auto self = equidistribution_check(configs, DiscreteMeasure::uniform(cfg.points), tests);
  EXPECT_EQ(self[0].discrepancy, 0.0);
  std::vector<FeketeConfiguration> two = {fekete_solve(P1, 2)};
  auto eq = equilibrium_solve(P1, 200);
  EXPECT_GT(equidistribution_check(two, eq, tests)[0].discrepancy, 0.0);
}
