#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <variant>

#include "projcap/measure.hpp"
#include "projcap/sampling.hpp"

using namespace projcap;

namespace {

ProjectivePoint pt(Complex a, Complex b) { return ProjectivePoint::from_homogeneous({a, b}); }

// Equilateral triangle on a great circle of P^1: pairwise sigma = sqrt(3)/2.
std::vector<ProjectivePoint> equilateral() {
  std::vector<ProjectivePoint> out;
  for (int k = 0; k < 3; ++k) {
    double t = std::numbers::pi * k / 3.0;
    out.push_back(pt(std::cos(t), std::sin(t)));
  }
  return out;
}

DiscreteMeasure random_measure(std::size_t n, std::size_t k, std::uint64_t seed) {
  auto atoms = sample_fs(n, k, seed);
  auto eng = stream_engine(seed, 99);
  std::vector<double> w(k);
  for (auto& x : w) x = uniform01(eng) + 0.1;
  return DiscreteMeasure(atoms, w);
}

}  // namespace

TEST(DiscreteMeasure, MergesDuplicatesAndDropsZeros) {
  auto a = pt(1.0, 0.0);
  auto a2 = pt(Complex(0.0, 2.0), 0.0);
  auto b = pt(0.0, 1.0);
  DiscreteMeasure mu({a, a2, b}, {0.25, 0.25, 0.0});
  EXPECT_EQ(mu.size(), 1u);
  EXPECT_DOUBLE_EQ(mu.weights()[0], 0.5);
  EXPECT_FALSE(mu.is_probability());
  EXPECT_TRUE(mu.scaled(2.0).is_probability());
  EXPECT_THROW(DiscreteMeasure({a}, {0.0}), Error);
  EXPECT_THROW(DiscreteMeasure({a}, {-1.0}), Error);
}

TEST(Potential, Examples) {
  auto a = pt(1.0, 0.0), b = pt(0.0, 1.0);
  EXPECT_EQ(potential(DiscreteMeasure::dirac(a), a), kNegInf);
  EXPECT_EQ(potential(DiscreteMeasure::dirac(a), b), 0.0);
  auto half = DiscreteMeasure::uniform({a, b});
  EXPECT_NEAR(potential(half, pt(1.0, 1.0)), std::log(1.0 / std::sqrt(2.0)), 1e-15);
}

TEST(Potential, NonPositiveForProbability) {
  auto mu = random_measure(2, 30, 1);
  mu = mu.scaled(1.0 / mu.total_mass());
  for (const auto& z : sample_fs(2, 200, 2)) EXPECT_LE(potential(mu, z), 0.0);
}

TEST(MutualEnergy, Examples) {
  auto a = pt(1.0, 0.0), b = pt(0.0, 1.0);
  EXPECT_EQ(mutual_energy(DiscreteMeasure::dirac(a), DiscreteMeasure::dirac(b)).value, 0.0);
  EXPECT_EQ(mutual_energy(DiscreteMeasure::dirac(a), DiscreteMeasure::dirac(a)).value, kInf);
  EXPECT_EQ(energy(DiscreteMeasure::dirac(a)).value, kInf);
  EXPECT_EQ(energy(DiscreteMeasure({a, b}, {1.0, 1.0})).value, kInf);
  EXPECT_FALSE(energy(DiscreteMeasure::dirac(a)).stderr_value.has_value());
}

TEST(MutualEnergy, SymmetricBilinearAndDirect) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto mu = random_measure(2, 7, 10 + s);
    auto nu = random_measure(2, 5, 40 + s);
    double ab = mutual_energy(mu, nu).value;
    double ba = mutual_energy(nu, mu).value;
    EXPECT_EQ(std::memcmp(&ab, &ba, sizeof ab), 0);
    EXPECT_NEAR(mutual_energy(mu.scaled(2.0), nu).value, 2.0 * ab, 1e-12 * (1 + ab));
    double direct = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t j = 0; j < nu.size(); ++j)
        direct += mu.weights()[i] * nu.weights()[j] * -std::log(sine_distance(mu.atoms()[i], nu.atoms()[j]));
    EXPECT_NEAR(ab, direct, 1e-12 * (1 + direct));
  }
}

TEST(OffdiagEnergy, Examples) {
  EXPECT_EQ(offdiag_energy(DiscreteMeasure::uniform({pt(1.0, 0.0), pt(0.0, 1.0)})), 0.0);
  EXPECT_NEAR(offdiag_energy(DiscreteMeasure::uniform(equilateral())), 2.0 / 3.0 * -std::log(std::sqrt(3.0) / 2.0),
              1e-15);
  try {
    offdiag_energy(DiscreteMeasure::dirac(pt(1.0, 0.0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SingleAtom);
  }
}

TEST(OffdiagEnergy, PermutationInvariant) {
  auto pts = sample_fs(1, 12, 3);
  auto rev = pts;
  std::reverse(rev.begin(), rev.end());
  EXPECT_NEAR(offdiag_energy(DiscreteMeasure::uniform(pts)), offdiag_energy(DiscreteMeasure::uniform(rev)), 1e-15);
}

TEST(Polarization, ResidualTiny) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    auto mu = random_measure(1, 3, 100 + s);
    auto nu = random_measure(1, 3, 200 + s);
    EXPECT_LT(polarization_residual(mu, nu), 1e-12);
    EXPECT_LT(polarization_residual(mu.scaled(5.0), nu.scaled(0.1)), 1e-11);
  }
}

TEST(Polarization, SharedAtomsRejected) {
  auto mu = random_measure(1, 3, 1);
  try {
    polarization_residual(mu, mu);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SharedAtoms);
  }
}

TEST(BallMass, ProfileProperties) {
  auto a = pt(1.0, 0.0);
  std::vector<double> grid = {0.1, 0.5, 1.0, kDiameter};
  for (double v : ball_mass_profile(DiscreteMeasure::dirac(a), a, grid)) EXPECT_EQ(v, 1.0);
  auto mu = DiscreteMeasure::uniform(sample_fs(1, 100, 4));
  auto prof = ball_mass_profile(mu, pt(0.3, 0.7), grid);
  EXPECT_DOUBLE_EQ(prof.back(), mu.total_mass());
  for (std::size_t k = 1; k < prof.size(); ++k) EXPECT_GE(prof[k], prof[k - 1]);
  std::vector<double> bad = {0.5, 0.1};
  try {
    ball_mass_profile(mu, a, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnsortedGrid);
  }
}

TEST(LayerCake, SingleAtomCases) {
  auto z = pt(1.0, 0.0);
  auto far = DiscreteMeasure::dirac(pt(0.0, 1.0));
  EXPECT_NEAR(potential_from_growth(far, z, layer_cake_grid(0.1)), 0.0, 1e-6);
  auto mid = DiscreteMeasure::dirac(pt(1.0, 1.0));
  double v = potential_from_growth(mid, z, layer_cake_grid(0.05));
  EXPECT_NEAR(v, -std::log(1.0 / std::sqrt(2.0)), 0.01 * 0.34657);
  try {
    potential_from_growth(far, pt(0.0, 1.0), layer_cake_grid(0.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::AtomCoincidence);
  }
}

TEST(LayerCake, MatchesDirectPotential) {
  auto mu = random_measure(2, 50, 5);
  for (const auto& z : sample_fs(2, 100, 6)) {
    double nearest = kInf;
    for (const auto& a : mu.atoms()) nearest = std::min(nearest, geodesic_distance(z, a));
    double lc = potential_from_growth(mu, z, layer_cake_grid(nearest / 20.0));
    double g = potential(mu, z);
    EXPECT_LT(std::abs(lc + g) / std::abs(g), 0.01);
  }
}

TEST(GrowthCertificate, FsSamplesSucceed) {
  auto mu = DiscreteMeasure::uniform(sample_fs(1, 10000, 7));
  auto centers = sample_fs(1, 40, 8);
  std::vector<double> radii;
  for (double r = 0.05; r < kDiameter; r *= 1.3) radii.push_back(r);
  auto res = finite_energy_certificate(mu, 2.0, 3.0, centers, radii);
  ASSERT_TRUE(std::holds_alternative<GrowthCertificate>(res));
  auto cert = std::get<GrowthCertificate>(res);
  // oracle: composite midpoint rule of s^2 (1/sqrt2) cot(s/sqrt2) on (0, pi/sqrt2)
  const int cells = 400000;
  double q = 0.0;
  for (int k = 0; k < cells; ++k) {
    double s = kDiameter * (k + 0.5) / cells;
    q += s * s * kInvSqrt2 / std::tan(s * kInvSqrt2);
  }
  q *= kDiameter / cells;
  EXPECT_NEAR(cert.bound, 3.0 * q, 1e-6 * q);
  EXPECT_LE(growth_bound_integral(2.0, 3.0), growth_bound_integral(2.0, 4.0));
}

TEST(GrowthCertificate, AtomFails) {
  auto a = pt(1.0, 0.0);
  std::vector<ProjectivePoint> centers = {pt(0.0, 1.0)};
  std::vector<double> radii = {0.01, 0.1, 1.0};
  auto res = finite_energy_certificate(DiscreteMeasure::dirac(a), 2.0, 3.0, centers, radii);
  ASSERT_TRUE(std::holds_alternative<GrowthWitness>(res));
  EXPECT_DOUBLE_EQ(std::get<GrowthWitness>(res).radius, 0.01);
}

TEST(LowerSemicontinuity, EmpiricalEnergiesStayBelowLimit) {
  // off-diagonal energies of N FS samples vs. the MC value of I(mu_FS)
  auto mc = mc_energy(fs_sampler(1), 200000, 77);
  for (std::size_t N : {100, 1000, 4000}) {
    double e = offdiag_energy(DiscreteMeasure::uniform(sample_fs(1, N, N)));
    EXPECT_LE(e, mc.value + 3.0 * *mc.stderr_value + 0.02);
    EXPECT_GT(e, 0.35);
  }
}

TEST(ContinuityPrinciple, OffCircleApproach) {
  // uniform measure on a great circle (the real points of P^1); approach a
  // circle point from off the circle along [1 : t + i eps]
  std::vector<ProjectivePoint> circle;
  for (int k = 0; k < 2000; ++k) {
    double t = std::numbers::pi * (k + 0.5) / 2000.0;
    circle.push_back(pt(std::cos(t), std::sin(t)));
  }
  auto mu = DiscreteMeasure::uniform(circle);
  auto z0 = pt(1.0, 0.3);
  double base = potential(mu, z0);
  double prev = kInf;
  for (double eps : {0.3, 0.1, 0.03, 0.01}) {
    double diff = std::abs(potential(mu, pt(1.0, Complex(0.3, eps))) - base);
    EXPECT_LT(diff, prev + 1e-9);
    prev = diff;
  }
  EXPECT_LT(prev, 0.02);
}
