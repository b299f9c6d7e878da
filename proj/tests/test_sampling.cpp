#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "projcap/sampling.hpp"

using namespace projcap;

namespace {

// -int_0^{pi/2} log(sin t) dF(t) where sigma = sin t has density
// 2n sin^{2n-1} t cos t (FS measure on P^n); composite Simpson.
double fs_energy_by_quadrature(int n) {
  const int panels = 200000;
  const double a = 0.0, b = std::numbers::pi / 2.0, h = (b - a) / panels;
  auto f = [n](double t) {
    if (t <= 0.0) return 0.0;
    return -std::log(std::sin(t)) * 2.0 * n * std::pow(std::sin(t), 2 * n - 1) * std::cos(t);
  };
  double acc = f(a) + f(b);
  for (int k = 1; k < panels; ++k) acc += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

struct ThreadsGuard {
  explicit ThreadsGuard(const char* v) {
    const char* p = std::getenv("PROJCAP_THREADS");
    had = p != nullptr;
    if (had) saved = p;
    ::setenv("PROJCAP_THREADS", v, 1);
  }
  ~ThreadsGuard() {
    if (had) {
      ::setenv("PROJCAP_THREADS", saved.c_str(), 1);
    } else {
      ::unsetenv("PROJCAP_THREADS");
    }
  }
  bool had = false;
  std::string saved;
};

}  // namespace

TEST(Quadrature, FsEnergyIsOneOverTwoN) {
  EXPECT_NEAR(fs_energy_by_quadrature(1), 0.5, 1e-8);
  EXPECT_NEAR(fs_energy_by_quadrature(2), 0.25, 1e-8);
  EXPECT_NEAR(fs_energy_by_quadrature(3), 1.0 / 6.0, 1e-8);
}

TEST(SampleFs, SigmaLawOnP1) {
  auto pts = sample_fs(1, 100000, 1);
  auto fixed = ProjectivePoint::from_homogeneous({Complex(0.6, 0.0), Complex(0.0, 0.8)});
  std::vector<double> s;
  double mean = 0.0;
  for (const auto& p : pts) {
    s.push_back(sine_distance(p, fixed));
    mean += s.back();
  }
  mean /= static_cast<double>(s.size());
  EXPECT_NEAR(mean, 2.0 / 3.0, 0.01);
  std::sort(s.begin(), s.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double F = s[i] * s[i];
    double lo = static_cast<double>(i) / s.size(), hi = static_cast<double>(i + 1) / s.size();
    ks = std::max({ks, std::abs(F - lo), std::abs(F - hi)});
  }
  EXPECT_LT(ks, 0.01);
}

TEST(SampleFs, Deterministic) {
  auto a = sample_fs(2, 100, 5);
  auto b = sample_fs(2, 100, 5);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(a[i][k], b[i][k]);
  auto c = sample_fs(2, 100, 6);
  EXPECT_NE(a[0][0], c[0][0]);
}

TEST(McEnergy, FsOracles) {
  auto e1 = mc_energy(fs_sampler(1), 1000000, 1);
  EXPECT_NEAR(e1.value, fs_energy_by_quadrature(1), 0.01);
  EXPECT_LT(*e1.stderr_value, 0.003);
  auto e2 = mc_energy(fs_sampler(2), 1000000, 1);
  EXPECT_NEAR(e2.value, fs_energy_by_quadrature(2), 0.01);
}

TEST(McEnergy, DiracDiverges) {
  auto e = mc_energy(dirac_sampler(ProjectivePoint::from_homogeneous({1.0, 0.0})), 10000, 2);
  EXPECT_EQ(e.value, kInf);
  EXPECT_GT(e.rejected, 0u);
}

TEST(McEnergy, SameResultAtAnyThreadCount) {
  EnergyEstimate a, b;
  {
    ThreadsGuard g("1");
    a = mc_energy(fs_sampler(2), 50000, 9);
  }
  {
    ThreadsGuard g("4");
    b = mc_energy(fs_sampler(2), 50000, 9);
  }
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(*a.stderr_value, *b.stderr_value);
  EXPECT_EQ(a.samples, b.samples);
}
