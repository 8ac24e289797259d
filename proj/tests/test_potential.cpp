#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "becl/manybody/sobolev.hpp"
#include "becl/potential.hpp"

using namespace becl;

namespace {

const double kPi = std::numbers::pi;

double gaussian_mass(double g, double s) { return g * std::pow(2.0 * kPi, 1.5) * s * s * s; }

SampledProfile sampled_gaussian(double g, double sigma, int points, double spacing) {
  std::vector<double> v(static_cast<std::size_t>(points) * points * points);
  const double c = 0.5 * (points - 1);
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j)
      for (int k = 0; k < points; ++k) {
        const double x = (i - c) * spacing, y = (j - c) * spacing, z = (k - c) * spacing;
        v[(static_cast<std::size_t>(i) * points + j) * points + k] =
            g * std::exp(-0.5 * (x * x + y * y + z * z) / (sigma * sigma));
      }
  return SampledProfile(points, spacing, v);
}

}  // namespace

TEST(ScaledPotential, UnitScalesLeaveProfileUnchanged) {
  const GaussianProfile v{1.3, 0.8};
  for (double beta : {0.05, 0.2, 0.39}) {
    ScaledPotential p(v, beta, 1, 1.0);
    for (auto r : {std::array<double, 3>{0, 0, 0}, {0.3, -0.2, 1.1}, {1.5, 0.7, -0.4}})
      EXPECT_NEAR(evaluate_scaled(p, r), v(r[0], r[1], r[2]), 1e-15);
  }
}

TEST(ScaledPotential, ExponentArithmeticAtOrigin) {
  ScaledPotential p(GaussianProfile{1.0, 1.0}, 0.2, 16, 4.0);
  EXPECT_NEAR(evaluate_scaled(p, {0, 0, 0}), 4.0, 1e-12);
}

TEST(ScaledPotential, MatchesDirectScalingFormula) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const GaussianProfile v{2.0, 0.7};
  for (int trial = 0; trial < 10; ++trial) {
    const double beta = 0.05 + 0.3 * (u(rng) + 1.0) / 2.0;
    const int n = 1 + trial * 7;
    const double w = 1.0 + 10.0 * (u(rng) + 1.0);
    ScaledPotential p(v, beta, n, w);
    const double x = u(rng), y = u(rng), z = 3.0 * u(rng);
    const double s = std::pow(n * std::sqrt(w), beta);
    const double oracle = std::pow(n, 3 * beta) * std::pow(w, (3 * beta - 1) / 2) * v(s * x, s * y, s * z / std::sqrt(w));
    EXPECT_NEAR(p(x, y, z), oracle, 1e-12 * std::max(1.0, oracle));
  }
}

TEST(ScaledPotential, RejectsInvalidParameters) {
  EXPECT_THROW(ScaledPotential(GaussianProfile{1, 1}, 0.4, 2, 1.0), std::domain_error);
  EXPECT_THROW(ScaledPotential(GaussianProfile{1, 1}, 0.0, 2, 1.0), std::domain_error);
  EXPECT_THROW(ScaledPotential(GaussianProfile{1, 1}, 0.2, 0, 1.0), std::domain_error);
  EXPECT_THROW(ScaledPotential(GaussianProfile{1, 1}, 0.2, 2, 0.5), std::domain_error);
  EXPECT_THROW(ScaledPotential(GaussianProfile{-1, 1}, 0.2, 2, 1.0), std::domain_error);
  EXPECT_THROW(ScaledPotential(GaussianProfile{1, 0}, 0.2, 2, 1.0), std::domain_error);
}

TEST(ScaledPotential, QuadratureMassEqualsProfileMass) {
  ScaledPotential p(GaussianProfile{1.0, 1.0}, 0.2, 16, 4.0);
  EXPECT_NEAR(integrate_scaled(p).mass, gaussian_mass(1.0, 1.0), 1e-8);
}

TEST(ScaledPotential, MassInvarianceRandomParameters) {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double beta = 0.01 + 0.38 * u(rng);
    const int n = 1 + static_cast<int>(1000 * u(rng));
    const double w = 1.0 + 100.0 * u(rng);
    const GaussianProfile v{0.5 + u(rng), 0.5 + u(rng)};
    ScaledPotential p(v, beta, n, w);
    const double b = b0(p);
    EXPECT_LE(std::abs(integrate_scaled(p, 64).mass - b), 1e-6 * b) << beta << " " << n << " " << w;
  }
}

TEST(ScaledPotential, SecondMomentsConcentrate) {
  const double beta = 0.2;
  std::vector<double> a, x2, z2;
  for (int n : {4, 16, 64}) {
    ScaledPotential p(GaussianProfile{1.0, 1.0}, beta, n, 1.0);
    a.push_back(n);
    x2.push_back(integrate_scaled(p, 64).x_second);
  }
  EXPECT_NEAR(loglog_slope(a, x2), -2 * beta, 0.02);
  // Fixed N, growing omega: z^2-moment / omega carries the same exponent in N sqrt(omega).
  a.clear();
  for (double w : {1.0, 16.0, 256.0}) {
    ScaledPotential p(GaussianProfile{1.0, 1.0}, beta, 4, w);
    a.push_back(4.0 * std::sqrt(w));
    z2.push_back(integrate_scaled(p, 64).z_second / w);
  }
  EXPECT_NEAR(loglog_slope(a, z2), -2 * beta, 0.02);
}

TEST(B0, GaussianClosedForm) {
  EXPECT_NEAR(b0(GaussianProfile{1.0, 1.0}), std::pow(2.0 * kPi, 1.5), 1e-12);
  EXPECT_NEAR(b0(GaussianProfile{1.0, 1.0}), 15.7496099457, 1e-9);
  EXPECT_EQ(b0(GaussianProfile{0.0, 1.0}), 0.0);
}

TEST(B0, SampledQuadratureAgreesWithClosedForm) {
  const auto s = sampled_gaussian(1.0, 1.0, 65, 0.25);
  EXPECT_NEAR(b0(s), gaussian_mass(1.0, 1.0), 1e-8);
  // The trilinear interpolant reproduces samples at grid points.
  EXPECT_NEAR(s(0.0, 0.0, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(s(0.25, -0.5, 0.75), std::exp(-0.5 * (0.0625 + 0.25 + 0.5625)), 1e-15);
  EXPECT_EQ(s(100.0, 0.0, 0.0), 0.0);
}

TEST(B0, SampledProfileRejectsBadData) {
  std::vector<double> v(27, 0.0);
  v[13] = 1.0;
  EXPECT_NO_THROW(SampledProfile(3, 1.0, v));
  auto inf = v;
  inf[13] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(SampledProfile(3, 1.0, inf), std::domain_error);
  auto neg = v;
  neg[13] = -1.0;
  EXPECT_THROW(SampledProfile(3, 1.0, neg), std::domain_error);
  auto flat = std::vector<double>(27, 1.0);
  EXPECT_THROW(SampledProfile(3, 1.0, flat), std::domain_error);
  EXPECT_THROW(SampledProfile(3, 1.0, std::vector<double>(8, 0.0)), std::invalid_argument);
}

TEST(B0, SampledProfileScalesLikeGaussian) {
  ScaledPotential p(sampled_gaussian(1.0, 1.0, 57, 0.25), 0.2, 8, 4.0);
  ScaledPotential q(GaussianProfile{1.0, 1.0}, 0.2, 8, 4.0);
  // Trilinear interpolation at spacing 0.25 costs O(h^2 / 8) locally.
  const double m = integrate_scaled(q, 96).mass;
  EXPECT_NEAR(integrate_scaled(p, 96).mass, m, 1e-3 * m);
}

TEST(CouplingConstant, UnitGaussianGivesTwoPi) {
  HermiteBasis basis;
  ScaledPotential p(GaussianProfile{1.0, 1.0}, 0.2, 10, 4.0);
  EXPECT_NEAR(coupling_constant(p, basis), 2.0 * kPi, 1e-8);
  ScaledPotential zero(GaussianProfile{0.0, 1.0}, 0.2, 10, 4.0);
  EXPECT_EQ(coupling_constant(zero, basis), 0.0);
  ScaledPotential twice(GaussianProfile{2.0, 1.0}, 0.2, 10, 4.0);
  EXPECT_NEAR(coupling_constant(twice, basis), 2.0 * coupling_constant(p, basis), 1e-12);
}
