#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "becl/nls2d.hpp"

using namespace becl;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

double max_phase_error(const Field2D& a, const Field2D& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(std::arg(a.values[i] / b.values[i])));
  return worst;
}

}  // namespace

TEST(PeriodicGrid, Geometry) {
  PeriodicGrid2D g(8, 2.0);
  EXPECT_DOUBLE_EQ(g.dx(), 0.5);
  EXPECT_DOUBLE_EQ(g.coord(0), -2.0);
  EXPECT_DOUBLE_EQ(g.coord(7), 1.5);
  EXPECT_DOUBLE_EQ(g.wavenumber(1), std::numbers::pi / 2.0);
  EXPECT_DOUBLE_EQ(g.wavenumber(7), -std::numbers::pi / 2.0);
  EXPECT_THROW(PeriodicGrid2D(7, 2.0), std::invalid_argument);
  EXPECT_THROW(PeriodicGrid2D(8, 0.0), std::invalid_argument);
}

TEST(Step2D, FreeGaussianMatchesClosedForm) {
  NLS2DConfig cfg{0.0, 1e-3, 2, 8.0, 64};
  NLS2DSolver s(cfg);
  Field2D f = gaussian_2d(cfg.grid(), 1.0);
  s.evolve(f, 100);
  EXPECT_LE(l2_distance(f, free_gaussian_exact(cfg.grid(), 1.0, f.time)), 1e-8);
  EXPECT_NEAR(f.time, 0.1, 1e-12);
}

TEST(Step2D, PlaneWavePhase) {
  const double c = kTwoPi;
  NLS2DConfig cfg{c, 1e-3, 2, 8.0, 64};
  NLS2DSolver s(cfg);
  const cplx amp(0.3, 0.1);
  Field2D f = plane_wave(cfg.grid(), amp, {1, 2}, c, 0.0);
  s.evolve(f, 1000);
  EXPECT_LE(max_phase_error(f, plane_wave(cfg.grid(), amp, {1, 2}, c, 1.0)), 1e-6);
}

TEST(Step2D, MassConservedOverThousandSteps) {
  for (double c : {0.0, kTwoPi, 20.0}) {
    NLS2DConfig cfg{c, 1e-3, 2, 8.0, 64};
    NLS2DSolver s(cfg);
    Field2D f = gaussian_2d(cfg.grid(), 1.0, {0.5, -0.3}, {0.7, 0.2}, true);
    const double m0 = f.mass();
    s.evolve(f, 1000);
    EXPECT_LE(std::abs(f.mass() - m0), 1e-10) << "c = " << c;
  }
}

TEST(Step2D, StrangSecondOrder) {
  const double c = kTwoPi, t = 0.4, dt = 0.02;
  auto run = [&](double h) {
    NLS2DConfig cfg{c, h, 2, 8.0, 64};
    Field2D f = gaussian_2d(cfg.grid(), 1.0, {0.0, 0.0}, {0.5, 0.0}, true);
    NLS2DSolver(cfg).evolve(f, static_cast<int>(std::lround(t / h)));
    return f;
  };
  const Field2D ref = run(dt / 8.0);
  const double e1 = l2_distance(run(dt), ref);
  const double e2 = l2_distance(run(dt / 2.0), ref);
  EXPECT_NEAR(e1 / e2, 4.0, 0.8);
}

TEST(Step2D, StepValueFormMatchesSolver) {
  NLS2DConfig cfg{1.0, 1e-3, 2, 4.0, 16};
  Field2D f = gaussian_2d(cfg.grid(), 1.0, {0, 0}, {0, 0}, true);
  Field2D g = step_2d(f, cfg);
  NLS2DSolver(cfg).step(f);
  EXPECT_EQ(f.values, g.values);
  EXPECT_EQ(f.time, g.time);
}

TEST(Step2D, StabilityGuard) {
  NLS2DConfig cfg{1000.0, 1e-3, 2, 8.0, 32};
  Field2D f = plane_wave(cfg.grid(), 1.0, {0, 0});
  EXPECT_THROW(NLS2DSolver(cfg).step(f), std::runtime_error);
}

TEST(Step2D, NonFiniteAborts) {
  NLS2DConfig cfg{0.0, 1e-3, 2, 8.0, 16};
  Field2D f = gaussian_2d(cfg.grid(), 1.0);
  f.values[5] = cplx(std::nan(""), 0.0);
  EXPECT_THROW(NLS2DSolver(cfg).step(f), std::runtime_error);
}

TEST(Step2D, ConfigValidation) {
  EXPECT_THROW(NLS2DSolver(NLS2DConfig{-1.0}), std::invalid_argument);
  EXPECT_THROW(NLS2DSolver(NLS2DConfig{0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(NLS2DSolver(NLS2DConfig{0.0, 1e-3, 4}), std::invalid_argument);
}

TEST(Step2D, MomentumConserved) {
  NLS2DConfig cfg{kTwoPi, 1e-3, 2, 8.0, 64};
  Field2D f = gaussian_2d(cfg.grid(), 1.0, {0.0, 0.0}, {0.6, -0.4}, true);
  const auto p0 = spectral_moments(f).momentum;
  NLS2DSolver(cfg).evolve(f, 500);
  const auto p1 = spectral_moments(f).momentum;
  EXPECT_NEAR(p1[0], p0[0], 1e-8);
  EXPECT_NEAR(p1[1], p0[1], 1e-8);
}

TEST(GpEnergy, ZeroField) {
  Field2D f(PeriodicGrid2D(16, 4.0));
  EXPECT_EQ(gp_energy_2d(f, 1.0, 3.0), 0.0);
}

TEST(GpEnergy, PlaneWaveKinetic) {
  const PeriodicGrid2D g(32, 4.0);
  const cplx amp(0.5, 0.2);
  const Field2D f = plane_wave(g, amp, {2, -1});
  const double k2 = std::pow(std::numbers::pi / 4.0, 2) * (4 + 1);
  EXPECT_NEAR(gp_energy_2d(f, 0.0, 0.0), std::norm(amp) * k2 * std::pow(2.0 * 4.0, 2), 1e-10);
}

TEST(GpEnergy, TrapAndQuarticTerms) {
  // Gaussian exp(-r^2/2): int r^2 |phi|^2 = pi, int |phi|^4 = pi / 2, int |grad phi|^2 = pi.
  const PeriodicGrid2D g(64, 8.0);
  const Field2D f = gaussian_2d(g, 1.0);
  const double w0 = 0.7, ng = 0.3;
  const double oracle = std::numbers::pi + w0 * w0 * std::numbers::pi + 4.0 * std::numbers::pi * ng * std::numbers::pi / 2.0;
  EXPECT_NEAR(gp_energy_2d(f, w0, ng), oracle, 1e-10);
}

TEST(NlsEnergy, ConservedOverUnitTime) {
  auto drift = [](double dt) {
    NLS2DConfig cfg{kTwoPi, dt, 2, 8.0, 64};
    Field2D f = gaussian_2d(cfg.grid(), 1.0, {0.0, 0.0}, {0.5, 0.0}, true);
    const double e0 = nls_energy_2d(f, cfg.coupling);
    NLS2DSolver(cfg).evolve(f, static_cast<int>(std::lround(1.0 / dt)));
    return std::abs(nls_energy_2d(f, cfg.coupling) - e0) / e0;
  };
  const double d1 = drift(1e-3);
  EXPECT_LE(d1, 1e-6);
  // The drift is a splitting error: halving dt shrinks it.
  EXPECT_LT(drift(5e-4), d1);
}
