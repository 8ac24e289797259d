#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "becl/hierarchy/bbgky.hpp"
#include "becl/hierarchy/collision.hpp"
#include "becl/hierarchy/gp_residual.hpp"
#include "becl/hierarchy/mollifier.hpp"
#include "becl/hierarchy/observable.hpp"

using namespace becl;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

std::vector<cplx> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  double s = 0.0;
  for (auto& x : v) {
    x = cplx(nd(rng), nd(rng));
    s += std::norm(x);
  }
  for (auto& x : v) x /= std::sqrt(s);
  return v;
}

NlsTriple gp_triple(int n, double dt, double t, double coupling) {
  NLS2DConfig cfg{coupling, dt, 2, 8.0, n};
  return nls_triple(gaussian_2d(cfg.grid(), 1.0, {0.0, 0.0}, {0.5, 0.0}, true), cfg, t);
}

ManyBodyState two_mode_product(const OneBodySpace& sp, int n) {
  const std::vector<cplx> c = {std::sqrt(0.9), std::sqrt(0.1)};
  const auto phi = one_body_vector(
      sp, [](double x, double y) { return std::exp(-0.5 * (x * x + y * y)) * std::polar(1.0, 0.3 * x); }, c);
  return product_state(sp, n, phi);
}

}  // namespace

TEST(Collision, ProductFormula) {
  // For g = |f><f|^{(x)(k+1)}: B_j g = [|phi|^2 (x_j), g^(k)] with |phi|^2 = |f|^2 / dA.
  const OneBodySpace sp = x_space(PeriodicGrid2D(4, 2.0));
  const auto f = random_vector(sp.dim(), 3);
  const double cell = sp.grid.cell_area();
  for (int k : {1, 2}) {
    const auto gk = product_density(sp, f, k);
    const auto gn = product_density(sp, f, k + 1);
    const std::size_t d = sp.dim();
    for (int j = 0; j < k; ++j) {
      const auto b = collision_apply(gn, j);
      const std::size_t stride = k == 2 && j == 0 ? d : 1;
      double worst = 0.0;
      for (Eigen::Index a = 0; a < gk.kernel.rows(); ++a)
        for (Eigen::Index c = 0; c < gk.kernel.cols(); ++c) {
          const double da = std::norm(f[(a / stride) % d]) / cell, dc = std::norm(f[(c / stride) % d]) / cell;
          worst = std::max(worst, std::abs(b.kernel(a, c) - (da - dc) * gk.kernel(a, c)));
        }
      EXPECT_LE(worst, 1e-12) << k << " " << j;
    }
  }
}

TEST(Collision, SkewHermitianWithZeroDiagonal) {
  const OneBodySpace sp = x_space(PeriodicGrid2D(4, 2.0));
  const auto g = product_density(sp, random_vector(sp.dim(), 9), 3);
  for (int j : {0, 1}) {
    const auto b = collision_apply(g, j);
    EXPECT_LE((b.kernel + b.kernel.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(b.kernel.diagonal().cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_THROW(collision_apply(g, 2), std::invalid_argument);
  EXPECT_THROW(collision_apply(product_density(OneBodySpace{PeriodicGrid2D(4, 2.0), 2}, random_vector(32, 1), 2), 0),
               std::invalid_argument);
}

TEST(Collision, CoupledContractionCarriesQuarticFactor) {
  const OneBodySpace sp = x_space(PeriodicGrid2D(4, 2.0));
  const HermiteBasis basis(4);
  const auto g = product_density(sp, random_vector(sp.dim(), 5), 2);
  const auto plain = collision_apply(g, 0);
  const auto coupled = coupled_collision_apply(g, 0, basis);
  EXPECT_LE((coupled.kernel - quartic_norm(basis) * plain.kernel).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(quartic_norm(HermiteBasis()), 1.0 / std::sqrt(kTwoPi), 1e-10);
}

TEST(Observables, PanelIsSeededAndTransposable) {
  const OneBodySpace sp{PeriodicGrid2D(4, 2.0), 2};
  const auto a = observable_panel(sp, 2, 3, 17), b = observable_panel(sp, 2, 3, 17);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[1].u, b[1].u);
  EXPECT_EQ(a[0].id, "J2_0");
  EXPECT_NE(observable_panel(sp, 2, 3, 18)[0].u, a[0].u);
  // A symmetric density cannot tell J from its slot transposition.
  const auto s = random_symmetric_state(sp, 2, 6);
  const auto g = marginal(s, 2);
  for (const auto& j : a) EXPECT_LE(std::abs(j.trace_with(g.kernel) - j.transposed(0, 1).trace_with(g.kernel)), 1e-14);
  for (const auto& j : a) EXPECT_NEAR(j.op_norm(), 1.0, 1e-12);
}

TEST(Observables, MatrixElementMatchesDenseTrace) {
  const OneBodySpace sp{PeriodicGrid2D(4, 2.0), 2};
  const auto s = random_symmetric_state(sp, 3, 2);
  for (int k : {1, 2}) {
    const auto g = marginal(s, k);
    for (const auto& j : observable_panel(sp, k, 2, 4)) {
      EXPECT_LE(std::abs(observable_matrix_element(j, s.amplitudes(), s.amplitudes()) - j.trace_with(g.kernel)), 1e-14);
    }
  }
}

TEST(Observables, MetricAxioms) {
  const OneBodySpace sp{PeriodicGrid2D(4, 2.0), 2};
  const auto panel = observable_panel(sp, 1, 8, 1);
  const auto a = marginal(random_symmetric_state(sp, 2, 1), 1);
  const auto b = marginal(random_symmetric_state(sp, 2, 2), 1);
  const auto c = marginal(random_symmetric_state(sp, 2, 3), 1);
  EXPECT_EQ(metric_dk(panel, a, a), 0.0);
  EXPECT_DOUBLE_EQ(metric_dk(panel, a, b), metric_dk(panel, b, a));
  EXPECT_GT(metric_dk(panel, a, b), 0.0);
  EXPECT_LE(metric_dk(panel, a, c), metric_dk(panel, a, b) + metric_dk(panel, b, c) + 1e-15);
  // Weights sum below one and |Tr J X| <= ||J|| ||X||_1.
  EXPECT_LE(metric_dk(panel, a, b), trace_distance(a, b).trace_norm);
}

TEST(Bbgky, DenseAndVectorRoutesAgree) {
  const OneBodySpace sp{PeriodicGrid2D(4, 2.0), 2};
  const double w = 4.0;
  const ScaledPotential v(GaussianProfile{1.0, 1.0}, 0.2, 2, w);
  const ManyBodyOperator op2(sp, 2, 2, w, v), op1(sp, 1, 2, w, v);
  const auto tr = evolve_triple(two_mode_product(sp, 2), op2, 0.1, 0.01);
  for (int k : {1, 2}) {
    const auto panel = observable_panel(sp, k, 4, 3);
    const auto vec = bbgky_residual_vector(tr.minus, tr.center, tr.plus, op2, panel);
    const auto gn = marginal(tr.center, 2);
    const auto dense = k == 1 ? bbgky_residual(marginal(tr.minus, 1), marginal(tr.center, 1), marginal(tr.plus, 1), &gn,
                                               op1, &op2, panel)
                              : bbgky_residual(marginal(tr.minus, 2), gn, marginal(tr.plus, 2), nullptr, op2, nullptr, panel);
    ASSERT_EQ(vec.values.size(), dense.values.size());
    for (std::size_t i = 0; i < vec.values.size(); ++i)
      EXPECT_NEAR(vec.values[i], dense.values[i], 1e-9 * std::max(1.0, dense.values[i])) << k << " " << i;
    EXPECT_EQ(vec.k, k);
  }
}

TEST(Bbgky, ResidualConvergesSecondOrder) {
  const OneBodySpace sp{PeriodicGrid2D(4, 2.0), 2};
  const double w = 4.0;
  const ManyBodyOperator op(sp, 2, 2, w, ScaledPotential(GaussianProfile{1.0, 1.0}, 0.2, 2, w));
  const auto panel = observable_panel(sp, 1, 4, 7);
  auto residual = [&](double dt) {
    const auto tr = evolve_triple(two_mode_product(sp, 2), op, 0.1, dt);
    return bbgky_residual_vector(tr.minus, tr.center, tr.plus, op, panel).residual;
  };
  const double r1 = residual(0.01), r2 = residual(0.005);
  EXPECT_GE(r1 / r2, 2.8);
  EXPECT_LE(r1 / r2, 5.2);
}

TEST(Bbgky, ProvenanceChecks) {
  const OneBodySpace sp{PeriodicGrid2D(4, 2.0), 2};
  const ManyBodyOperator op(sp, 2, 2, 4.0);
  const auto panel = observable_panel(sp, 1, 2, 1);
  const auto tr = evolve_triple(two_mode_product(sp, 2), op, 0.02, 0.01);
  const auto other = two_mode_product(sp, 2);
  EXPECT_THROW(bbgky_residual_vector(other, tr.center, tr.plus, op, panel), std::invalid_argument);
  EXPECT_THROW(bbgky_residual_vector(tr.center, tr.center, tr.plus, op, panel), std::invalid_argument);
  EXPECT_THROW(evolve_triple(other, op, 0.015, 0.01), std::invalid_argument);
}

TEST(GpResidual, ProductAndDenseRoutesAgree) {
  // The dense route forms g^(k+1), so k = 2 runs on a 4x4 grid.
  for (int k : {1, 2}) {
    const auto tr = gp_triple(k == 1 ? 8 : 4, 0.01, 0.05, kTwoPi);
    const auto sp = x_space(tr.center.grid);
    const auto panel = observable_panel(sp, k, 4, 21);
    const auto a = gp_residual_2d(tr, kTwoPi, k, panel);
    const auto b = gp_residual_2d_dense(tr, kTwoPi, k, panel);
    for (std::size_t i = 0; i < a.values.size(); ++i)
      EXPECT_NEAR(a.values[i], b.values[i], 1e-10 * std::max(1.0, b.values[i])) << k << " " << i;
  }
}

TEST(GpResidual, LinearCaseIsPureDifferenceError) {
  const auto panel = observable_panel(x_space(PeriodicGrid2D(64, 8.0)), 1, 6, 11);
  const double r1 = gp_residual_2d(gp_triple(64, 0.002, 0.2, 0.0), 0.0, 1, panel).residual;
  const double r2 = gp_residual_2d(gp_triple(64, 0.001, 0.2, 0.0), 0.0, 1, panel).residual;
  EXPECT_LE(r1, 1e-4);
  EXPECT_NEAR(r1 / r2, 4.0, 0.2);
}

TEST(GpResidual, RefinementRatioAndOrderK) {
  auto residual = [](int level, int k) {
    const int n = 64 << level;
    const double dt = 0.002 / (1 << level);
    const auto panel = observable_panel(x_space(PeriodicGrid2D(n, 8.0)), k, 6, 11);
    return gp_residual_2d(gp_triple(n, dt, 0.2, kTwoPi), kTwoPi, k, panel).residual;
  };
  const double r0 = residual(0, 1), r1 = residual(1, 1);
  EXPECT_GE(r0 / r1, 2.8);
  EXPECT_LE(r0 / r1, 5.2);
  const double k2 = residual(0, 2);
  EXPECT_LE(k2, 3.0 * r0);
  EXPECT_GE(k2, r0 / 3.0);
}

TEST(GpResidual, StableInTime) {
  const auto panel = observable_panel(x_space(PeriodicGrid2D(64, 8.0)), 1, 6, 11);
  const double a = gp_residual_2d(gp_triple(64, 0.002, 0.1, kTwoPi), kTwoPi, 1, panel).residual;
  const double b = gp_residual_2d(gp_triple(64, 0.002, 0.2, kTwoPi), kTwoPi, 1, panel).residual;
  EXPECT_LE(b, 3.0 * a);
  EXPECT_LE(a, 3.0 * b);
}

TEST(Mollifier, UnitMass) {
  const Grid3D g;
  for (double a : {1.0, 0.5}) EXPECT_NEAR(mollifier_mass(Mollifier{a}, g), 1.0, 1e-10) << a;
  EXPECT_NEAR(mollifier_mass(Mollifier{0.25}, Grid3D{96, 6.0}), 1.0, 1e-10);
  EXPECT_NEAR(mollifier_mass(Mollifier{8.0}, g), 1.0, 1e-10);
  EXPECT_THROW(Mollifier{}.density(0, 0, 0), std::domain_error);
}

TEST(Mollifier, MomentClosedForm) {
  // kappa -> 0 gives the total mass; kappa = 2 gives E|r|^2 = 3.
  EXPECT_NEAR(Mollifier::moment(0.0), 1.0, 1e-14);
  EXPECT_NEAR(Mollifier::moment(2.0), 3.0, 1e-13);
}

TEST(Mollifier, MatchedPairVanishes) {
  const auto p = MollifierProblem::standard(Grid3D{24, 6.0});
  EXPECT_EQ(mollifier_difference(p, 0.5, 0.5), cplx(0.0));
  EXPECT_EQ(mollifier_difference(p, 0.0, 0.0), cplx(0.0));
  EXPECT_NEAR(std::abs(mollifier_difference(p, 1.0, 0.0) + mollifier_difference(p, 0.0, 1.0)), 0.0, 1e-16);
}

TEST(Mollifier, KappaDomain) {
  EXPECT_THROW(check_kappa(0.6), std::domain_error);
  EXPECT_THROW(check_kappa(0.0), std::domain_error);
  EXPECT_THROW(check_kappa(0.5), std::domain_error);
  EXPECT_NO_THROW(check_kappa(0.4));
  EXPECT_THROW(mollifier_rate(MollifierProblem::standard(Grid3D{16, 6.0}), 0.6, {1.0, 0.5}), std::domain_error);
}

TEST(Mollifier, RateAtLeastKappa) {
  const auto p = MollifierProblem::standard();
  const auto r = mollifier_rate(p, 0.4, {1.0, 0.5, 0.25});
  EXPECT_GE(r.slope, 0.4 - 0.05);
  EXPECT_EQ(r.alphas.size(), 3u);
  // Widths below the spacing are dropped from the fit.
  EXPECT_EQ(mollifier_rate(p, 0.4, {1.0, 0.5, 0.1}).excluded, std::vector<double>{0.1});
}
