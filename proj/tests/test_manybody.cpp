#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "becl/manybody/density.hpp"
#include "becl/manybody/diagnostics.hpp"
#include "becl/manybody/operator.hpp"
#include "becl/manybody/sobolev.hpp"
#include "becl/manybody/state.hpp"

using namespace becl;

namespace {

const double kPi = std::numbers::pi;

OneBodySpace small_space() { return OneBodySpace{PeriodicGrid2D(8, 4.0), 4}; }

ScaledPotential unit_gaussian_potential(int n, double w) { return ScaledPotential(GaussianProfile{1.0, 1.0}, 0.2, n, w); }

std::vector<cplx> two_mode_vector(const OneBodySpace& sp, double p0, double p1, double px) {
  const std::vector<cplx> c = {std::sqrt(p0), std::sqrt(p1)};
  return one_body_vector(
      sp, [px](double x, double y) { return std::exp(-0.5 * (x * x + y * y)) * std::polar(1.0, px * x); }, c);
}

std::vector<cplx> constant_mode(const OneBodySpace& sp, int mode) {
  std::vector<cplx> c(static_cast<std::size_t>(mode) + 1, cplx{});
  c[mode] = 1.0;
  return one_body_vector(sp, [](double, double) { return cplx(1.0); }, c);
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
  return w;
}

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

TEST(ManyBodyState, ProductStateIsNormalizedAndSymmetric) {
  const auto sp = small_space();
  const auto phi = two_mode_vector(sp, 0.9, 0.1, 0.3);
  for (int n : {1, 2}) {
    const auto s = product_state(sp, n, phi);
    EXPECT_NEAR(s.norm(), 1.0, 1e-13);
    EXPECT_EQ(symmetry_defect(s), 0.0);
  }
  EXPECT_THROW(ManyBodyState(sp, 4), std::domain_error);
}

TEST(ManyBodyState, MemoryBudgetRefusal) {
  const auto sp = small_space();
  EXPECT_THROW(ManyBodyState(sp, 2, 1024), std::length_error);
  EXPECT_NO_THROW(ManyBodyState(sp, 2, 256 * 256 * sizeof(cplx)));
  EXPECT_THROW(check_memory_budget(OneBodySpace{PeriodicGrid2D(64, 4.0), 16}, 3), std::length_error);
}

TEST(ManyBodyOperator, Hermitian) {
  const auto sp = small_space();
  ManyBodyOperator op(sp, 2, 2, 4.0, unit_gaussian_potential(2, 4.0));
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  std::vector<cplx> u(op.layout().size()), v(u.size());
  for (auto& x : u) x = cplx(nd(rng), nd(rng));
  for (auto& x : v) x = cplx(nd(rng), nd(rng));
  const cplx a = dot(u, op.apply(v)), b = std::conj(dot(v, op.apply(u)));
  EXPECT_LE(std::abs(a - b), 1e-10 * std::abs(a));
}

TEST(ManyBodyOperator, OneBodyEnergies) {
  const auto sp = small_space();
  ManyBodyOperator op(sp, 1, 1, 4.0);
  EXPECT_EQ(op.one_body_energy(0, 0), 0.0);
  EXPECT_EQ(op.one_body_energy(0, 3), 24.0);
  EXPECT_FALSE(op.interacting());
  EXPECT_THROW(ManyBodyOperator(sp, 3, 2, 4.0), std::domain_error);
  EXPECT_THROW(ManyBodyOperator(sp, 2, 2, 4.0, unit_gaussian_potential(2, 8.0)), std::invalid_argument);
}

TEST(Evolution, NormAndSymmetryPreserved) {
  const auto sp = small_space();
  ManyBodyOperator op(sp, 2, 2, 4.0, unit_gaussian_potential(2, 4.0));
  auto s = product_state(sp, 2, two_mode_vector(sp, 0.9, 0.1, 0.3));
  evolve(s, op, 1e-3, 1000);
  EXPECT_LE(std::abs(s.norm() - 1.0), 1e-10);
  EXPECT_LE(symmetry_defect(s), 1e-10);
  EXPECT_NEAR(s.time, 1.0, 1e-9);
}

TEST(Evolution, FreeProductStaysProduct) {
  const auto sp = small_space();
  const auto phi = two_mode_vector(sp, 0.7, 0.3, 0.5);
  auto s = product_state(sp, 2, phi);
  auto one = product_state(sp, 1, phi);
  evolve(s, ManyBodyOperator(sp, 2, 2, 4.0), 1e-3, 200);
  evolve(one, ManyBodyOperator(sp, 1, 1, 4.0), 1e-3, 200);
  const auto target = product_density(sp, one.amplitudes(), 1);
  EXPECT_LE(trace_distance(marginal(s, 1), target).trace_norm, 1e-8);
  EXPECT_LE(max_diff(s.amplitudes(), product_state(sp, 2, one.amplitudes()).amplitudes()), 1e-12);
}

TEST(Evolution, EnergyConservedOverThousandSteps) {
  const auto sp = small_space();
  ManyBodyOperator op(sp, 2, 2, 4.0, unit_gaussian_potential(2, 4.0));
  auto s = product_state(sp, 2, two_mode_vector(sp, 0.9, 0.1, 0.3));
  const double e0 = excess_energy_per_particle(s, op);
  evolve(s, op, 1e-3, 1000);
  EXPECT_LE(std::abs(excess_energy_per_particle(s, op) - e0), 1e-5 * std::max(1.0, std::abs(e0)));
}

TEST(Evolution, PermutationEquivariant) {
  const auto sp = small_space();
  ManyBodyOperator op(sp, 2, 2, 4.0, unit_gaussian_potential(2, 4.0));
  auto s = tensor_state(sp, {two_mode_vector(sp, 0.9, 0.1, 0.3), two_mode_vector(sp, 0.5, 0.5, -0.2)});
  const int swap[] = {1, 0};
  ManyBodyState t(sp, 2);
  t.amplitudes() = permute_slots(s.amplitudes(), s.layout(), swap);
  evolve(s, op, 1e-3, 50);
  evolve(t, op, 1e-3, 50);
  EXPECT_LE(max_diff(permute_slots(s.amplitudes(), s.layout(), swap), t.amplitudes()), 1e-13);
}

TEST(Marginal, MatchesBruteForcePartialTrace) {
  const OneBodySpace sp{PeriodicGrid2D(4, 2.0), 2};
  const std::size_t d = sp.dim();
  for (int n : {2, 3}) {
    const auto s = random_symmetric_state(sp, n, 100 + n);
    const auto& a = s.amplitudes();
    for (int k = 1; k <= std::min(n, 2); ++k) {
      const auto g = marginal(s, k);
      std::size_t rows = 1, rest = 1;
      for (int j = 0; j < k; ++j) rows *= d;
      for (int j = k; j < n; ++j) rest *= d;
      double worst = 0.0;
      for (std::size_t x = 0; x < rows; ++x)
        for (std::size_t y = 0; y < rows; ++y) {
          cplx acc{};
          for (std::size_t r = 0; r < rest; ++r) acc += a[x * rest + r] * std::conj(a[y * rest + r]);
          worst = std::max(worst, std::abs(acc - g.kernel(x, y)));
        }
      EXPECT_LE(worst, 1e-14) << n << " " << k;
      EXPECT_NEAR(g.trace().real(), 1.0, 1e-12);
      EXPECT_LE(g.hermiticity_defect(), 1e-15);
      EXPECT_GE(g.min_eigenvalue(), -1e-12);
    }
  }
  EXPECT_THROW(marginal(random_symmetric_state(sp, 2, 1), 3), std::domain_error);
  // gamma^(3) for N = 3 would be a 32768^2 dense kernel.
  EXPECT_THROW(marginal(random_symmetric_state(sp, 3, 1), 3), std::length_error);
  EXPECT_THROW(marginal(random_symmetric_state(sp, 2, 1), 2, 1024), std::length_error);
}

TEST(TraceDistance, Examples) {
  const auto sp = small_space();
  const auto a = constant_mode(sp, 0), b = constant_mode(sp, 1);
  const auto ga = product_density(sp, a, 1), gb = product_density(sp, b, 1);
  EXPECT_EQ(trace_distance(ga, ga).trace_norm, 0.0);
  EXPECT_NEAR(trace_distance(ga, gb).trace_norm, 2.0, 1e-12);
  EXPECT_NEAR(trace_distance(ga, gb).half, 1.0, 1e-12);
}

TEST(TraceDistance, RandomMatchesSingularValues) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  ReducedDensity a, b;
  for (auto* r : {&a, &b}) {
    Eigen::MatrixXcd x(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) x(i, j) = cplx(nd(rng), nd(rng));
    r->kernel = x * x.adjoint();
    r->kernel /= r->kernel.trace();
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a.kernel - b.kernel);
  EXPECT_NEAR(trace_distance(a, b).trace_norm, svd.singularValues().sum(), 1e-12);
  ReducedDensity c;
  c.kernel = Eigen::MatrixXcd::Identity(4, 4);
  EXPECT_THROW(trace_distance(a, c), std::invalid_argument);
}

TEST(Projections, PureGroundMode) {
  const auto sp = small_space();
  const auto s = product_state(sp, 2, constant_mode(sp, 0));
  const int zero[] = {0}, one[] = {1};
  EXPECT_NEAR(projection_statistics(s, zero, zero).trace.real(), 1.0, 1e-13);
  EXPECT_EQ(projection_statistics(s, one, one).trace_norm, 0.0);
}

TEST(Projections, TwoModeSplit) {
  const auto sp = small_space();
  const auto s = product_state(sp, 2, two_mode_vector(sp, 0.9, 0.1, 0.0));
  const int zero[] = {0}, one[] = {1};
  EXPECT_NEAR(projection_statistics(s, one, one).trace.real(), 0.1, 1e-13);
  const auto off = projection_statistics(s, one, zero);
  EXPECT_NEAR(std::abs(off.trace), 0.0, 1e-14);
  EXPECT_NEAR(off.trace_norm, 0.3, 1e-12);
  const int a11[] = {1, 1}, a10[] = {1, 0}, a01[] = {0, 1};
  EXPECT_NEAR(projection_statistics(s, a11, a11).trace.real(), 0.01, 1e-13);
  EXPECT_NEAR(projection_statistics(s, a10, a01).trace_norm, 0.09, 1e-12);
  EXPECT_THROW(projection_statistics(s, a10, one), std::invalid_argument);
}

TEST(Projections, TraceNormAgreesWithDenseMarginal) {
  const OneBodySpace sp{PeriodicGrid2D(4, 2.0), 2};
  const auto s = random_symmetric_state(sp, 3, 4);
  const int one[] = {1}, zero[] = {0};
  // Dense oracle: P_1 gamma P_0 built from the marginal.
  const auto g = marginal(s, 1);
  Eigen::MatrixXcd p1 = Eigen::MatrixXcd::Zero(g.dim(), g.dim()), p0 = p1;
  for (Eigen::Index i = 0; i < p1.rows(); ++i) (i % 2 == 0 ? p0 : p1)(i, i) = 1.0;
  const Eigen::MatrixXcd m = p1 * g.kernel * p0;
  const auto st = projection_statistics(s, one, zero);
  EXPECT_NEAR(st.trace_norm, trace_norm(m), 1e-12);
  EXPECT_NEAR(std::abs(st.trace - m.trace()), 0.0, 1e-14);
}

TEST(ExcessEnergy, Examples) {
  const auto sp = small_space();
  const double w = 4.0;
  for (int n : {1, 2}) {
    ManyBodyOperator op(sp, n, n, w);
    EXPECT_NEAR(excess_energy_per_particle(product_state(sp, n, constant_mode(sp, 0)), op), 0.0, 1e-12);
    EXPECT_NEAR(excess_energy_per_particle(product_state(sp, n, constant_mode(sp, 1)), op), 2.0 * w, 1e-12);
  }
  // One excited particle out of two costs 2w in total, 2w/N per particle.
  auto s = tensor_state(sp, {constant_mode(sp, 0), constant_mode(sp, 1)});
  symmetrize(s);
  s.normalize();
  EXPECT_NEAR(excess_energy_per_particle(s, ManyBodyOperator(sp, 2, 2, w)), 2.0 * w / 2.0, 1e-12);
}

TEST(ExcessEnergy, InteractionTermMatchesPairSum) {
  // A state concentrated on one site and one node: W picks a single pair value.
  const OneBodySpace sp{PeriodicGrid2D(4, 2.0), 2};
  ManyBodyOperator op(sp, 2, 2, 4.0, unit_gaussian_potential(2, 4.0));
  std::vector<cplx> nodes(op.layout().size(), cplx{});
  const std::size_t a = 0 * 2 + 0, b = 5 * 2 + 1;
  nodes[a * sp.dim() + b] = 1.0;
  std::vector<cplx> psi = nodes;
  op.from_nodes(psi);
  std::vector<cplx> out(psi.size());
  op.apply_interaction(psi, out);
  EXPECT_NEAR(dot(psi, out).real(), op.pair_value(a, b), 1e-12);
}

TEST(WeightedTrace, TwoRoutesAgree) {
  const OneBodySpace sp{PeriodicGrid2D(4, 2.0), 3};
  for (int n : {2, 3}) {
    const auto s = random_symmetric_state(sp, n, 40 + n);
    for (int k = 1; k <= std::min(n, 2); ++k) {
      const double a = weighted_trace_from_density(marginal(s, k));
      const double b = weighted_norm_from_state(s, k);
      EXPECT_LE(std::abs(a - b), 1e-9 * b) << n << " " << k;
    }
  }
}

TEST(STildeMoment, Examples) {
  const auto sp = small_space();
  const auto s = product_state(sp, 2, constant_mode(sp, 1));
  EXPECT_NEAR(s_tilde_moment(s, 0, 4.0), 1.0, 1e-12);
  EXPECT_NEAR(s_tilde_moment(s, 1, 4.0), 1.0 + 8.0, 1e-12);
  EXPECT_NEAR(s_tilde_moment(s, 2, 4.0), 81.0, 1e-10);
  EXPECT_THROW(s_tilde_moment(s, 3, 4.0), std::domain_error);
}

TEST(Coercivity, QuarterBoundHolds) {
  for (double w : {1.0, 4.0, 16.0}) EXPECT_GE(coercivity_min_eigenvalue(small_space(), w), 0.0) << w;
  // The bound is not free: a constant above one fails.
  EXPECT_LT(coercivity_min_eigenvalue(small_space(), 1.0, 1.5), 0.0);
}

TEST(Sobolev, ClosedFormNorms) {
  // f = exp(-|x|^2/2) h_w: ||S f||^2 = ||g||^2 + ||grad g||^2 = 2 pi for every w,
  // ||grad_r f||^2 = pi + pi w / 2.
  for (double w : {1.0, 100.0}) {
    const auto n = sobolev_norms(w);
    EXPECT_NEAR(n.s_norm, std::sqrt(2.0 * kPi), 1e-8) << w;
    EXPECT_NEAR(n.grad_l2, std::sqrt(kPi + kPi * w / 2.0), 1e-8 * std::sqrt(w)) << w;
    EXPECT_NEAR(n.linf, std::pow(w / kPi, 0.25), 1e-12);
  }
}

TEST(Sobolev, LossExponents) {
  const auto r = sobolev_loss_sharpness({100.0, 1000.0, 10000.0});
  const double expect[] = {0.5, 1.0 / 6.0, 2.0 / 3.0, 0.25};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.slopes[i], expect[i], 0.05) << i;
  EXPECT_LE(r.s_norm_variation, 0.01);
  EXPECT_FALSE(r.under_resolved);
}
