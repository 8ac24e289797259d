#pragma once

// 2D GP hierarchy residual of factorized densities |phi><phi|^{(x)k} built
// from an NLS trajectory,
//
//   R^(k) = i d_t g^(k) - sum_j [-Lap_{x_j}, g^(k)] - c sum_j B_{j,k+1} g^(k+1).
//
// The dense route forms every matrix (micro grids only); the product route
// uses the tensor structure of both g and J and scales to production grids.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "becl/hierarchy/bbgky.hpp"
#include "becl/hierarchy/collision.hpp"
#include "becl/hierarchy/observable.hpp"
#include "becl/manybody/density.hpp"
#include "becl/nls2d.hpp"

namespace becl {

/// x-only one-body space matching a 2D field grid.
inline OneBodySpace x_space(const PeriodicGrid2D& g) { return OneBodySpace{g, 1}; }

/// sqrt(dA) phi, the grid-orthonormal representation.
inline std::vector<cplx> orthonormal_values(const Field2D& f) {
  std::vector<cplx> v(f.values);
  const double s = std::sqrt(f.grid.cell_area());
  for (auto& a : v) a *= s;
  return v;
}

struct NlsTriple {
  Field2D minus, center, plus;
};

inline NlsTriple nls_triple(const Field2D& initial, const NLS2DConfig& cfg, double t) {
  const int steps = static_cast<int>(std::llround(t / cfg.dt));
  if (steps < 1 || std::abs(steps * cfg.dt - t) > 1e-9 * std::max(1.0, t)) {
    throw std::invalid_argument("nls_triple: t must be a positive multiple of dt");
  }
  NLS2DSolver solver(cfg);
  Field2D f = initial;
  solver.evolve(f, steps - 1);
  Field2D m = f;
  solver.step(f);
  Field2D c = f;
  solver.step(f);
  return NlsTriple{std::move(m), std::move(c), std::move(f)};
}

namespace detail {

inline std::vector<cplx> spectral_minus_laplacian(const Field2D& f) {
  const auto& g = f.grid;
  std::vector<cplx> v(f.values);
  FftPlan fwd({{g.n, g.n}, {g.n, 1}}, {}, FFTW_FORWARD);
  FftPlan bwd({{g.n, g.n}, {g.n, 1}}, {}, FFTW_BACKWARD);
  fwd.execute(v.data());
  const double inv = 1.0 / static_cast<double>(g.sites());
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) v[static_cast<std::size_t>(i) * g.n + j] *= g.k2(i, j) * inv;
  bwd.execute(v.data());
  return v;
}

inline cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace detail

/// Product route: for J = (x)|u_j><v_j| and g = |f><f|^{(x)k},
/// Tr J R = sum_j prod_{i != j} <v_i|f><f|u_i> * (<v_j|r><f|u_j> - <v_j|f><r|u_j>)
/// with r = i d_t f - (-Lap) f - c |phi|^2 f (the commutator and collision
/// terms contribute the Hermitian-part split of the NLS right-hand side).
inline ResidualReport gp_residual_2d(const NlsTriple& traj, double coupling, int k,
                                     const std::vector<ObservableK>& panel) {
  const auto& c = traj.center;
  const double dt = c.time - traj.minus.time;
  if (!(dt > 0.0)) throw std::invalid_argument("gp_residual_2d: trajectory times out of order");
  const auto fm = orthonormal_values(traj.minus);
  const auto f0 = orthonormal_values(c);
  const auto fp = orthonormal_values(traj.plus);
  auto lap = detail::spectral_minus_laplacian(c);
  const double s = std::sqrt(c.grid.cell_area());
  for (auto& a : lap) a *= s;
  std::vector<cplx> nl(f0.size());
  for (std::size_t i = 0; i < nl.size(); ++i) nl[i] = coupling * std::norm(c.values[i]) * f0[i];

  ResidualReport rep;
  rep.k = k;
  rep.t = c.time;
  for (const auto& j : panel) {
    if (j.order != k) throw std::invalid_argument("gp_residual_2d: observable order differs from k");
    // Tr J g(t) = prod <v_i|f><f|u_i>; its central difference is taken on the
    // full product so that the time derivative is a genuine finite difference.
    auto trace_at = [&](const std::vector<cplx>& f) {
      cplx p = 1.0;
      for (int i = 0; i < k; ++i) p *= detail::dot(j.v[i], f) * detail::dot(f, j.u[i]);
      return p;
    };
    cplx r = cplx(0.0, 1.0) * (trace_at(fp) - trace_at(fm)) / (2.0 * dt);
    std::vector<cplx> vf(k), fu(k);
    for (int i = 0; i < k; ++i) {
      vf[i] = detail::dot(j.v[i], f0);
      fu[i] = detail::dot(f0, j.u[i]);
    }
    for (int jj = 0; jj < k; ++jj) {
      cplx others = 1.0;
      for (int i = 0; i < k; ++i)
        if (i != jj) others *= vf[i] * fu[i];
      const cplx kin = detail::dot(j.v[jj], lap) * fu[jj] - vf[jj] * detail::dot(lap, j.u[jj]);
      const cplx col = detail::dot(j.v[jj], nl) * fu[jj] - vf[jj] * detail::dot(nl, j.u[jj]);
      r -= others * (kin + col);
    }
    rep.observable_ids.push_back(j.id);
    rep.values.push_back(std::abs(r));
  }
  rep.floor_estimate = 1e-16 / dt;
  rep.finish();
  return rep;
}

/// Dense route on explicit matrices, for cross-checking on micro grids.
inline ResidualReport gp_residual_2d_dense(const NlsTriple& traj, double coupling, int k,
                                           const std::vector<ObservableK>& panel) {
  const auto space = x_space(traj.center.grid);
  const double dt = traj.center.time - traj.minus.time;
  const auto gm = product_density(space, orthonormal_values(traj.minus), k);
  const auto g0 = product_density(space, orthonormal_values(traj.center), k);
  const auto gp = product_density(space, orthonormal_values(traj.plus), k);
  const auto gn = product_density(space, orthonormal_values(traj.center), k + 1);

  Eigen::MatrixXcd r = cplx(0.0, 1.0) * (gp.kernel - gm.kernel) / (2.0 * dt);
  // sum_j [-Lap_j, g]
  const auto lay = space.layout(k);
  std::vector<Eigen::MatrixXcd> blocks(space.grid.sites(), Eigen::MatrixXcd(1, 1));
  for (int i = 0; i < space.grid.n; ++i)
    for (int jj = 0; jj < space.grid.n; ++jj) blocks[static_cast<std::size_t>(i) * space.grid.n + jj](0, 0) = space.grid.k2(i, jj);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(g0.kernel.rows(), g0.kernel.cols());
  for (int j = 0; j < k; ++j) {
    Eigen::MatrixXcd t = g0.kernel;
    for (Eigen::Index c = 0; c < t.cols(); ++c) apply_fourier_blocks(std::span<cplx>(t.col(c).data(), t.rows()), space, lay, j, blocks);
    acc += t - t.adjoint();
  }
  r -= acc;
  for (int j = 0; j < k; ++j) r -= coupling * collision_apply(gn, j).kernel;

  ResidualReport rep;
  rep.k = k;
  rep.t = traj.center.time;
  for (const auto& j : panel) {
    rep.observable_ids.push_back(j.id);
    rep.values.push_back(std::abs(j.trace_with(r)));
  }
  rep.floor_estimate = 1e-16 / dt;
  rep.finish();
  return rep;
}

}  // namespace becl
