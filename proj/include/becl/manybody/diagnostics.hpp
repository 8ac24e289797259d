#pragma once

// Energy-type diagnostics of many-body states: excess energy per particle,
// moments of the weighted operators S~_j^2, the coercivity matrix check and
// the two evaluations of Tr prod_j (1 - Lap_{r_j}) gamma^(k).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "becl/hermite.hpp"
#include "becl/manybody/density.hpp"
#include "becl/manybody/operator.hpp"
#include "becl/manybody/state.hpp"

namespace becl {

/// (1/N) <psi, (H - N w) psi>.
inline double excess_energy_per_particle(const ManyBodyState& s, const ManyBodyOperator& op) {
  if (op.slots() != s.particles() || !(op.space() == s.space())) {
    throw std::invalid_argument("excess_energy_per_particle: operator does not match state");
  }
  return op.expectation(s.amplitudes()) / s.particles();
}

/// <psi, prod_{j<=k} S~_j^2 psi> with S~^2 = 1 - Lap_x + w(-1 - d_z^2 + z^2),
/// diagonal in Fourier x Hermite with eigenvalue 1 + |k|^2 + 2 w m.
inline double s_tilde_moment(const ManyBodyState& s, int k, double omega) {
  if (k < 0 || k > s.particles()) throw std::domain_error("s_tilde_moment: need 0 <= k <= N");
  const auto lay = s.layout();
  std::vector<cplx> hat(s.amplitudes());
  for (int j = 0; j < lay.slots; ++j) SlotFft(s.space(), lay, j).forward(hat);
  const auto& g = s.space().grid;
  const int mc = s.space().modes;
  const std::size_t d = lay.slot_dim();
  double total = 0.0;
  for (std::size_t idx = 0; idx < hat.size(); ++idx) {
    double w = 1.0;
    std::size_t r = idx;
    for (int j = lay.slots - 1; j >= 0; --j) {
      const std::size_t digit = r % d;
      r /= d;
      if (j < k) {
        const std::size_t site = digit / mc;
        const int m = static_cast<int>(digit % mc);
        w *= 1.0 + g.k2(static_cast<int>(site / g.n), static_cast<int>(site % g.n)) + 2.0 * omega * m;
      }
    }
    total += w * std::norm(hat[idx]);
  }
  return total;
}

/// Per-wavevector blocks of 1 - Lap_r = (1 + |k|^2) + (-d_z^2 Galerkin).
inline std::vector<Eigen::MatrixXcd> one_minus_laplacian_blocks(const OneBodySpace& space) {
  const HermiteBasis basis(space.modes);
  const Eigen::MatrixXcd t = basis.kinetic_matrix().cast<cplx>();
  const auto& g = space.grid;
  std::vector<Eigen::MatrixXcd> blocks(g.sites());
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const std::size_t s = static_cast<std::size_t>(i) * g.n + j;
      blocks[s] = t;
      blocks[s].diagonal().array() += 1.0 + g.k2(i, j);
    }
  return blocks;
}

/// Hermitian square roots of the blocks above (L = (1 - Lap_r)^{1/2}).
inline std::vector<Eigen::MatrixXcd> sqrt_blocks(const std::vector<Eigen::MatrixXcd>& blocks) {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b);
    out.emplace_back(es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint());
  }
  return out;
}

/// Tr prod_{j<=k} (1 - Lap_{r_j}) gamma^(k) from the dense marginal.
inline double weighted_trace_from_density(const ReducedDensity& gamma) {
  const auto blocks = one_minus_laplacian_blocks(gamma.space);
  const auto lay = gamma.space.layout(gamma.order);
  Eigen::MatrixXcd work = gamma.kernel;
  for (Eigen::Index c = 0; c < work.cols(); ++c) {
    std::span<cplx> col(work.col(c).data(), static_cast<std::size_t>(work.rows()));
    for (int j = 0; j < gamma.order; ++j) apply_fourier_blocks(col, gamma.space, lay, j, blocks);
  }
  return work.trace().real();
}

/// || prod_{j<=k} L_j psi ||^2 from the N-body vector.
inline double weighted_norm_from_state(const ManyBodyState& s, int k) {
  if (k < 1 || k > s.particles()) throw std::domain_error("weighted_norm_from_state: need 1 <= k <= N");
  const auto roots = sqrt_blocks(one_minus_laplacian_blocks(s.space()));
  std::vector<cplx> v(s.amplitudes());
  for (int j = 0; j < k; ++j) apply_fourier_blocks(v, s.space(), s.layout(), j, roots);
  double n = 0.0;
  for (const auto& a : v) n += std::norm(a);
  return n;
}

/// min over wavevectors of the smallest eigenvalue of S~^2 - c (1 - Lap_r) on
/// the truncated one-body basis.
inline double coercivity_min_eigenvalue(const OneBodySpace& space, double omega, double c = 0.25) {
  const auto lap = one_minus_laplacian_blocks(space);
  const auto& g = space.grid;
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const std::size_t s = static_cast<std::size_t>(i) * g.n + j;
      Eigen::MatrixXcd m = -c * lap[s];
      for (int a = 0; a < space.modes; ++a) m(a, a) += 1.0 + g.k2(i, j) + 2.0 * omega * a;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
      worst = std::min(worst, es.eigenvalues().minCoeff());
    }
  return worst;
}

}  // namespace becl
