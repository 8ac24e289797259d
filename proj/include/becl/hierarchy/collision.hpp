#pragma once

// Collision operator B_{j,k+1} g = Tr_{k+1} [delta(x_j - x_{k+1}), g^(k+1)] on
// the x-grid, with delta realized as the cell-normalized diagonal. Densities
// here live on x only (OneBodySpace with a single mode) in the
// grid-orthonormal basis, where the operator reads
//
//   (B g)(a; b) = (1/dA) [ G(a, a_j; b, a_j) - G(a, b_j; b, b_j) ].
//
// Also: the coupled (x, z) version of the same contraction for tensor states
// g_x (x) (h h)^{(x)k}, with delta in z realized on Gauss-Hermite nodes.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "becl/hermite.hpp"
#include "becl/manybody/density.hpp"

namespace becl {

inline ReducedDensity collision_apply(const ReducedDensity& g_next, int j) {
  if (g_next.space.modes != 1) throw std::invalid_argument("collision_apply: expects an x-only density");
  const int k = g_next.order - 1;
  if (k < 1 || j < 0 || j >= k) throw std::invalid_argument("collision_apply: need 0 <= j < k, k >= 1");
  const std::size_t d = g_next.space.dim();
  std::size_t rows = 1;
  for (int i = 0; i < k; ++i) rows *= d;
  std::size_t jstride = 1;
  for (int i = j + 1; i < k; ++i) jstride *= d;
  const double inv_cell = 1.0 / g_next.space.grid.cell_area();
  ReducedDensity out;
  out.order = k;
  out.space = g_next.space;
  out.state_id = g_next.state_id;
  out.time = g_next.time;
  out.kernel.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
  const auto& g = g_next.kernel;
  for (std::size_t a = 0; a < rows; ++a) {
    const std::size_t aj = (a / jstride) % d;
    for (std::size_t b = 0; b < rows; ++b) {
      const std::size_t bj = (b / jstride) % d;
      const cplx first = g(static_cast<Eigen::Index>(a * d + aj), static_cast<Eigen::Index>(b * d + aj));
      const cplx second = g(static_cast<Eigen::Index>(a * d + bj), static_cast<Eigen::Index>(b * d + bj));
      out.kernel(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = inv_cell * (first - second);
    }
  }
  return out;
}

/// Tr_{z_1..z_k} Tr_{r_{k+1}} [delta(r_j - r_{k+1}), g_x^(k+1) (x) (h h)^{(x)(k+1)}]
/// computed by explicit loops over Gauss-Hermite nodes of every slot, with
/// delta(z - z') = delta_{qq'} / W_q. Returns an x-only order-k density.
inline ReducedDensity coupled_collision_apply(const ReducedDensity& gx_next, int j, const HermiteBasis& basis) {
  if (gx_next.space.modes != 1) throw std::invalid_argument("coupled_collision_apply: expects an x-only density");
  const int k = gx_next.order - 1;
  if (k < 1 || j < 0 || j >= k) throw std::invalid_argument("coupled_collision_apply: need 0 <= j < k, k >= 1");
  const int q_count = basis.node_count();
  const auto w = basis.weights();
  std::vector<double> h(q_count);
  for (int q = 0; q < q_count; ++q) h[q] = basis.eigenfunction(0, q);
  const std::size_t d = gx_next.space.dim();
  const double cell = gx_next.space.grid.cell_area();
  std::size_t rows = 1;
  for (int i = 0; i < k; ++i) rows *= d;
  std::size_t jstride = 1;
  for (int i = j + 1; i < k; ++i) jstride *= d;

  ReducedDensity out;
  out.order = k;
  out.space = gx_next.space;
  out.state_id = gx_next.state_id;
  out.time = gx_next.time;
  out.kernel = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));

  // Odometer over the diagonal z-nodes (q_1..q_k) of the traced slots and the
  // node q' of slot k+1.
  std::vector<int> q(k + 1, 0);
  const auto& g = gx_next.kernel;
  while (true) {
    // z-kernel product: slot i contributes W_{q_i} h(q_i)^2 (trace over z_i),
    // slot k+1 contributes W_{q'} h(q')^2, and the z-delta pairs slot j with k+1.
    if (q[j] == q[k]) {
      double zfac = w[q[k]] * h[q[k]] * h[q[k]] / w[q[j]];
      for (int i = 0; i < k; ++i) zfac *= w[q[i]] * h[q[i]] * h[q[i]];
      // x part: delta(x_j - s) / dA on the grid, then Tr over s with weight dA;
      // kernel values of g_x are G / dA^{k+1}, output back in orthonormal form.
      for (std::size_t a = 0; a < rows; ++a) {
        const std::size_t aj = (a / jstride) % d;
        for (std::size_t b = 0; b < rows; ++b) {
          const std::size_t bj = (b / jstride) % d;
          const cplx first = g(static_cast<Eigen::Index>(a * d + aj), static_cast<Eigen::Index>(b * d + aj));
          const cplx second = g(static_cast<Eigen::Index>(a * d + bj), static_cast<Eigen::Index>(b * d + bj));
          out.kernel(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += zfac * (first - second) / cell;
        }
      }
    }
    int pos = k;
    while (pos >= 0 && ++q[pos] == q_count) q[pos--] = 0;
    if (pos < 0) break;
  }
  return out;
}

}  // namespace becl
