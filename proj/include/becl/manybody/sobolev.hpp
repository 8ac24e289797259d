#pragma once

// Omega-loss in the Sobolev-type estimates for the unscaled weighted operator
//
//     S^2 = 1 - Lap_x - w - d_z^2 + w^2 z^2,
//
// probed with f = g(x) h_w(z). All norms are computed on a 3D periodic grid in
// the frame y = w^{1/2} z, with spectral derivatives.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "becl/fft.hpp"
#include "becl/hermite.hpp"

namespace becl {

struct SobolevNorms {
  double omega = 0.0;
  double s_norm = 0.0;   // ||S f||_2
  double s2_norm = 0.0;  // ||S^2 f||_2
  double grad_l2 = 0.0;  // ||grad_r f||_2
  double l6 = 0.0;       // ||f||_6
  double grad_l6 = 0.0;  // ||grad_r f||_6
  double linf = 0.0;     // ||f||_inf

  std::array<double, 4> ratios() const {
    return {grad_l2 / s_norm, l6 / s_norm, grad_l6 / s2_norm, linf / s2_norm};
  }
};

struct SobolevGrid {
  int nx = 32;
  double half_x = 8.0;
  int ny = 32;
  double half_y = 8.0;
};

/// g(x) = exp(-|x|^2/2), h_w the normalized transverse ground state.
inline SobolevNorms sobolev_norms(double omega, const SobolevGrid& grid = {}) {
  if (!(omega > 0.0)) throw std::domain_error("sobolev_norms: omega must be positive");
  const PeriodicGrid2D gx(grid.nx, grid.half_x);
  const int nx = grid.nx, ny = grid.ny;
  const double dy = 2.0 * grid.half_y / ny;
  auto ycoord = [&](int k) { return -grid.half_y + k * dy; };
  auto yk = [&](int k) { return std::numbers::pi / grid.half_y * (k < ny / 2 ? k : k - ny); };
  const std::size_t total = static_cast<std::size_t>(nx) * nx * ny;
  auto at = [&](int i, int j, int k) { return (static_cast<std::size_t>(i) * nx + j) * ny + k; };

  std::vector<cplx> f(total);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nx; ++j)
      for (int k = 0; k < ny; ++k) {
        const double x1 = gx.coord(i), x2 = gx.coord(j);
        const double z = ycoord(k) / std::sqrt(omega);
        f[at(i, j, k)] = std::exp(-0.5 * (x1 * x1 + x2 * x2)) * ground_state(omega, z);
      }

  FftPlan fwd({{nx, std::ptrdiff_t(nx) * ny}, {nx, ny}, {ny, 1}}, {}, FFTW_FORWARD);
  FftPlan bwd({{nx, std::ptrdiff_t(nx) * ny}, {nx, ny}, {ny, 1}}, {}, FFTW_BACKWARD);
  std::vector<cplx> hat(f);
  fwd.execute(hat.data());
  const double inv = 1.0 / static_cast<double>(total);

  // d/dx1, d/dx2, d/dz (= w^{1/2} d/dy) and -Lap_x, -d_z^2 spectrally.
  std::array<std::vector<cplx>, 3> grad;
  std::vector<cplx> lap_x(total), lap_z(total);
  for (auto& v : grad) v.resize(total);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nx; ++j)
      for (int k = 0; k < ny; ++k) {
        const std::size_t p = at(i, j, k);
        const double k1 = gx.wavenumber(i), k2 = gx.wavenumber(j), k3 = std::sqrt(omega) * yk(k);
        const cplx c = hat[p] * inv;
        grad[0][p] = cplx(0.0, k1) * c;
        grad[1][p] = cplx(0.0, k2) * c;
        grad[2][p] = cplx(0.0, k3) * c;
        lap_x[p] = (k1 * k1 + k2 * k2) * c;
        lap_z[p] = k3 * k3 * c;
      }
  for (auto& v : grad) bwd.execute(v.data());
  bwd.execute(lap_x.data());
  bwd.execute(lap_z.data());

  const double cell = gx.cell_area() * dy / std::sqrt(omega);
  SobolevNorms out;
  out.omega = omega;
  double s_quad = 0.0, s2_quad = 0.0, g2 = 0.0, f6 = 0.0, g6 = 0.0, finf = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nx; ++j)
      for (int k = 0; k < ny; ++k) {
        const std::size_t p = at(i, j, k);
        const double z = ycoord(k) / std::sqrt(omega);
        const cplx s2f = f[p] + lap_x[p] - omega * f[p] + lap_z[p] + omega * omega * z * z * f[p];
        s_quad += (std::conj(f[p]) * s2f).real();
        s2_quad += std::norm(s2f);
        const double gsq = std::norm(grad[0][p]) + std::norm(grad[1][p]) + std::norm(grad[2][p]);
        g2 += gsq;
        g6 += gsq * gsq * gsq;
        const double a = std::norm(f[p]);
        f6 += a * a * a;
        finf = std::max(finf, std::sqrt(a));
      }
  out.s_norm = std::sqrt(s_quad * cell);
  out.s2_norm = std::sqrt(s2_quad * cell);
  out.grad_l2 = std::sqrt(g2 * cell);
  out.l6 = std::pow(f6 * cell, 1.0 / 6.0);
  out.grad_l6 = std::pow(g6 * cell, 1.0 / 6.0);
  out.linf = finf;
  return out;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 matching points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]) - mx;
    sxy += a * (std::log(y[i]) - my);
    sxx += a * a;
  }
  return sxy / sxx;
}

struct SobolevSharpness {
  std::vector<SobolevNorms> rows;
  std::array<double, 4> slopes{};
  double s_norm_variation = 0.0;  // (max - min) / min of ||S f||_2 across omega
  bool under_resolved = false;    // some ratio moved > 1% under grid refinement
  double worst_grid_change = 0.0;
};

inline SobolevSharpness sobolev_loss_sharpness(const std::vector<double>& omegas, const SobolevGrid& grid = {}) {
  if (omegas.size() < 2) throw std::invalid_argument("sobolev_loss_sharpness: need at least two omegas");
  SobolevSharpness out;
  SobolevGrid fine = grid;
  fine.nx = grid.nx * 3 / 2 + (grid.nx * 3 / 2) % 2;
  fine.ny = grid.ny * 3 / 2 + (grid.ny * 3 / 2) % 2;
  for (double w : omegas) {
    const auto coarse = sobolev_norms(w, grid);
    const auto refined = sobolev_norms(w, fine);
    const auto a = coarse.ratios(), b = refined.ratios();
    for (int i = 0; i < 4; ++i) {
      const double rel = std::abs(a[i] - b[i]) / std::abs(b[i]);
      out.worst_grid_change = std::max(out.worst_grid_change, rel);
    }
    out.rows.push_back(coarse);
  }
  out.under_resolved = out.worst_grid_change > 0.01;
  for (int i = 0; i < 4; ++i) {
    std::vector<double> y;
    for (const auto& r : out.rows) y.push_back(r.ratios()[i]);
    out.slopes[i] = loglog_slope(omegas, y);
  }
  double lo = out.rows.front().s_norm, hi = lo;
  for (const auto& r : out.rows) {
    lo = std::min(lo, r.s_norm);
    hi = std::max(hi, r.s_norm);
  }
  out.s_norm_variation = (hi - lo) / lo;
  return out;
}

}  // namespace becl
