#pragma once

// 3D cubic NLS with harmonic confinement in z,
//
//     i d_t phi = -Lap_x phi + (-d_z^2 + w^2 z^2) phi + g3 |phi|^2 phi,
//
// with x on the periodic grid and z expanded in the w-scaled Hermite functions
// phi^w_m(z) = w^{1/4} phi_m(w^{1/2} z). The linear flow is diagonal in
// Fourier x Hermite with eigenvalues |k|^2 + w(2m+1); the cubic phase is
// diagonal at Gauss-Hermite nodes. Node count equals mode count so that the
// coefficient <-> node map is orthogonal and the nonlinear substep is exactly
// unitary.

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "becl/fft.hpp"
#include "becl/hermite.hpp"
#include "becl/nls2d.hpp"

namespace becl {

struct Field3D {
  PeriodicGrid2D grid;
  int modes = 16;
  double omega = 1.0;
  std::vector<cplx> coeffs;  // (ix, iy, m), m innermost
  double time = 0.0;

  Field3D() = default;
  Field3D(PeriodicGrid2D g, int m, double w) : grid(g), modes(m), omega(w), coeffs(g.sites() * m, cplx{}) {
    if (m < 1) throw std::invalid_argument("Field3D: mode count must be positive");
    if (!(w > 0.0)) throw std::domain_error("Field3D: omega must be positive");
  }

  cplx& at(std::size_t site, int m) { return coeffs[site * modes + m]; }
  const cplx& at(std::size_t site, int m) const { return coeffs[site * modes + m]; }

  double mass() const {
    double s = 0.0;
    for (const auto& c : coeffs) s += std::norm(c);
    return s * grid.cell_area();
  }
  /// Mass outside the transverse ground mode.
  double p1_mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.sites(); ++i)
      for (int m = 1; m < modes; ++m) s += std::norm(at(i, m));
    return s * grid.cell_area();
  }
};

/// psi(x) h_w(z).
inline Field3D separable_field(const Field2D& psi, int modes, double omega) {
  Field3D f(psi.grid, modes, omega);
  for (std::size_t i = 0; i < psi.grid.sites(); ++i) f.at(i, 0) = psi.values[i];
  f.time = psi.time;
  return f;
}

struct Reduction2D {
  Field2D field;
  double p1_mass = 0.0;
};

/// Ground-mode overlap phi_2(x) = <phi(x, .), h_w>_z with the transverse
/// zero-point phase e^{-i w t} removed, together with the excited-mode mass.
inline Reduction2D reduce_to_2d(const Field3D& f) {
  Reduction2D r{Field2D(f.grid), f.p1_mass()};
  const cplx phase = std::polar(1.0, f.omega * f.time);
  for (std::size_t i = 0; i < f.grid.sites(); ++i) r.field.values[i] = f.at(i, 0) * phase;
  r.field.time = f.time;
  return r;
}

inline Reduction2D reduce_to_2d(const Field3D& f, const HermiteBasis& basis) {
  if (basis.modes() != f.modes) throw std::invalid_argument("reduce_to_2d: basis mode count does not match field");
  return reduce_to_2d(f);
}

struct NLS3DConfig {
  double coupling = 0.0;  // g3
  double dt = 1e-3;
  double omega = 4.0;
  int modes = 16;
  double half_length = 8.0;
  int n = 64;

  void validate() const {
    if (!(coupling >= 0.0)) throw std::invalid_argument("nls3d: coupling must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("nls3d: dt must be positive");
    if (!(omega > 0.0)) throw std::domain_error("nls3d: omega must be positive");
    if (modes < 1) throw std::invalid_argument("nls3d: mode count must be positive");
    PeriodicGrid2D(n, half_length);
  }
  PeriodicGrid2D grid() const { return PeriodicGrid2D(n, half_length); }
};

class NLS3DSolver {
 public:
  explicit NLS3DSolver(const NLS3DConfig& cfg)
      : cfg_((cfg.validate(), cfg)), basis_(cfg.modes, cfg.modes), u_(basis_.collocation_matrix()), fft_(cfg.grid(), cfg.modes) {
    const auto g = cfg_.grid();
    const int m_count = cfg_.modes;
    linear_.resize(g.sites() * m_count);
    const double scale = 1.0 / static_cast<double>(g.sites());
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        for (int m = 0; m < m_count; ++m) {
          const double e = g.k2(i, j) + cfg_.omega * (2.0 * m + 1.0);
          linear_[(static_cast<std::size_t>(i) * g.n + j) * m_count + m] = std::polar(scale, -e * cfg_.dt);
        }
    inv_sqrt_w_.resize(m_count);
    for (int q = 0; q < m_count; ++q) inv_sqrt_w_[q] = 1.0 / std::sqrt(basis_.weights()[q]);
  }

  const NLS3DConfig& config() const { return cfg_; }
  const HermiteBasis& basis() const { return basis_; }

  /// max over sites and nodes of |phi|^2.
  double peak_density(const Field3D& f) const {
    double peak = 0.0;
    Eigen::VectorXcd c(cfg_.modes), v(cfg_.modes);
    for (std::size_t s = 0; s < f.grid.sites(); ++s) {
      for (int m = 0; m < cfg_.modes; ++m) c(m) = f.at(s, m);
      v = u_ * c;
      for (int q = 0; q < cfg_.modes; ++q) peak = std::max(peak, std::norm(v(q)) * inv_sqrt_w_[q] * inv_sqrt_w_[q]);
    }
    return std::sqrt(cfg_.omega) * peak;
  }

  void step(Field3D& f) const {
    check(f);
    const double guard = cfg_.dt * cfg_.coupling * (cfg_.coupling > 0.0 ? peak_density(f) : 0.0);
    if (guard > 0.5) {
      std::ostringstream os;
      os << "nls3d: stability guard violated, dt*max|phi|^2*g3 = " << guard << " > 0.5";
      throw std::runtime_error(os.str());
    }
    nonlinear(f, 0.5 * cfg_.dt);
    fft_.forward(f.coeffs.data());
    for (std::size_t i = 0; i < linear_.size(); ++i) f.coeffs[i] *= linear_[i];
    fft_.backward(f.coeffs.data());
    nonlinear(f, 0.5 * cfg_.dt);
    f.time += cfg_.dt;
    detail::check_finite(f.coeffs, "nls3d", f.time);
  }

  void evolve(Field3D& f, int steps) const {
    for (int s = 0; s < steps; ++s) step(f);
  }

  /// <phi, (-Lap_x - d_z^2 + w^2 z^2) phi> + (g3/2) int |phi|^4, the quartic
  /// term by the same node rule the solver uses.
  double energy(const Field3D& f) const {
    check(f);
    const auto& g = f.grid;
    std::vector<cplx> hat(f.coeffs);
    fft_.forward(hat.data());
    double lin = 0.0;
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        for (int m = 0; m < cfg_.modes; ++m) {
          const double e = g.k2(i, j) + cfg_.omega * (2.0 * m + 1.0);
          lin += e * std::norm(hat[(static_cast<std::size_t>(i) * g.n + j) * cfg_.modes + m]);
        }
    lin *= g.cell_area() / static_cast<double>(g.sites());
    double quartic = 0.0;
    Eigen::VectorXcd c(cfg_.modes), v(cfg_.modes);
    for (std::size_t s = 0; s < g.sites(); ++s) {
      for (int m = 0; m < cfg_.modes; ++m) c(m) = f.at(s, m);
      v = u_ * c;
      for (int q = 0; q < cfg_.modes; ++q) {
        const double a = std::norm(v(q)) * inv_sqrt_w_[q] * inv_sqrt_w_[q];
        quartic += basis_.weights()[q] * a * a;
      }
    }
    quartic *= std::sqrt(cfg_.omega) * g.cell_area();
    return lin + 0.5 * cfg_.coupling * quartic;
  }

 private:
  void check(const Field3D& f) const {
    if (!(f.grid == cfg_.grid()) || f.modes != cfg_.modes || f.omega != cfg_.omega) {
      throw std::invalid_argument("nls3d: field does not match solver configuration");
    }
  }

  void nonlinear(Field3D& f, double tau) const {
    if (cfg_.coupling == 0.0) return;
    const int mc = cfg_.modes;
    const double a = cfg_.coupling * std::sqrt(cfg_.omega) * tau;
    Eigen::VectorXcd c(mc), v(mc);
    for (std::size_t s = 0; s < f.grid.sites(); ++s) {
      for (int m = 0; m < mc; ++m) c(m) = f.at(s, m);
      v = u_ * c;
      for (int q = 0; q < mc; ++q) {
        const double d = std::norm(v(q)) * inv_sqrt_w_[q] * inv_sqrt_w_[q];
        v(q) *= std::polar(1.0, -a * d);
      }
      c = u_.transpose() * v;
      for (int m = 0; m < mc; ++m) f.at(s, m) = c(m);
    }
  }

  NLS3DConfig cfg_;
  HermiteBasis basis_;
  Eigen::MatrixXd u_;
  GridFft fft_;
  std::vector<cplx> linear_;
  std::vector<double> inv_sqrt_w_;
};

/// Leakage out of the ground mode large enough that the truncation is suspect.
inline bool leakage_warning(const Field3D& f) { return f.p1_mass() > 0.5 * f.mass(); }

struct DimRedConfig {
  std::vector<double> omegas = {4.0, 16.0, 64.0};
  double t_final = 0.5;
  double coupling = 2.0 * std::numbers::pi;  // effective 2D constant c
  double width = 1.0;                        // Gaussian phi_0, unit mass
  int n = 64;
  double half_length = 8.0;
  int modes = 16;
  double dt_max = 1e-3;
  double omega_dt = 0.02;  // dt = min(dt_max, omega_dt / omega)

  void validate() const {
    if (omegas.empty()) throw std::invalid_argument("dimred: omega list is empty");
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      if (!(omegas[i] >= 1.0)) throw std::invalid_argument("dimred: omega values must be >= 1");
      if (i > 0 && !(omegas[i] > omegas[i - 1])) throw std::invalid_argument("dimred: omega list must increase");
    }
    if (!(t_final >= 0.0)) throw std::invalid_argument("dimred: t_final must be >= 0");
    if (!(coupling >= 0.0)) throw std::invalid_argument("dimred: coupling must be >= 0");
    if (!(width > 0.0)) throw std::invalid_argument("dimred: width must be positive");
    if (!(dt_max > 0.0) || !(omega_dt > 0.0)) throw std::invalid_argument("dimred: time steps must be positive");
    PeriodicGrid2D(n, half_length);
  }
};

struct DimRedRow {
  double omega = 0.0;
  double t_final = 0.0;
  double g3 = 0.0;
  double dt = 0.0;
  double l2_distance = 0.0;
  double p1_mass = 0.0;
  bool leakage = false;
};

struct DimRedResult {
  std::vector<DimRedRow> rows;
  bool monotone = true;  // distances strictly decreasing in omega
  std::vector<double> ratios;
  /// Strict decrease with every successive ratio at least `min_ratio`.
  bool pass(double min_ratio = 2.0) const {
    if (!monotone) return false;
    for (double r : ratios)
      if (!(r >= min_ratio)) return false;
    return true;
  }
};

/// 3D cubic coupling that keeps g3 int |h_w|^4 = c fixed.
inline double dimred_g3(double c, double omega) { return c / (std::sqrt(omega) / std::sqrt(2.0 * std::numbers::pi)); }

inline DimRedRow dimred_single(const DimRedConfig& cfg, double omega) {
  DimRedRow row;
  row.omega = omega;
  row.t_final = cfg.t_final;
  row.g3 = dimred_g3(cfg.coupling, omega);
  const int steps = cfg.t_final == 0.0 ? 0 : static_cast<int>(std::ceil(cfg.t_final / std::min(cfg.dt_max, cfg.omega_dt / omega) - 1e-9));
  row.dt = steps == 0 ? 0.0 : cfg.t_final / steps;
  const PeriodicGrid2D grid(cfg.n, cfg.half_length);
  const Field2D phi0 = gaussian_2d(grid, cfg.width, {0.0, 0.0}, {0.0, 0.0}, true);
  Field3D f3 = separable_field(phi0, cfg.modes, omega);
  Field2D f2 = phi0;
  if (steps > 0) {
    NLS3DSolver s3({row.g3, row.dt, omega, cfg.modes, cfg.half_length, cfg.n});
    NLS2DSolver s2({cfg.coupling, row.dt, 2, cfg.half_length, cfg.n});
    s3.evolve(f3, steps);
    s2.evolve(f2, steps);
  }
  const auto red = reduce_to_2d(f3);
  row.l2_distance = l2_distance(red.field, f2);
  row.p1_mass = red.p1_mass;
  row.leakage = leakage_warning(f3);
  if (row.leakage) std::cerr << "warning: dimred omega=" << omega << " excited-mode mass exceeds half the total\n";
  return row;
}

inline DimRedResult summarize_dimred(std::vector<DimRedRow> rows) {
  DimRedResult r;
  r.rows = std::move(rows);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    if (!(r.rows[i].l2_distance < r.rows[i - 1].l2_distance)) r.monotone = false;
    const double prev = r.rows[i - 1].l2_distance, cur = r.rows[i].l2_distance;
    r.ratios.push_back(cur > 0.0 ? prev / cur : std::numeric_limits<double>::infinity());
  }
  return r;
}

/// Evolve 3D from phi_0 h_w and 2D from phi_0 for each omega, compare at t_final.
inline DimRedResult dimensional_reduction_experiment(const DimRedConfig& cfg) {
  cfg.validate();
  std::vector<DimRedRow> rows;
  for (double w : cfg.omegas) rows.push_back(dimred_single(cfg, w));
  return summarize_dimred(std::move(rows));
}

}  // namespace becl
