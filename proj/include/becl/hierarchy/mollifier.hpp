#pragma once

// Comparison of the pair delta with a mollified pair interaction,
//
//   D(alpha) = | Tr J^(1) Tr_2 [ (rho_alpha - delta)(r_1 - r_2) g^(2) ] |,
//
// for smooth product densities g^(2) = |phi><phi|^{(x)2} on a 3D periodic grid
// and J = |u><v|. For the product, Tr_2 [W(r_1 - r_2) g^(2)] has kernel
// (W * |phi|^2)(r) phi(r) conj(phi(r')), so
//
//   D(alpha) = | <v, ((rho_alpha - delta) * |phi|^2) phi> <phi, u> |.
//
// rho is the unit Gaussian probability density; rho_alpha(r) = alpha^-3 rho(r/alpha)
// is applied as the Fourier multiplier exp(-alpha^2 |xi|^2 / 2).

#include <array>
#include <cmath>
#include <complex>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "becl/fft.hpp"
#include "becl/hermite.hpp"
#include "becl/manybody/sobolev.hpp"

namespace becl {

inline void check_kappa(double kappa) {
  if (!(kappa > 0.0 && kappa < 0.5)) throw std::domain_error("mollifier: kappa must lie in (0, 1/2)");
}

struct Mollifier {
  double alpha = 0.0;  // 0 means the delta itself

  /// int rho |r|^kappa for the unit 3D Gaussian: 2^{k/2} Gamma((3+k)/2) / Gamma(3/2).
  static double moment(double kappa) {
    return std::pow(2.0, 0.5 * kappa) * std::tgamma(0.5 * (3.0 + kappa)) / std::tgamma(1.5);
  }
  double density(double x, double y, double z) const {
    if (!(alpha > 0.0)) throw std::domain_error("Mollifier: the delta has no pointwise density");
    const double r2 = (x * x + y * y + z * z) / (alpha * alpha);
    return std::exp(-0.5 * r2) / (std::pow(2.0 * std::numbers::pi, 1.5) * alpha * alpha * alpha);
  }
  double multiplier(double xi2) const { return std::exp(-0.5 * alpha * alpha * xi2); }
};

struct Grid3D {
  int n = 48;
  double half_length = 6.0;
  double dx() const { return 2.0 * half_length / n; }
  double coord(int i) const { return -half_length + i * dx(); }
  double wavenumber(int i) const { return std::numbers::pi / half_length * (i < n / 2 ? i : i - n); }
  std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
  std::size_t at(int i, int j, int k) const { return (static_cast<std::size_t>(i) * n + j) * n + k; }
};

/// Trapezoid integral of the periodized rho_alpha on the grid (should be 1).
/// The convolution acts on the torus, so images of the kernel count.
inline double mollifier_mass(const Mollifier& m, const Grid3D& g) {
  if (!(m.alpha > 0.0)) throw std::domain_error("Mollifier: the delta has no pointwise density");
  const double period = 2.0 * g.half_length;
  const int images = 1 + static_cast<int>(std::ceil(10.0 * m.alpha / period));
  double line = 0.0;  // rho factorizes, so one axis suffices
  for (int i = 0; i < g.n; ++i)
    for (int s = -images; s <= images; ++s) {
      const double x = (g.coord(i) + s * period) / m.alpha;
      line += std::exp(-0.5 * x * x) / (std::sqrt(2.0 * std::numbers::pi) * m.alpha);
    }
  return std::pow(line * g.dx(), 3);
}

/// Smooth 3D test data: phi, u, v as normalized Gaussians with offsets.
struct MollifierProblem {
  Grid3D grid;
  std::vector<cplx> phi, u, v;

  static std::vector<cplx> gaussian(const Grid3D& g, double width, std::array<double, 3> c, std::array<double, 3> p) {
    std::vector<cplx> f(g.size());
    double s = 0.0;
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        for (int k = 0; k < g.n; ++k) {
          const double x = g.coord(i) - c[0], y = g.coord(j) - c[1], z = g.coord(k) - c[2];
          const cplx val = std::exp(-0.5 * (x * x + y * y + z * z) / (width * width)) *
                           std::polar(1.0, p[0] * g.coord(i) + p[1] * g.coord(j) + p[2] * g.coord(k));
          f[g.at(i, j, k)] = val;
          s += std::norm(val);
        }
    const double r = 1.0 / std::sqrt(s * g.dx() * g.dx() * g.dx());
    for (auto& a : f) a *= r;
    return f;
  }

  static MollifierProblem standard(const Grid3D& g = {}) {
    MollifierProblem p;
    p.grid = g;
    p.phi = gaussian(g, 1.0, {0.0, 0.0, 0.0}, {0.3, 0.0, 0.0});
    p.u = gaussian(g, 1.2, {0.4, -0.2, 0.1}, {0.0, 0.2, 0.0});
    p.v = gaussian(g, 0.9, {-0.3, 0.1, 0.2}, {0.0, 0.0, -0.2});
    return p;
  }
};

/// <v, ((rho_a - rho_b) * |phi|^2) phi> <phi, u>; a or b equal to 0 stands
/// for the delta.
inline cplx mollifier_difference(const MollifierProblem& p, double alpha_a, double alpha_b) {
  const auto& g = p.grid;
  std::vector<cplx> dens(g.size());
  for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = std::norm(p.phi[i]);
  FftPlan fwd({{g.n, std::ptrdiff_t(g.n) * g.n}, {g.n, g.n}, {g.n, 1}}, {}, FFTW_FORWARD);
  FftPlan bwd({{g.n, std::ptrdiff_t(g.n) * g.n}, {g.n, g.n}, {g.n, 1}}, {}, FFTW_BACKWARD);
  fwd.execute(dens.data());
  const Mollifier a{alpha_a}, b{alpha_b};
  const double inv = 1.0 / static_cast<double>(g.size());
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) {
        const double xi2 = g.wavenumber(i) * g.wavenumber(i) + g.wavenumber(j) * g.wavenumber(j) +
                           g.wavenumber(k) * g.wavenumber(k);
        dens[g.at(i, j, k)] *= (a.multiplier(xi2) - b.multiplier(xi2)) * inv;
      }
  bwd.execute(dens.data());
  const double cell = g.dx() * g.dx() * g.dx();
  cplx vw{}, pu{};
  for (std::size_t i = 0; i < dens.size(); ++i) {
    vw += std::conj(p.v[i]) * dens[i] * p.phi[i];
    pu += std::conj(p.phi[i]) * p.u[i];
  }
  return vw * cell * pu * cell;
}

struct MollifierRate {
  double kappa = 0.0;
  double moment = 0.0;
  std::vector<double> alphas;       // used in the fit
  std::vector<double> differences;  // D(alpha)
  std::vector<double> excluded;     // below grid resolution
  double slope = 0.0;
};

inline MollifierRate mollifier_rate(const MollifierProblem& p, double kappa, const std::vector<double>& alphas) {
  check_kappa(kappa);
  MollifierRate r;
  r.kappa = kappa;
  r.moment = Mollifier::moment(kappa);
  for (double a : alphas) {
    if (!(a > 0.0)) throw std::domain_error("mollifier_rate: alpha must be positive");
    if (a < p.grid.dx()) {
      std::cerr << "warning: mollifier width " << a << " is below the grid spacing " << p.grid.dx()
                << "; excluded from the fit\n";
      r.excluded.push_back(a);
      continue;
    }
    r.alphas.push_back(a);
    r.differences.push_back(std::abs(mollifier_difference(p, a, 0.0)));
  }
  if (r.alphas.size() < 2) throw std::invalid_argument("mollifier_rate: fewer than two resolvable widths");
  r.slope = loglog_slope(r.alphas, r.differences);
  return r;
}

}  // namespace becl
