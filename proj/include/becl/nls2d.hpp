#pragma once

// Defocusing 2D cubic NLS  i d_t phi = -Lap phi + c |phi|^2 phi  on a periodic
// box, advanced by Strang splitting (half nonlinear, full kinetic, half
// nonlinear). Each substep is exact, so mass is conserved to round-off.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "becl/fft.hpp"
#include "becl/hermite.hpp"

namespace becl {

struct Field2D {
  PeriodicGrid2D grid;
  std::vector<cplx> values;  // row-major (ix, iy)
  double time = 0.0;

  Field2D() = default;
  explicit Field2D(PeriodicGrid2D g) : grid(g), values(g.sites(), cplx{}) {}

  cplx& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.n + j]; }
  const cplx& at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.n + j]; }

  double mass() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return s * grid.cell_area();
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

struct NLS2DConfig {
  double coupling = 0.0;
  double dt = 1e-3;
  int order = 2;
  double half_length = 8.0;
  int n = 64;

  void validate() const {
    if (!(coupling >= 0.0)) throw std::invalid_argument("nls2d: coupling must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("nls2d: dt must be positive");
    if (order != 2) throw std::invalid_argument("nls2d: only splitting order 2 is available");
    PeriodicGrid2D(n, half_length);
  }
  PeriodicGrid2D grid() const { return PeriodicGrid2D(n, half_length); }
};

/// Distance sqrt(int |a - b|^2) on a shared grid.
inline double l2_distance(const Field2D& a, const Field2D& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("l2_distance: grids differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::norm(a.values[i] - b.values[i]);
  return std::sqrt(s * a.grid.cell_area());
}

namespace detail {

inline void check_finite(std::span<const cplx> v, const char* who, double time) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) {
      std::ostringstream os;
      os << who << ": non-finite amplitude at index " << i << ", t = " << time;
      throw std::runtime_error(os.str());
    }
  }
}

}  // namespace detail

/// Forward/backward 2D transforms on an n x n array, optionally batched over
/// an innermost index of length `inner` (used by the Hermite-layered fields).
class GridFft {
 public:
  GridFft(const PeriodicGrid2D& g, int inner = 1)
      : grid_(g),
        inner_(inner),
        fwd_({{g.n, std::ptrdiff_t(g.n) * inner}, {g.n, inner}}, loops(inner), FFTW_FORWARD),
        bwd_({{g.n, std::ptrdiff_t(g.n) * inner}, {g.n, inner}}, loops(inner), FFTW_BACKWARD) {}

  void forward(cplx* data) const { fwd_.execute(data); }
  /// Unnormalized inverse; multiply by 1/n^2 to undo forward().
  void backward(cplx* data) const { bwd_.execute(data); }
  const PeriodicGrid2D& grid() const { return grid_; }
  int inner() const { return inner_; }

 private:
  static std::vector<FftAxis> loops(int inner) {
    if (inner == 1) return {};
    return {{inner, 1}};
  }
  PeriodicGrid2D grid_;
  int inner_;
  FftPlan fwd_;
  FftPlan bwd_;
};

class NLS2DSolver {
 public:
  explicit NLS2DSolver(const NLS2DConfig& cfg) : cfg_((cfg.validate(), cfg)), fft_(cfg.grid()) {
    const auto g = cfg_.grid();
    kinetic_.resize(g.sites());
    const double scale = 1.0 / static_cast<double>(g.sites());
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        kinetic_[static_cast<std::size_t>(i) * g.n + j] = std::polar(scale, -g.k2(i, j) * cfg_.dt);
  }

  const NLS2DConfig& config() const { return cfg_; }

  void step(Field2D& f) const {
    if (!(f.grid == cfg_.grid())) throw std::invalid_argument("nls2d: field grid does not match config");
    const double peak = f.max_abs();
    if (cfg_.dt * peak * peak * cfg_.coupling > 0.5) {
      std::ostringstream os;
      os << "nls2d: stability guard violated, dt*max|phi|^2*c = " << cfg_.dt * peak * peak * cfg_.coupling
         << " > 0.5";
      throw std::runtime_error(os.str());
    }
    nonlinear(f, 0.5 * cfg_.dt);
    fft_.forward(f.values.data());
    for (std::size_t i = 0; i < kinetic_.size(); ++i) f.values[i] *= kinetic_[i];
    fft_.backward(f.values.data());
    nonlinear(f, 0.5 * cfg_.dt);
    f.time += cfg_.dt;
    detail::check_finite(f.values, "nls2d", f.time);
  }

  void evolve(Field2D& f, int steps) const {
    for (int s = 0; s < steps; ++s) step(f);
  }

 private:
  void nonlinear(Field2D& f, double tau) const {
    if (cfg_.coupling == 0.0) return;
    for (auto& v : f.values) v *= std::polar(1.0, -cfg_.coupling * std::norm(v) * tau);
  }

  NLS2DConfig cfg_;
  GridFft fft_;
  std::vector<cplx> kinetic_;
};

/// One Strang step as a value transformation.
inline Field2D step_2d(Field2D state, const NLS2DConfig& cfg) {
  NLS2DSolver(cfg).step(state);
  return state;
}

/// exp(-|x - x0|^2 / (2 s^2)) * exp(i p.x), optionally L2-normalized.
inline Field2D gaussian_2d(const PeriodicGrid2D& g, double width, std::array<double, 2> center = {0.0, 0.0},
                           std::array<double, 2> momentum = {0.0, 0.0}, bool normalize = false) {
  Field2D f(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double x = g.coord(i), y = g.coord(j);
      const double r2 = (x - center[0]) * (x - center[0]) + (y - center[1]) * (y - center[1]);
      f.at(i, j) = std::exp(-0.5 * r2 / (width * width)) * std::polar(1.0, momentum[0] * x + momentum[1] * y);
    }
  if (normalize) {
    const double s = 1.0 / std::sqrt(f.mass());
    for (auto& v : f.values) v *= s;
  }
  return f;
}

/// Free evolution of exp(-|x|^2/(2 s^2)) under i d_t phi = -Lap phi on R^2:
/// phi = s^2/(s^2 + 2it) exp(-|x|^2 / (2 (s^2 + 2it))).
inline Field2D free_gaussian_exact(const PeriodicGrid2D& g, double width, double t) {
  Field2D f(g);
  const cplx a = cplx(width * width, 2.0 * t);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double r2 = g.coord(i) * g.coord(i) + g.coord(j) * g.coord(j);
      f.at(i, j) = (width * width / a) * std::exp(-0.5 * r2 / a);
    }
  f.time = t;
  return f;
}

/// A exp(i(k.x - (|k|^2 + c|A|^2) t)) with k on the dual lattice (integer
/// wave indices) so that it is periodic on the box.
inline Field2D plane_wave(const PeriodicGrid2D& g, cplx amplitude, std::array<int, 2> wave, double coupling = 0.0,
                          double t = 0.0) {
  Field2D f(g);
  const double kx = std::numbers::pi / g.half_length * wave[0];
  const double ky = std::numbers::pi / g.half_length * wave[1];
  const double freq = kx * kx + ky * ky + coupling * std::norm(amplitude);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) f.at(i, j) = amplitude * std::polar(1.0, kx * g.coord(i) + ky * g.coord(j) - freq * t);
  f.time = t;
  return f;
}

struct SpectralMoments {
  double gradient_sq = 0.0;            // int |grad phi|^2
  std::array<double, 2> momentum{};    // int conj(phi) (-i grad) phi
};

inline SpectralMoments spectral_moments(const Field2D& f) {
  const auto& g = f.grid;
  std::vector<cplx> hat(f.values);
  FftPlan plan({{g.n, g.n}, {g.n, 1}}, {}, FFTW_FORWARD);
  plan.execute(hat.data());
  SpectralMoments m;
  const double norm = g.cell_area() / static_cast<double>(g.sites());
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double p = std::norm(hat[static_cast<std::size_t>(i) * g.n + j]) * norm;
      m.gradient_sq += g.k2(i, j) * p;
      m.momentum[0] += g.wavenumber(i) * p;
      m.momentum[1] += g.wavenumber(j) * p;
    }
  return m;
}

/// int (|grad phi|^2 + w0^2 |x|^2 |phi|^2 + 4 pi Ng |phi|^4) dx.
inline double gp_energy_2d(const Field2D& f, double omega0, double ng) {
  const auto& g = f.grid;
  double trap = 0.0, quartic = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double r2 = g.coord(i) * g.coord(i) + g.coord(j) * g.coord(j);
      const double d = std::norm(f.at(i, j));
      trap += r2 * d;
      quartic += d * d;
    }
  const double a = g.cell_area();
  return spectral_moments(f).gradient_sq + omega0 * omega0 * trap * a + 4.0 * std::numbers::pi * ng * quartic * a;
}

/// Conserved energy of the evolution: int (|grad phi|^2 + (c/2) |phi|^4) dx.
inline double nls_energy_2d(const Field2D& f, double coupling) {
  double quartic = 0.0;
  for (const auto& v : f.values) quartic += std::norm(v) * std::norm(v);
  return spectral_moments(f).gradient_sq + 0.5 * coupling * quartic * f.grid.cell_area();
}

}  // namespace becl
