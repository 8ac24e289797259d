#pragma once

// Pair-interaction profiles V and their (N, omega, beta) rescaling
//
//     V_{N,w}(x, z) = N^{3b} w^{(3b-1)/2} V(s x, s z / sqrt(w)),   s = (N sqrt(w))^b,
//
// which keeps int V_{N,w} = int V = b0 for every admissible (N, w, b).

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "becl/hermite.hpp"
#include "becl/scaling.hpp"

namespace becl {

/// V(r) = g exp(-|r|^2 / (2 sigma^2)).
struct GaussianProfile {
  double amplitude = 1.0;
  double width = 1.0;

  double operator()(double x, double y, double z) const {
    const double r2 = x * x + y * y + z * z;
    return amplitude * std::exp(-0.5 * r2 / (width * width));
  }
  double mass() const { return amplitude * std::pow(2.0 * std::numbers::pi, 1.5) * width * width * width; }
  /// Half-width of the box that holds all but ~e^-72 of the mass.
  double support() const { return 12.0 * width; }
};

/// Samples on a centered cubic grid, trilinear in between, zero outside.
class SampledProfile {
 public:
  SampledProfile(int points_per_axis, double spacing, std::vector<double> values)
      : p_(points_per_axis), h_(spacing), values_(std::move(values)) {
    if (p_ < 2 || !(h_ > 0.0)) throw std::invalid_argument("SampledProfile: need >= 2 points and positive spacing");
    if (values_.size() != static_cast<std::size_t>(p_) * p_ * p_) {
      throw std::invalid_argument("SampledProfile: expected points^3 samples");
    }
    double peak = 0.0;
    for (double v : values_) {
      if (!std::isfinite(v)) throw std::domain_error("SampledProfile: non-finite sample (profile not integrable)");
      if (v < 0.0) throw std::domain_error("SampledProfile: interaction must be nonnegative");
      peak = std::max(peak, v);
    }
    double edge = 0.0;
    for (int i = 0; i < p_; ++i)
      for (int j = 0; j < p_; ++j)
        for (int k = 0; k < p_; ++k)
          if (i == 0 || j == 0 || k == 0 || i == p_ - 1 || j == p_ - 1 || k == p_ - 1)
            edge = std::max(edge, at(i, j, k));
    if (peak > 0.0 && edge > 1e-8 * peak) {
      throw std::domain_error("SampledProfile: samples do not decay at the grid boundary (profile not integrable)");
    }
  }

  double operator()(double x, double y, double z) const {
    const double c = 0.5 * (p_ - 1);
    const std::array<double, 3> u = {x / h_ + c, y / h_ + c, z / h_ + c};
    std::array<int, 3> lo{};
    std::array<double, 3> f{};
    for (int a = 0; a < 3; ++a) {
      if (u[a] < 0.0 || u[a] > p_ - 1) return 0.0;
      lo[a] = std::min(static_cast<int>(std::floor(u[a])), p_ - 2);
      f[a] = u[a] - lo[a];
    }
    double s = 0.0;
    for (int di = 0; di < 2; ++di)
      for (int dj = 0; dj < 2; ++dj)
        for (int dk = 0; dk < 2; ++dk) {
          const double w = (di ? f[0] : 1 - f[0]) * (dj ? f[1] : 1 - f[1]) * (dk ? f[2] : 1 - f[2]);
          s += w * at(lo[0] + di, lo[1] + dj, lo[2] + dk);
        }
    return s;
  }

  /// Trapezoid rule over the sample grid.
  double mass() const {
    double s = 0.0;
    for (int i = 0; i < p_; ++i)
      for (int j = 0; j < p_; ++j)
        for (int k = 0; k < p_; ++k) s += edge_weight(i) * edge_weight(j) * edge_weight(k) * at(i, j, k);
    return s * h_ * h_ * h_;
  }
  double support() const { return 0.5 * (p_ - 1) * h_; }
  int points() const { return p_; }
  double spacing() const { return h_; }
  const std::vector<double>& values() const { return values_; }

 private:
  double at(int i, int j, int k) const { return values_[(static_cast<std::size_t>(i) * p_ + j) * p_ + k]; }
  double edge_weight(int i) const { return (i == 0 || i == p_ - 1) ? 0.5 : 1.0; }

  int p_;
  double h_;
  std::vector<double> values_;
};

using Profile = std::variant<GaussianProfile, SampledProfile>;

inline double profile_value(const Profile& p, double x, double y, double z) {
  return std::visit([&](const auto& v) { return v(x, y, z); }, p);
}

class ScaledPotential {
 public:
  ScaledPotential(Profile profile, double beta, int n_particles, double omega)
      : profile_(std::move(profile)), beta_(beta), n_(n_particles), omega_(omega) {
    scaling::check_beta(beta_);
    if (n_ < 1) throw std::domain_error("ScaledPotential: N must be a positive integer");
    if (!(omega_ >= 1.0)) throw std::domain_error("ScaledPotential: omega must be >= 1");
    if (const auto* g = std::get_if<GaussianProfile>(&profile_)) {
      if (g->amplitude < 0.0) throw std::domain_error("ScaledPotential: interaction must be nonnegative");
      if (!(g->width > 0.0)) throw std::domain_error("ScaledPotential: Gaussian width must be positive");
    }
  }

  const Profile& profile() const { return profile_; }
  double beta() const { return beta_; }
  int n_particles() const { return n_; }
  double omega() const { return omega_; }

  /// s = (N sqrt(omega))^beta, the x-compression factor.
  double compression() const { return std::pow(n_ * std::sqrt(omega_), beta_); }
  double prefactor() const { return std::pow(double(n_), 3.0 * beta_) * std::pow(omega_, 0.5 * (3.0 * beta_ - 1.0)); }

  double operator()(double x, double y, double z) const {
    const double s = compression();
    return prefactor() * profile_value(profile_, s * x, s * y, s * z / std::sqrt(omega_));
  }

  /// Box half-widths (x, z) enclosing the support of V_{N,omega}.
  std::array<double, 2> support() const {
    const double r = std::visit([](const auto& v) { return v.support(); }, profile_);
    const double s = compression();
    return {r / s, r * std::sqrt(omega_) / s};
  }

 private:
  Profile profile_;
  double beta_;
  int n_;
  double omega_;
};

/// V_{N,omega}(r) at r = (x1, x2, z).
inline double evaluate_scaled(const ScaledPotential& p, const std::array<double, 3>& r) { return p(r[0], r[1], r[2]); }

/// b0 = int V. Closed form for the Gaussian, trapezoid for sampled profiles.
inline double b0(const Profile& profile) {
  return std::visit([](const auto& v) { return v.mass(); }, profile);
}
inline double b0(const ScaledPotential& p) { return b0(p.profile()); }

/// Effective 2D coupling b0 * int |h_1|^4.
inline double coupling_constant(const ScaledPotential& p, const HermiteBasis& basis) {
  return b0(p) * quartic_norm(basis);
}

struct PotentialMoments {
  double mass = 0.0;       // int V_{N,w}
  double x_second = 0.0;   // int V_{N,w} |x|^2
  double z_second = 0.0;   // int V_{N,w} z^2
};

/// Trapezoid quadrature of V_{N,omega} and its second moments on a box
/// adapted to the anisotropic support.
inline PotentialMoments integrate_scaled(const ScaledPotential& p, int points_per_axis = 96) {
  if (points_per_axis < 3) throw std::invalid_argument("integrate_scaled: need at least 3 points per axis");
  const auto [rx, rz] = p.support();
  const int q = points_per_axis;
  const double hx = 2.0 * rx / (q - 1);
  const double hz = 2.0 * rz / (q - 1);
  auto wt = [q](int i) { return (i == 0 || i == q - 1) ? 0.5 : 1.0; };
  PotentialMoments m;
  for (int i = 0; i < q; ++i) {
    const double x = -rx + i * hx;
    for (int j = 0; j < q; ++j) {
      const double y = -rx + j * hx;
      for (int k = 0; k < q; ++k) {
        const double z = -rz + k * hz;
        const double w = wt(i) * wt(j) * wt(k) * p(x, y, z);
        m.mass += w;
        m.x_second += w * (x * x + y * y);
        m.z_second += w * z * z;
      }
    }
  }
  const double cell = hx * hx * hz;
  m.mass *= cell;
  m.x_second *= cell;
  m.z_second *= cell;
  return m;
}

}  // namespace becl
