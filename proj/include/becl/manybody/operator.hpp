#pragma once

// Rescaled N-body Hamiltonian with the transverse zero-point energy removed,
//
//     H - N w = sum_j (-Lap_{x_j} + w(-d_{z_j}^2 + z_j^2 - 1)) + (1/N) sum_{i<j} V_{N,w}(r_i - r_j),
//
// restricted to `slots` particle slots. The one-body part is diagonal in
// Fourier x Hermite with eigenvalue |k|^2 + 2 w m. The pair term is diagonal at
// the collocation points (x-grid sites, Gauss-Hermite nodes); with as many
// nodes as modes the node transform is orthogonal, so the discrete operator
// stays Hermitian.

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "becl/hermite.hpp"
#include "becl/manybody/state.hpp"
#include "becl/nls2d.hpp"
#include "becl/potential.hpp"

namespace becl {

class ManyBodyOperator {
 public:
  /// `slots` particle slots, interaction weighted by 1/particles. An empty
  /// potential switches the interaction off.
  ManyBodyOperator(OneBodySpace space, int slots, int particles, double omega,
                   std::optional<ScaledPotential> potential = std::nullopt)
      : space_(space),
        lay_(space.layout(slots)),
        particles_(particles),
        omega_(omega),
        potential_(std::move(potential)),
        basis_(space.modes, space.modes),
        u_(basis_.collocation_matrix()) {
    if (slots < 1 || slots > particles) throw std::domain_error("ManyBodyOperator: need 1 <= slots <= particles");
    if (!(omega_ > 0.0)) throw std::domain_error("ManyBodyOperator: omega must be positive");
    if (potential_ && potential_->omega() != omega_) {
      throw std::invalid_argument("ManyBodyOperator: potential and operator disagree on omega");
    }
    for (int j = 0; j < slots; ++j) ffts_.emplace_back(space_, lay_, j);
    const auto& g = space_.grid;
    energy_.resize(space_.dim());
    for (int i = 0; i < g.n; ++i)
      for (int jj = 0; jj < g.n; ++jj)
        for (int m = 0; m < space_.modes; ++m)
          energy_[(static_cast<std::size_t>(i) * g.n + jj) * space_.modes + m] = g.k2(i, jj) + 2.0 * omega_ * m;
    if (potential_ && slots > 1) build_interaction();
  }

  const OneBodySpace& space() const { return space_; }
  const SlotLayout& layout() const { return lay_; }
  int slots() const { return lay_.slots; }
  int particles() const { return particles_; }
  double omega() const { return omega_; }
  bool interacting() const { return !pair_.empty(); }
  const HermiteBasis& collocation_basis() const { return basis_; }
  const std::optional<ScaledPotential>& potential() const { return potential_; }

  /// |k|^2 + 2 w m for wavevector index `site` and mode m.
  double one_body_energy(std::size_t site, int m) const { return energy_[site * space_.modes + m]; }

  /// Pair value V_{N,w}/N between collocation points a = site*Q + q and b.
  double pair_value(std::size_t a, std::size_t b) const { return pair_[a * space_.dim() + b]; }

  void apply(std::span<const cplx> in, std::span<cplx> out) const {
    check(in.size());
    check(out.size());
    std::vector<cplx> tmp(in.begin(), in.end());
    apply_one_body(in, out);
    if (interacting()) {
      apply_interaction(in, tmp);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += tmp[i];
    }
  }

  std::vector<cplx> apply(std::span<const cplx> in) const {
    std::vector<cplx> out(in.size());
    apply(in, out);
    return out;
  }

  void apply_one_body(std::span<const cplx> in, std::span<cplx> out) const {
    std::copy(in.begin(), in.end(), out.begin());
    for (const auto& f : ffts_) f.forward(out);
    for_each_index([&](std::size_t idx, const std::size_t* digit) {
      double e = 0.0;
      for (int j = 0; j < lay_.slots; ++j) e += energy_[digit[j]];
      out[idx] *= e;
    });
    for (const auto& f : ffts_) f.backward(out);
  }

  void apply_interaction(std::span<const cplx> in, std::span<cplx> out) const {
    std::copy(in.begin(), in.end(), out.begin());
    if (!interacting()) {
      std::fill(out.begin(), out.end(), cplx{});
      return;
    }
    to_nodes(out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= diag_[i];
    from_nodes(out);
  }

  /// exp(-i tau sum_j h_j) in place.
  void kinetic_phase(std::span<cplx> data, double tau) const {
    check(data.size());
    for (const auto& f : ffts_) f.forward(data);
    for_each_index([&](std::size_t idx, const std::size_t* digit) {
      double e = 0.0;
      for (int j = 0; j < lay_.slots; ++j) e += energy_[digit[j]];
      data[idx] *= std::polar(1.0, -tau * e);
    });
    for (const auto& f : ffts_) f.backward(data);
  }

  /// exp(-i tau W) in place, W the collocated pair sum.
  void interaction_phase(std::span<cplx> data, double tau) const {
    check(data.size());
    if (!interacting()) return;
    to_nodes(data);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= std::polar(1.0, -tau * diag_[i]);
    from_nodes(data);
  }

  /// Re <psi, H psi>.
  double expectation(std::span<const cplx> psi) const {
    const auto h = apply(psi);
    cplx s{};
    for (std::size_t i = 0; i < psi.size(); ++i) s += std::conj(psi[i]) * h[i];
    return s.real();
  }

  void to_nodes(std::span<cplx> data) const {
    for (int j = 0; j < lay_.slots; ++j) apply_mode_matrix(data, lay_, j, u_);
  }
  void from_nodes(std::span<cplx> data) const {
    const Eigen::MatrixXd ut = u_.transpose();
    for (int j = 0; j < lay_.slots; ++j) apply_mode_matrix(data, lay_, j, ut);
  }

 private:
  void check(std::size_t n) const {
    if (n != lay_.size()) throw std::invalid_argument("ManyBodyOperator: vector size does not match layout");
  }

  template <typename F>
  void for_each_index(F&& f) const {
    const std::size_t d = lay_.slot_dim();
    std::size_t digit[8] = {};
    const std::size_t total = lay_.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
      f(idx, digit);
      for (int j = lay_.slots - 1; j >= 0; --j) {
        if (++digit[j] < d) break;
        digit[j] = 0;
      }
    }
  }

  void build_interaction() {
    const auto& g = space_.grid;
    const std::size_t d = space_.dim();
    const int q_count = space_.modes;
    const auto nodes = basis_.nodes();
    pair_.assign(d * d, 0.0);
    for (std::size_t a = 0; a < d; ++a) {
      const std::size_t sa = a / q_count;
      const int qa = static_cast<int>(a % q_count);
      const int ia = static_cast<int>(sa / g.n), ja = static_cast<int>(sa % g.n);
      for (std::size_t b = 0; b < d; ++b) {
        const std::size_t sb = b / q_count;
        const int qb = static_cast<int>(b % q_count);
        const int ib = static_cast<int>(sb / g.n), jb = static_cast<int>(sb % g.n);
        const double x = g.wrap(g.coord(ia) - g.coord(ib));
        const double y = g.wrap(g.coord(ja) - g.coord(jb));
        pair_[a * d + b] = (*potential_)(x, y, nodes[qa] - nodes[qb]) / particles_;
      }
    }
    diag_.assign(lay_.size(), 0.0);
    for_each_index([&](std::size_t idx, const std::size_t* digit) {
      double w = 0.0;
      for (int i = 0; i < lay_.slots; ++i)
        for (int j = i + 1; j < lay_.slots; ++j) w += pair_[digit[i] * d + digit[j]];
      diag_[idx] = w;
    });
  }

  OneBodySpace space_;
  SlotLayout lay_;
  int particles_;
  double omega_;
  std::optional<ScaledPotential> potential_;
  HermiteBasis basis_;
  Eigen::MatrixXd u_;
  std::vector<SlotFft> ffts_;
  std::vector<double> energy_;
  std::vector<double> pair_;
  std::vector<double> diag_;
};

/// Strang steps: half pair phase, full one-body phase, half pair phase.
inline void evolve(ManyBodyState& state, const ManyBodyOperator& op, double dt, int steps) {
  if (!(state.space() == op.space()) || op.slots() != state.particles() || op.particles() != state.particles()) {
    throw std::invalid_argument("evolve: state and operator dimensions disagree");
  }
  if (!(dt > 0.0) || steps < 0) throw std::invalid_argument("evolve: need dt > 0 and steps >= 0");
  auto& a = state.amplitudes();
  for (int s = 0; s < steps; ++s) {
    op.interaction_phase(a, 0.5 * dt);
    op.kinetic_phase(a, dt);
    op.interaction_phase(a, 0.5 * dt);
    state.time += dt;
  }
  detail::check_finite(a, "manybody", state.time);
}

}  // namespace becl
