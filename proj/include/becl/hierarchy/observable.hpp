#pragma once

// Finite-rank test operators J = (x)_j |u_j><v_j| with unit vectors u_j, v_j,
// so ||J||_op = 1. A seeded panel of them stands in for the dense countable
// family that defines the weak-* metric d_k.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "becl/manybody/density.hpp"
#include "becl/manybody/state.hpp"

namespace becl {

struct ObservableK {
  int order = 1;
  std::vector<std::vector<cplx>> u;  // ket factors, one per slot
  std::vector<std::vector<cplx>> v;  // bra factors
  std::string id;

  static std::vector<cplx> tensor(const std::vector<std::vector<cplx>>& f) {
    std::vector<cplx> t{1.0};
    for (const auto& x : f) {
      std::vector<cplx> next(t.size() * x.size());
      for (std::size_t a = 0; a < t.size(); ++a)
        for (std::size_t b = 0; b < x.size(); ++b) next[a * x.size() + b] = t[a] * x[b];
      t = std::move(next);
    }
    return t;
  }
  std::vector<cplx> ket() const { return tensor(u); }
  std::vector<cplx> bra() const { return tensor(v); }

  double op_norm() const {
    double n = 1.0;
    for (int j = 0; j < order; ++j) {
      double a = 0.0, b = 0.0;
      for (const auto& c : u[j]) a += std::norm(c);
      for (const auto& c : v[j]) b += std::norm(c);
      n *= std::sqrt(a * b);
    }
    return n;
  }

  /// Tr J X = <v| X |u> for a k-slot matrix X.
  cplx trace_with(const Eigen::MatrixXcd& x) const {
    const auto k = ket(), b = bra();
    if (static_cast<std::size_t>(x.rows()) != k.size()) throw std::invalid_argument("ObservableK: dimension mismatch");
    Eigen::Map<const Eigen::VectorXcd> uk(k.data(), static_cast<Eigen::Index>(k.size()));
    Eigen::Map<const Eigen::VectorXcd> vb(b.data(), static_cast<Eigen::Index>(b.size()));
    return vb.dot(x * uk);
  }

  /// Conjugation by the transposition of slots a and b.
  ObservableK transposed(int a, int b) const {
    ObservableK t = *this;
    std::swap(t.u[a], t.u[b]);
    std::swap(t.v[a], t.v[b]);
    t.id += "^(" + std::to_string(a) + std::to_string(b) + ")";
    return t;
  }
};

/// Random smooth one-body vector: Gaussian bump with random center, width and
/// momentum, spread over the lowest two Hermite modes when available.
inline std::vector<cplx> random_smooth_vector(const OneBodySpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> wdist(0.7, 1.4);
  const double cx = unit(rng), cy = unit(rng);
  const double px = unit(rng), py = unit(rng);
  const double w = wdist(rng);
  std::vector<cplx> modes{1.0};
  if (space.modes > 1) modes = {cplx(1.0, 0.0), cplx(0.5 * unit(rng), 0.5 * unit(rng))};
  return one_body_vector(
      space,
      [&](double x, double y) {
        const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        return std::exp(-0.5 * r2 / (w * w)) * std::polar(1.0, px * x + py * y);
      },
      modes);
}

inline std::vector<ObservableK> observable_panel(const OneBodySpace& space, int order, int count, std::uint64_t seed) {
  if (order < 1 || count < 1) throw std::invalid_argument("observable_panel: need order >= 1 and count >= 1");
  std::mt19937_64 rng(seed);
  std::vector<ObservableK> panel;
  for (int i = 0; i < count; ++i) {
    ObservableK j;
    j.order = order;
    for (int s = 0; s < order; ++s) {
      j.u.push_back(random_smooth_vector(space, rng));
      j.v.push_back(random_smooth_vector(space, rng));
    }
    j.id = "J" + std::to_string(order) + "_" + std::to_string(i);
    panel.push_back(std::move(j));
  }
  return panel;
}

/// d_k(a, b) = sum_i 2^{-(i+1)} |Tr J_i (a - b)| over the panel.
inline double metric_dk(const std::vector<ObservableK>& panel, const ReducedDensity& a, const ReducedDensity& b) {
  const Eigen::MatrixXcd diff = a.kernel - b.kernel;
  double s = 0.0, w = 0.5;
  for (const auto& j : panel) {
    s += w * std::abs(j.trace_with(diff));
    w *= 0.5;
  }
  return s;
}

/// <phi, (J (x) I) chi> for N-slot vectors, J acting on the leading slots.
inline cplx observable_matrix_element(const ObservableK& j, std::span<const cplx> phi, std::span<const cplx> chi) {
  const auto k = j.ket(), b = j.bra();
  const std::size_t rows = k.size();
  if (phi.size() % rows != 0 || phi.size() != chi.size()) throw std::invalid_argument("observable_matrix_element: size");
  const std::size_t rest = phi.size() / rows;
  cplx total{};
  for (std::size_t r = 0; r < rest; ++r) {
    cplx up{}, vc{};
    for (std::size_t a = 0; a < rows; ++a) {
      up += std::conj(k[a]) * phi[a * rest + r];
      vc += std::conj(b[a]) * chi[a * rest + r];
    }
    total += std::conj(up) * vc;
  }
  return total;
}

}  // namespace becl
