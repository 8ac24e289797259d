#pragma once

// Hermite spectral machinery for the confined (z) direction.
//
// The basis functions are the L2-normalized eigenfunctions of the 1D harmonic
// oscillator -d^2/dz^2 + z^2,
//
//     phi_m(z) = H_m(z) exp(-z^2/2) / sqrt(2^m m! sqrt(pi)),   eigenvalue 2m+1,
//
// evaluated with the stable three-term recurrence on the normalized functions.
// Quadrature is Gauss-Hermite in "function weight" form: for smooth f,
//
//     int f(z) dz  ~=  sum_q W_q f(z_q),   W_q = 1 / (Q phi_{Q-1}(z_q)^2),
//
// which is exact whenever f(z) exp(z^2) is a polynomial of degree <= 2Q-1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace becl {

using cplx = std::complex<double>;

namespace detail {

/// phi_0 .. phi_{count-1} at x, written into out.
inline void hermite_functions(double x, int count, std::span<double> out) {
  if (count <= 0) return;
  out[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (count == 1) return;
  out[1] = std::sqrt(2.0) * x * out[0];
  for (int m = 1; m + 1 < count; ++m) {
    out[m + 1] = std::sqrt(2.0 / (m + 1)) * x * out[m] - std::sqrt(static_cast<double>(m) / (m + 1)) * out[m - 1];
  }
}

}  // namespace detail

/// Value of the normalized Hermite function phi_m(x).
inline double hermite_function(int m, double x) {
  if (m < 0) throw std::domain_error("hermite_function: negative mode index");
  std::vector<double> buf(static_cast<std::size_t>(m) + 1);
  detail::hermite_functions(x, m + 1, buf);
  return buf.back();
}

/// Normalized ground state of -d^2/dz^2 + omega^2 z^2:
/// h_omega(z) = omega^{1/4} pi^{-1/4} exp(-omega z^2 / 2).
inline double ground_state(double omega, double z) {
  if (!(omega > 0.0)) throw std::domain_error("ground_state: omega must be positive");
  return std::pow(omega, 0.25) * std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * omega * z * z);
}

struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // function weights (integrate f directly)
};

/// Gauss-Hermite rule with `count` nodes: Golub-Welsch for the initial guess,
/// polished with Newton on phi_count, weights from phi_{count-1}.
inline GaussHermiteRule gauss_hermite_rule(int count) {
  if (count < 1) throw std::domain_error("gauss_hermite_rule: need at least one node");
  GaussHermiteRule rule;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  if (count == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = std::sqrt(std::numbers::pi);  // exp(0) * sqrt(pi)
    return rule;
  }
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
  for (int k = 1; k < count; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi, Eigen::EigenvaluesOnly);
  std::vector<double> phi(static_cast<std::size_t>(count) + 1);
  for (int q = 0; q < count; ++q) {
    double x = eig.eigenvalues()(q);
    for (int it = 0; it < 8; ++it) {
      detail::hermite_functions(x, count + 1, phi);
      // phi_Q' = sqrt(2Q) phi_{Q-1} - x phi_Q
      const double deriv = std::sqrt(2.0 * count) * phi[count - 1] - x * phi[count];
      if (deriv == 0.0) break;
      const double dx = phi[count] / deriv;
      x -= dx;
      if (std::abs(dx) < 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    detail::hermite_functions(x, count + 1, phi);
    rule.nodes[q] = x;
    rule.weights[q] = 1.0 / (count * phi[count - 1] * phi[count - 1]);
  }
  // Enforce exact mirror symmetry of the rule.
  for (int q = 0; q < count / 2; ++q) {
    const int p = count - 1 - q;
    const double x = 0.5 * (rule.nodes[p] - rule.nodes[q]);
    const double w = 0.5 * (rule.weights[p] + rule.weights[q]);
    rule.nodes[q] = -x;
    rule.nodes[p] = x;
    rule.weights[q] = rule.weights[p] = w;
  }
  if (count % 2 == 1) rule.nodes[count / 2] = 0.0;
  return rule;
}

/// Truncated eigenbasis of -d^2/dz^2 + z^2 with its quadrature.
/// Immutable after construction.
class HermiteBasis {
 public:
  static constexpr int kDefaultModes = 8;

  /// `nodes == 0` selects the default 3 * modes, enough to resolve quartic
  /// integrands of the ground mode to ~1e-12.
  explicit HermiteBasis(int modes = kDefaultModes, int nodes = 0)
      : modes_(modes), node_count_(nodes == 0 ? 3 * modes : nodes) {
    if (modes_ < 1) throw std::domain_error("HermiteBasis: mode count must be positive");
    if (node_count_ < 1) throw std::domain_error("HermiteBasis: node count must be positive");
    auto rule = gauss_hermite_rule(node_count_);
    nodes_ = std::move(rule.nodes);
    weights_ = std::move(rule.weights);
    // two extra rows so that the ladder relations can reach m + 2
    const int rows = modes_ + 2;
    table_.resize(rows, node_count_);
    std::vector<double> buf(rows);
    for (int q = 0; q < node_count_; ++q) {
      detail::hermite_functions(nodes_[q], rows, buf);
      for (int m = 0; m < rows; ++m) table_(m, q) = buf[m];
    }
  }

  int modes() const { return modes_; }
  int node_count() const { return node_count_; }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  /// phi_m at node q.
  double eigenfunction(int m, int q) const { return table_(m, q); }

  /// Quadrature inner product <phi_m, phi_n>.
  double inner(int m, int n) const {
    double s = 0.0;
    for (int q = 0; q < node_count_; ++q) s += weights_[q] * table_(m, q) * table_(n, q);
    return s;
  }

  /// Quadrature value of <phi_m, z^2 phi_m>.
  double second_moment(int m) const {
    double s = 0.0;
    for (int q = 0; q < node_count_; ++q) {
      s += weights_[q] * nodes_[q] * nodes_[q] * table_(m, q) * table_(m, q);
    }
    return s;
  }

  /// Max over nodes of |(-d^2/dz^2 + z^2) phi_m - (2m+1) phi_m|, with the second
  /// derivative taken through the ladder operators:
  ///   phi_m'' = [sqrt(m(m-1)) phi_{m-2} - (2m+1) phi_m + sqrt((m+1)(m+2)) phi_{m+2}] / 2.
  double eigen_residual(int m) const {
    double worst = 0.0;
    for (int q = 0; q < node_count_; ++q) {
      const double lower = m >= 2 ? std::sqrt(double(m) * (m - 1)) * table_(m - 2, q) : 0.0;
      const double upper = std::sqrt(double(m + 1) * (m + 2)) * table_(m + 2, q);
      const double second = 0.5 * (lower - (2.0 * m + 1.0) * table_(m, q) + upper);
      const double lhs = -second + nodes_[q] * nodes_[q] * table_(m, q);
      worst = std::max(worst, std::abs(lhs - (2.0 * m + 1.0) * table_(m, q)));
    }
    return worst;
  }

  /// Coefficients -> values at the nodes.
  std::vector<cplx> to_nodes(std::span<const cplx> coeffs) const {
    check_coeffs(coeffs.size());
    std::vector<cplx> out(node_count_, cplx{});
    for (int q = 0; q < node_count_; ++q) {
      cplx s{};
      for (int m = 0; m < modes_; ++m) s += coeffs[m] * table_(m, q);
      out[q] = s;
    }
    return out;
  }

  /// Values at the nodes -> coefficients (quadrature projection).
  std::vector<cplx> from_nodes(std::span<const cplx> values) const {
    if (values.size() != static_cast<std::size_t>(node_count_)) {
      throw std::invalid_argument("HermiteBasis::from_nodes: value count does not match node count");
    }
    std::vector<cplx> out(modes_, cplx{});
    for (int m = 0; m < modes_; ++m) {
      cplx s{};
      for (int q = 0; q < node_count_; ++q) s += weights_[q] * table_(m, q) * values[q];
      out[m] = s;
    }
    return out;
  }

  /// U(q, m) = sqrt(W_q) phi_m(z_q). Orthogonal when node_count == modes.
  Eigen::MatrixXd collocation_matrix() const {
    Eigen::MatrixXd u(node_count_, modes_);
    for (int q = 0; q < node_count_; ++q) {
      const double s = std::sqrt(weights_[q]);
      for (int m = 0; m < modes_; ++m) u(q, m) = s * table_(m, q);
    }
    return u;
  }

  /// Galerkin matrix of -d^2/dz^2 on the first `modes` functions.
  Eigen::MatrixXd kinetic_matrix() const {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(modes_, modes_);
    for (int m = 0; m < modes_; ++m) {
      t(m, m) = 0.5 * (2.0 * m + 1.0);
      if (m + 2 < modes_) t(m, m + 2) = t(m + 2, m) = -0.5 * std::sqrt(double(m + 1) * (m + 2));
    }
    return t;
  }

 private:
  void check_coeffs(std::size_t n) const {
    if (n != static_cast<std::size_t>(modes_)) {
      throw std::invalid_argument("HermiteBasis: coefficient count does not match mode count");
    }
  }

  int modes_;
  int node_count_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  Eigen::MatrixXd table_;
};

/// int |h_1(z)|^4 dz by the basis quadrature. Closed form: (2 pi)^{-1/2}.
inline double quartic_norm(const HermiteBasis& basis) {
  double s = 0.0;
  for (int q = 0; q < basis.node_count(); ++q) {
    const double h = basis.eigenfunction(0, q);
    s += basis.weights()[q] * h * h * h * h;
  }
  return s;
}

/// True when the quartic integral moves by more than `tol` under doubling of
/// the node count.
inline bool quartic_norm_under_resolved(const HermiteBasis& basis, double tol = 1e-10) {
  const HermiteBasis fine(basis.modes(), 2 * basis.node_count());
  return std::abs(quartic_norm(fine) - quartic_norm(basis)) > tol;
}

/// z-mode class of a projection: ground (P0) or all excited modes (P1).
enum class ModeClass { ground = 0, excited = 1 };

inline ModeClass mode_class(int alpha) {
  if (alpha != 0 && alpha != 1) throw std::domain_error("mode class must be 0 or 1");
  return alpha == 0 ? ModeClass::ground : ModeClass::excited;
}

/// P0 / P1 on a single coefficient vector.
inline std::vector<cplx> project(std::span<const cplx> coeffs, ModeClass cls) {
  std::vector<cplx> out(coeffs.begin(), coeffs.end());
  if (cls == ModeClass::ground) {
    std::fill(out.begin() + std::min<std::size_t>(1, out.size()), out.end(), cplx{});
  } else if (!out.empty()) {
    out[0] = cplx{};
  }
  return out;
}

/// Layout of a k-slot tensor whose slots each carry `site_count` x-sites and
/// `modes` Hermite coefficients, row-major with the Hermite index innermost.
struct SlotLayout {
  int slots = 1;
  std::size_t site_count = 1;
  int modes = 1;

  std::size_t slot_dim() const { return site_count * static_cast<std::size_t>(modes); }
  std::size_t size() const {
    std::size_t s = 1;
    for (int j = 0; j < slots; ++j) s *= slot_dim();
    return s;
  }
  /// Stride (in elements) of the combined index of slot j.
  std::size_t stride(int j) const {
    std::size_t s = 1;
    for (int i = j + 1; i < slots; ++i) s *= slot_dim();
    return s;
  }
};

/// Apply P^j_{cls} in place on slot j of a tensor with the given layout.
inline void apply_projection(std::span<cplx> data, const SlotLayout& layout, int slot, ModeClass cls) {
  if (slot < 0 || slot >= layout.slots) throw std::out_of_range("apply_projection: slot out of range");
  if (data.size() != layout.size()) throw std::invalid_argument("apply_projection: size mismatch");
  const std::size_t stride = layout.stride(slot);
  const std::size_t d = layout.slot_dim();
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    const int m = static_cast<int>(((idx / stride) % d) % layout.modes);
    const bool keep = (cls == ModeClass::ground) ? (m == 0) : (m != 0);
    if (!keep) data[idx] = cplx{};
  }
}

/// P_alpha = prod_j P^j_{alpha_j} over the leading alpha.size() slots.
inline void apply_projection(std::span<cplx> data, const SlotLayout& layout, std::span<const int> alpha) {
  if (static_cast<int>(alpha.size()) > layout.slots) {
    throw std::invalid_argument("apply_projection: multi-index longer than slot count");
  }
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    apply_projection(data, layout, static_cast<int>(j), mode_class(alpha[j]));
  }
}

}  // namespace becl
