#pragma once

// BBGKY residuals for marginals of an evolved many-body state,
//
//   R^(k) = i d_t g^(k) - [H_k, g^(k)] - (N-k)/N sum_{j<=k} Tr_{k+1} [V_{j,k+1}, g^(k+1)],
//
// with H_k the k-particle part of H - N w (one-body terms plus V/N between the
// first k particles). d_t is a central difference. R is tested against a
// panel of observables; the reported residual is max_J |Tr J R|.
//
// Two routes: a dense one that works on marginal matrices (small grids), and
// a vector one that works on psi(t-dt), psi(t), psi(t+dt) directly, using
// Tr J R^(k) = i d_t <psi, J psi> - (<psi, J H psi> - <H psi, J psi>), J acting
// on the first k slots.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "becl/hierarchy/observable.hpp"
#include "becl/manybody/density.hpp"
#include "becl/manybody/operator.hpp"
#include "becl/manybody/state.hpp"

namespace becl {

struct ResidualReport {
  int k = 0;
  double t = 0.0;
  std::vector<std::string> observable_ids;
  std::vector<double> values;  // |Tr J R| per observable
  double residual = 0.0;       // max over panel
  double floor_estimate = 0.0;

  void finish() {
    residual = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  }
};

namespace detail {

/// Row and column node transform of a k-slot matrix: U g U^T per slot.
inline Eigen::MatrixXcd matrix_to_nodes(const ManyBodyOperator& op, Eigen::MatrixXcd g) {
  for (Eigen::Index c = 0; c < g.cols(); ++c) op.to_nodes(std::span<cplx>(g.col(c).data(), g.rows()));
  Eigen::MatrixXcd t = g.transpose();
  for (Eigen::Index c = 0; c < t.cols(); ++c) op.to_nodes(std::span<cplx>(t.col(c).data(), t.rows()));
  return t.transpose();
}

inline Eigen::MatrixXcd matrix_from_nodes(const ManyBodyOperator& op, Eigen::MatrixXcd g) {
  for (Eigen::Index c = 0; c < g.cols(); ++c) op.from_nodes(std::span<cplx>(g.col(c).data(), g.rows()));
  Eigen::MatrixXcd t = g.transpose();
  for (Eigen::Index c = 0; c < t.cols(); ++c) op.from_nodes(std::span<cplx>(t.col(c).data(), t.rows()));
  return t.transpose();
}

/// [H_k, g] with H_k applied column by column.
inline Eigen::MatrixXcd commutator(const ManyBodyOperator& op, const Eigen::MatrixXcd& g) {
  Eigen::MatrixXcd hg(g.rows(), g.cols());
  for (Eigen::Index c = 0; c < g.cols(); ++c) {
    op.apply(std::span<const cplx>(g.col(c).data(), g.rows()), std::span<cplx>(hg.col(c).data(), g.rows()));
  }
  return hg - hg.adjoint();  // g Hermitian: g H = (H g)^dagger
}

inline void check_provenance(const ReducedDensity& a, const ReducedDensity& b, const char* what) {
  if (a.state_id != b.state_id) throw std::invalid_argument(std::string("bbgky_residual: mismatched provenance (") + what + ")");
}

}  // namespace detail

/// Sum_{j<=k} Tr_{k+1} [V_{j,k+1}/N, g^(k+1)] in the coefficient basis, using
/// the pair table of a (k+1)-slot operator.
inline Eigen::MatrixXcd interaction_trace_term(const ManyBodyOperator& op_next, const ReducedDensity& next) {
  const int k1 = next.order;
  if (op_next.slots() != k1) throw std::invalid_argument("interaction_trace_term: operator slots must equal k+1");
  const std::size_t d = next.space.dim();
  const Eigen::Index rows_k = static_cast<Eigen::Index>(next.dim() / d);
  const Eigen::MatrixXcd g = detail::matrix_to_nodes(op_next, next.kernel);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows_k, rows_k);
  if (op_next.interacting()) {
    auto pair_sum = [&](Eigen::Index a_k, std::size_t last) {
      double w = 0.0;
      std::size_t r = static_cast<std::size_t>(a_k);
      for (int j = k1 - 2; j >= 0; --j) {
        w += op_next.pair_value(r % d, last);
        r /= d;
      }
      return w;
    };
    for (Eigen::Index a = 0; a < rows_k; ++a)
      for (Eigen::Index b = 0; b < rows_k; ++b) {
        cplx s{};
        for (std::size_t x = 0; x < d; ++x) {
          const Eigen::Index ra = a * static_cast<Eigen::Index>(d) + static_cast<Eigen::Index>(x);
          const Eigen::Index rb = b * static_cast<Eigen::Index>(d) + static_cast<Eigen::Index>(x);
          s += (pair_sum(a, x) - pair_sum(b, x)) * g(ra, rb);
        }
        out(a, b) = s;
      }
  }
  const ManyBodyOperator op_k(op_next.space(), k1 - 1, op_next.particles(), op_next.omega(), op_next.potential());
  return detail::matrix_from_nodes(op_k, out);
}

/// Dense route. `op_k` has k slots, `op_next` k+1 slots (ignored when k = N),
/// both with the full particle count N.
inline ResidualReport bbgky_residual(const ReducedDensity& g_minus, const ReducedDensity& g_center,
                                     const ReducedDensity& g_plus, const ReducedDensity* g_next,
                                     const ManyBodyOperator& op_k, const ManyBodyOperator* op_next,
                                     const std::vector<ObservableK>& panel) {
  const int k = g_center.order;
  const int n = op_k.particles();
  detail::check_provenance(g_minus, g_center, "t-dt vs t");
  detail::check_provenance(g_plus, g_center, "t+dt vs t");
  if (g_minus.order != k || g_plus.order != k || op_k.slots() != k) {
    throw std::invalid_argument("bbgky_residual: marginal orders disagree");
  }
  const double dt = g_center.time - g_minus.time;
  if (!(dt > 0.0) || std::abs((g_plus.time - g_center.time) - dt) > 1e-9 * std::max(1.0, dt)) {
    throw std::invalid_argument("bbgky_residual: mismatched provenance (times are not t-dt, t, t+dt)");
  }
  Eigen::MatrixXcd r = cplx(0.0, 1.0) * (g_plus.kernel - g_minus.kernel) / (2.0 * dt);
  r -= detail::commutator(op_k, g_center.kernel);
  if (k < n) {
    if (!g_next || !op_next) throw std::invalid_argument("bbgky_residual: k < N needs the (k+1) marginal");
    detail::check_provenance(*g_next, g_center, "k+1 marginal");
    if (g_next->order != k + 1 || std::abs(g_next->time - g_center.time) > 1e-12 * std::max(1.0, dt)) {
      throw std::invalid_argument("bbgky_residual: mismatched provenance of the (k+1) marginal");
    }
    r -= static_cast<double>(n - k) * interaction_trace_term(*op_next, *g_next);
  }
  ResidualReport rep;
  rep.k = k;
  rep.t = g_center.time;
  for (const auto& j : panel) {
    rep.observable_ids.push_back(j.id);
    rep.values.push_back(std::abs(j.trace_with(r)));
  }
  rep.floor_estimate = 1e-16 * g_center.kernel.cwiseAbs().maxCoeff() / dt;
  rep.finish();
  return rep;
}

/// Vector route. `op` is the full N-slot operator.
inline ResidualReport bbgky_residual_vector(const ManyBodyState& minus, const ManyBodyState& center,
                                            const ManyBodyState& plus, const ManyBodyOperator& op,
                                            const std::vector<ObservableK>& panel) {
  if (minus.id() != center.id() || plus.id() != center.id()) {
    throw std::invalid_argument("bbgky_residual_vector: mismatched provenance of the states");
  }
  const double dt = center.time - minus.time;
  if (!(dt > 0.0) || std::abs((plus.time - center.time) - dt) > 1e-9 * std::max(1.0, dt)) {
    throw std::invalid_argument("bbgky_residual_vector: states are not at t-dt, t, t+dt");
  }
  const auto hpsi = op.apply(center.amplitudes());
  ResidualReport rep;
  rep.k = panel.empty() ? 0 : panel.front().order;
  rep.t = center.time;
  const cplx i(0.0, 1.0);
  for (const auto& j : panel) {
    const cplx dp = observable_matrix_element(j, plus.amplitudes(), plus.amplitudes());
    const cplx dm = observable_matrix_element(j, minus.amplitudes(), minus.amplitudes());
    const cplx a = observable_matrix_element(j, center.amplitudes(), hpsi);
    const cplx b = observable_matrix_element(j, hpsi, center.amplitudes());
    rep.observable_ids.push_back(j.id);
    rep.values.push_back(std::abs(i * (dp - dm) / (2.0 * dt) - (a - b)));
  }
  rep.floor_estimate = 1e-16 / dt;
  rep.finish();
  return rep;
}

/// psi(t - dt), psi(t), psi(t + dt) from one trajectory started at `initial`.
struct Triple {
  ManyBodyState minus, center, plus;
};

inline Triple evolve_triple(const ManyBodyState& initial, const ManyBodyOperator& op, double t, double dt) {
  const int steps = static_cast<int>(std::llround(t / dt));
  if (steps < 1 || std::abs(steps * dt - t) > 1e-9 * std::max(1.0, t)) {
    throw std::invalid_argument("evolve_triple: t must be a positive multiple of dt");
  }
  ManyBodyState s = initial;
  evolve(s, op, dt, steps - 1);
  ManyBodyState m = s;
  evolve(s, op, dt, 1);
  ManyBodyState c = s;
  evolve(s, op, dt, 1);
  return Triple{std::move(m), std::move(c), std::move(s)};
}

}  // namespace becl
