#pragma once

// Reduced densities gamma^(k) = Tr_{k+1..N} |psi><psi| as dense matrices in
// the grid-orthonormal (site, mode)^k basis, plus trace-class diagnostics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "becl/hermite.hpp"
#include "becl/manybody/state.hpp"

namespace becl {

struct ReducedDensity {
  int order = 1;
  OneBodySpace space;
  Eigen::MatrixXcd kernel;
  std::uint64_t state_id = 0;  // trajectory the marginal came from
  double time = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(kernel.rows()); }
  cplx trace() const { return kernel.trace(); }
  double hermiticity_defect() const { return (kernel - kernel.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(kernel, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
  double purity() const { return (kernel * kernel).trace().real(); }
};

inline constexpr std::size_t kDefaultDensityBudget = std::size_t{1} << 30;

/// gamma^(k) = Psi Psi^dagger with Psi the (d^k x d^{N-k}) reshape of psi.
inline ReducedDensity marginal(const ManyBodyState& s, int k, std::size_t budget = kDefaultDensityBudget) {
  if (k < 1 || k > s.particles()) throw std::domain_error("marginal: need 1 <= k <= N");
  const std::size_t d = s.space().dim();
  std::size_t rows = 1, cols = 1;
  for (int j = 0; j < k; ++j) rows *= d;
  for (int j = k; j < s.particles(); ++j) cols *= d;
  const double bytes = static_cast<double>(rows) * static_cast<double>(rows) * sizeof(cplx);
  if (bytes > static_cast<double>(budget)) {
    throw std::length_error("marginal: dense kernel of order " + std::to_string(k) + " needs " +
                            std::to_string(bytes / (1024.0 * 1024.0)) + " MiB, over budget");
  }
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> psi(s.amplitudes().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  ReducedDensity r;
  r.order = k;
  r.space = s.space();
  r.kernel = psi * psi.adjoint();
  r.state_id = s.id();
  r.time = s.time;
  return r;
}

/// |a><a| (x) ... for a one-body vector, as an order-k density.
inline ReducedDensity product_density(const OneBodySpace& space, std::span<const cplx> phi, int k) {
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(phi.data(), static_cast<Eigen::Index>(phi.size()));
  Eigen::VectorXcd t = v;
  for (int j = 1; j < k; ++j) {
    Eigen::VectorXcd next(t.size() * v.size());
    for (Eigen::Index a = 0; a < t.size(); ++a) next.segment(a * v.size(), v.size()) = t(a) * v;
    t = std::move(next);
  }
  ReducedDensity r;
  r.order = k;
  r.space = space;
  r.kernel = t * t.adjoint();
  return r;
}

struct TraceDistance {
  double trace_norm = 0.0;  // Tr |a - b|
  double half = 0.0;        // (1/2) Tr |a - b|
};

inline TraceDistance trace_distance(const ReducedDensity& a, const ReducedDensity& b) {
  if (a.kernel.rows() != b.kernel.rows() || a.kernel.cols() != b.kernel.cols()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  const Eigen::MatrixXcd diff = a.kernel - b.kernel;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  TraceDistance t;
  t.trace_norm = es.eigenvalues().cwiseAbs().sum();
  t.half = 0.5 * t.trace_norm;
  return t;
}

/// Sum of singular values.
inline double trace_norm(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().sum();
}

struct ProjectionStatistic {
  cplx trace{};             // Tr P_a gamma P_b = <P_a psi, P_b psi>
  double trace_norm = 0.0;  // || P_a gamma P_b ||_1
};

/// Statistics of P_alpha gamma^(k) P_beta for k = alpha.size(), computed from
/// the N-body vector without forming gamma.
inline ProjectionStatistic projection_statistics(const ManyBodyState& s, std::span<const int> alpha,
                                                 std::span<const int> beta) {
  if (alpha.size() != beta.size() || alpha.empty() || static_cast<int>(alpha.size()) > s.particles()) {
    throw std::invalid_argument("projection_statistics: need |alpha| = |beta| = k with 1 <= k <= N");
  }
  const auto lay = s.layout();
  std::vector<cplx> pa(s.amplitudes()), pb(s.amplitudes());
  apply_projection(pa, lay, alpha);
  apply_projection(pb, lay, beta);
  ProjectionStatistic out;
  for (std::size_t i = 0; i < pa.size(); ++i) out.trace += std::conj(pa[i]) * pb[i];

  const int k = static_cast<int>(alpha.size());
  const std::size_t d = s.space().dim();
  std::size_t rows = 1, cols = 1;
  for (int j = 0; j < k; ++j) rows *= d;
  for (int j = k; j < s.particles(); ++j) cols *= d;
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> a(pa.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  Eigen::Map<const RowMat> b(pb.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  // P_a gamma P_b = A B^dagger; its trace norm equals that of |A| |B| with
  // |A| = (A^dagger A)^{1/2}, which lives on the smaller traced-out side.
  if (cols == 1) {
    out.trace_norm = a.norm() * b.norm();
  } else if (rows <= cols) {
    out.trace_norm = trace_norm(a * b.adjoint());
  } else {
    auto root = [](const Eigen::MatrixXcd& g) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
      return Eigen::MatrixXcd(es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                              es.eigenvectors().adjoint());
    };
    out.trace_norm = trace_norm(root(a.adjoint() * a) * root(b.adjoint() * b));
  }
  return out;
}

}  // namespace becl
