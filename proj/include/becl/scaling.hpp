#pragma once

// Admissible-limit geometry: the exponent v(beta), the region
// N >= omega^{v(beta)+eps}, and the three energy-estimate constraints.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace becl::scaling {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr double kBetaMax = 0.4;

/// The four rational branches whose maximum is v(beta).
template <typename T>
std::array<T, 4> branches(const T& beta) {
  const T one{1};
  return {
      (one - beta) / (T{2} * beta),
      (T{5} / T{4} * beta - T{1} / T{12}) / (one - T{5} / T{2} * beta),
      (T{1} / T{2} * beta + T{5} / T{6}) / (one - beta),
      (beta + T{1} / T{3}) / (one - T{2} * beta),
  };
}

inline void check_beta(double beta) {
  if (!(beta > 0.0 && beta < kBetaMax)) {
    throw std::domain_error("beta must lie in the open interval (0, 2/5)");
  }
}

inline void check_beta(const Rational& beta) {
  if (!(beta > 0 && beta < Rational(2, 5))) {
    throw std::domain_error("beta must lie in the open interval (0, 2/5)");
  }
}

inline std::array<double, 4> branch_values(double beta) {
  check_beta(beta);
  return branches(beta);
}

inline double v_of_beta(double beta) {
  const auto b = branch_values(beta);
  return *std::max_element(b.begin(), b.end());
}

/// Exact evaluation for rational beta.
inline Rational v_of_beta(const Rational& beta) {
  check_beta(beta);
  const auto b = branches(beta);
  return *std::max_element(b.begin(), b.end());
}

/// Indices (0-based) of the branches attaining the maximum, exactly.
inline std::vector<int> active_branches(const Rational& beta) {
  const auto b = branches(beta);
  const Rational top = *std::max_element(b.begin(), b.end());
  std::vector<int> idx;
  for (int i = 0; i < 4; ++i) {
    if (b[i] == top) idx.push_back(i);
  }
  return idx;
}

/// Float fallback: branches within relative 1e-12 of the max.
inline std::vector<int> active_branches(double beta, double rel_tol = 1e-12) {
  const auto b = branch_values(beta);
  const double top = *std::max_element(b.begin(), b.end());
  std::vector<int> idx;
  for (int i = 0; i < 4; ++i) {
    if (std::abs(b[i] - top) <= rel_tol * std::abs(top)) idx.push_back(i);
  }
  return idx;
}

struct ScalingParams {
  double beta = 0.2;
  double eps = 0.1;
  double n_particles = 1.0;
  double omega = 1.0;

  void validate() const {
    check_beta(beta);
    if (!(eps > 0.0)) throw std::domain_error("eps must be positive");
    if (!(n_particles >= 1.0)) throw std::domain_error("N must be a positive integer");
    if (!(omega >= 1.0)) throw std::domain_error("omega must be >= 1");
  }
};

/// N >= omega^{v(beta)+eps}.
inline bool admissible(const ScalingParams& s) {
  s.validate();
  return s.n_particles >= std::pow(s.omega, v_of_beta(s.beta) + s.eps);
}

struct ConstraintCheck {
  double lhs = 0.0;
  double rhs = 0.0;    // +inf for depth 0
  double ratio = 0.0;  // lhs / rhs
  bool holds = true;
};

struct ConstraintLedger {
  std::array<ConstraintCheck, 3> checks;
  bool all_hold() const {
    return std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.holds; });
  }
};

/// The three conditions collected from the energy estimate at hierarchy depth n:
///   (N sqrt w)^{5b/2-1} w^{5/12} << n^-2,
///   (N sqrt w)^{b-1}    w^{4/3}  << n^-1,
///   (N sqrt w)^{2b-1}   w^{5/6}  << n^-1.
inline ConstraintLedger constraint_ledger(const ScalingParams& s, int depth) {
  s.validate();
  if (depth < 0) throw std::domain_error("hierarchy depth must be non-negative");
  const double a = s.n_particles * std::sqrt(s.omega);
  const double b = s.beta;
  const std::array<double, 3> lhs = {
      std::pow(a, 2.5 * b - 1.0) * std::pow(s.omega, 5.0 / 12.0),
      std::pow(a, b - 1.0) * std::pow(s.omega, 4.0 / 3.0),
      std::pow(a, 2.0 * b - 1.0) * std::pow(s.omega, 5.0 / 6.0),
  };
  const double n = depth;
  const double inf = std::numeric_limits<double>::infinity();
  const std::array<double, 3> rhs = {
      depth == 0 ? inf : 1.0 / (n * n),
      depth == 0 ? inf : 1.0 / n,
      depth == 0 ? inf : 1.0 / n,
  };
  ConstraintLedger out;
  for (int i = 0; i < 3; ++i) {
    auto& c = out.checks[i];
    c.lhs = lhs[i];
    c.rhs = rhs[i];
    c.ratio = std::isinf(rhs[i]) ? 0.0 : lhs[i] / rhs[i];
    c.holds = c.ratio < 1.0;
  }
  return out;
}

struct RegionRow {
  double beta = 0.0;
  std::array<double, 4> branch{};
  double v = 0.0;
};

/// Uniform interior grid beta_i = (2/5) (i+1) / (count+1), i = 0..count-1.
inline std::vector<double> beta_grid(int count) {
  if (count < 1) throw std::domain_error("beta grid needs at least one point");
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) grid[i] = kBetaMax * (i + 1) / (count + 1);
  return grid;
}

inline std::vector<RegionRow> region_table(const std::vector<double>& betas) {
  std::vector<RegionRow> rows;
  rows.reserve(betas.size());
  for (double beta : betas) {
    RegionRow r;
    r.beta = beta;
    r.branch = branch_values(beta);
    r.v = *std::max_element(r.branch.begin(), r.branch.end());
    rows.push_back(r);
  }
  return rows;
}

}  // namespace becl::scaling
