#pragma once

// N-particle amplitudes over (periodic x-grid) x (Hermite modes) per slot.
//
// Storage is grid-orthonormal: entry (s_1, m_1, ..., s_N, m_N) holds
// psi * cell_area^{N/2} in the Hermite coefficient basis, so the plain
// Euclidean norm of the array is the L2 norm of psi. Slots are row-major with
// the Hermite index innermost (see SlotLayout).

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "becl/fft.hpp"
#include "becl/hermite.hpp"

namespace becl {

struct OneBodySpace {
  PeriodicGrid2D grid{8, 4.0};
  int modes = 4;

  std::size_t dim() const { return grid.sites() * static_cast<std::size_t>(modes); }
  SlotLayout layout(int slots) const { return SlotLayout{slots, grid.sites(), modes}; }
  bool operator==(const OneBodySpace& o) const { return grid == o.grid && modes == o.modes; }
};

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{1} << 30;  // bytes for one state copy

/// Refuses states whose amplitude array would exceed the budget.
inline void check_memory_budget(const OneBodySpace& space, int slots, std::size_t budget = kDefaultMemoryBudget) {
  double elements = 1.0;
  for (int j = 0; j < slots; ++j) elements *= static_cast<double>(space.dim());
  const double bytes = elements * sizeof(cplx);
  if (bytes > static_cast<double>(budget)) {
    std::ostringstream os;
    os << "memory budget exceeded: " << slots << " slots of dimension " << space.dim() << " need "
       << static_cast<double>(elements) << " amplitudes (" << bytes / (1024.0 * 1024.0) << " MiB), budget "
       << static_cast<double>(budget) / (1024.0 * 1024.0) << " MiB";
    throw std::length_error(os.str());
  }
}

namespace detail {
inline std::uint64_t next_state_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}
}  // namespace detail

class ManyBodyState {
 public:
  ManyBodyState(OneBodySpace space, int particles, std::size_t budget = kDefaultMemoryBudget)
      : space_(space), n_(particles), id_(detail::next_state_id()) {
    if (n_ < 1 || n_ > 3) throw std::domain_error("ManyBodyState: particle count must be 1, 2 or 3");
    check_memory_budget(space_, n_, budget);
    amp_.assign(layout().size(), cplx{});
  }

  int particles() const { return n_; }
  const OneBodySpace& space() const { return space_; }
  SlotLayout layout() const { return space_.layout(n_); }
  std::vector<cplx>& amplitudes() { return amp_; }
  const std::vector<cplx>& amplitudes() const { return amp_; }

  double time = 0.0;
  bool symmetric = false;

  /// Trajectory identity; copies share it, fresh states get a new one.
  std::uint64_t id() const { return id_; }
  void renew_id() { id_ = detail::next_state_id(); }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amp_) s += std::norm(a);
    return std::sqrt(s);
  }
  void normalize() {
    const double r = norm();
    if (!(r > 0.0)) throw std::domain_error("ManyBodyState: cannot normalize the zero state");
    for (auto& a : amp_) a /= r;
  }

 private:
  OneBodySpace space_;
  int n_;
  std::uint64_t id_;
  std::vector<cplx> amp_;
};

/// out(idx) = in(idx with slots permuted): slot j of the output reads slot perm[j] of the input.
inline std::vector<cplx> permute_slots(std::span<const cplx> in, const SlotLayout& layout, std::span<const int> perm) {
  if (static_cast<int>(perm.size()) != layout.slots) throw std::invalid_argument("permute_slots: permutation size");
  std::vector<cplx> out(in.size());
  const std::size_t d = layout.slot_dim();
  std::vector<std::size_t> digit(layout.slots);
  for (std::size_t idx = 0; idx < in.size(); ++idx) {
    std::size_t r = idx;
    for (int j = layout.slots - 1; j >= 0; --j) {
      digit[j] = r % d;
      r /= d;
    }
    std::size_t src = 0;
    for (int j = 0; j < layout.slots; ++j) src = src * d + digit[perm[j]];
    out[idx] = in[src];
  }
  return out;
}

/// Max amplitude change under each slot transposition.
inline double symmetry_defect(const ManyBodyState& s) {
  const auto lay = s.layout();
  double worst = 0.0;
  for (int a = 0; a < lay.slots; ++a)
    for (int b = a + 1; b < lay.slots; ++b) {
      std::vector<int> perm(lay.slots);
      std::iota(perm.begin(), perm.end(), 0);
      std::swap(perm[a], perm[b]);
      const auto t = permute_slots(s.amplitudes(), lay, perm);
      for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(t[i] - s.amplitudes()[i]));
    }
  return worst;
}

/// Average over all slot permutations.
inline void symmetrize(ManyBodyState& s) {
  const auto lay = s.layout();
  std::vector<int> perm(lay.slots);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<cplx> acc(s.amplitudes().size(), cplx{});
  int count = 0;
  do {
    const auto t = permute_slots(s.amplitudes(), lay, perm);
    for (std::size_t i = 0; i < t.size(); ++i) acc[i] += t[i];
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (auto& a : acc) a /= static_cast<double>(count);
  s.amplitudes() = std::move(acc);
  s.symmetric = true;
}

/// Grid-orthonormal one-body vector sum_m c_m g(x) phi_m(z), normalized.
inline std::vector<cplx> one_body_vector(const OneBodySpace& space, const std::function<cplx(double, double)>& g,
                                         std::span<const cplx> mode_coeffs) {
  if (mode_coeffs.size() > static_cast<std::size_t>(space.modes)) {
    throw std::invalid_argument("one_body_vector: more mode coefficients than modes");
  }
  std::vector<cplx> v(space.dim(), cplx{});
  const auto& gr = space.grid;
  double s = 0.0;
  for (int i = 0; i < gr.n; ++i)
    for (int j = 0; j < gr.n; ++j) {
      const cplx gv = g(gr.coord(i), gr.coord(j));
      const std::size_t site = static_cast<std::size_t>(i) * gr.n + j;
      for (std::size_t m = 0; m < mode_coeffs.size(); ++m) {
        v[site * space.modes + m] = gv * mode_coeffs[m];
        s += std::norm(v[site * space.modes + m]);
      }
    }
  if (!(s > 0.0)) throw std::domain_error("one_body_vector: zero vector");
  for (auto& a : v) a /= std::sqrt(s);
  return v;
}

/// Normalized Gaussian bump times a plane wave, in a single Hermite mode.
inline std::vector<cplx> gaussian_one_body(const OneBodySpace& space, double width, int mode = 0,
                                           std::array<double, 2> center = {0.0, 0.0},
                                           std::array<double, 2> momentum = {0.0, 0.0}) {
  std::vector<cplx> c(static_cast<std::size_t>(mode) + 1, cplx{});
  c[mode] = 1.0;
  return one_body_vector(
      space,
      [&](double x, double y) {
        const double r2 = (x - center[0]) * (x - center[0]) + (y - center[1]) * (y - center[1]);
        return std::exp(-0.5 * r2 / (width * width)) * std::polar(1.0, momentum[0] * x + momentum[1] * y);
      },
      c);
}

/// phi^{(x) N}. Symmetric by construction.
inline ManyBodyState product_state(const OneBodySpace& space, int particles, std::span<const cplx> phi,
                                   std::size_t budget = kDefaultMemoryBudget) {
  if (phi.size() != space.dim()) throw std::invalid_argument("product_state: one-body vector has wrong size");
  ManyBodyState s(space, particles, budget);
  auto& a = s.amplitudes();
  const std::size_t d = space.dim();
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    std::size_t r = idx;
    cplx v = 1.0;
    for (int j = 0; j < particles; ++j) {
      v *= phi[r % d];
      r /= d;
    }
    a[idx] = v;
  }
  s.symmetric = true;
  return s;
}

/// Tensor product of distinct one-body vectors (not symmetrized).
inline ManyBodyState tensor_state(const OneBodySpace& space, const std::vector<std::vector<cplx>>& factors,
                                  std::size_t budget = kDefaultMemoryBudget) {
  const int n = static_cast<int>(factors.size());
  ManyBodyState s(space, n, budget);
  auto& a = s.amplitudes();
  const std::size_t d = space.dim();
  for (const auto& f : factors)
    if (f.size() != d) throw std::invalid_argument("tensor_state: factor has wrong size");
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    std::size_t r = idx;
    cplx v = 1.0;
    for (int j = n - 1; j >= 0; --j) {
      v *= factors[j][r % d];
      r /= d;
    }
    a[idx] = v;
  }
  return s;
}

/// Gaussian random amplitudes, symmetrized and normalized.
inline ManyBodyState random_symmetric_state(const OneBodySpace& space, int particles, std::uint64_t seed,
                                            std::size_t budget = kDefaultMemoryBudget) {
  ManyBodyState s(space, particles, budget);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (auto& a : s.amplitudes()) a = cplx(nd(rng), nd(rng));
  symmetrize(s);
  s.normalize();
  return s;
}

// ---- slot-wise linear maps -------------------------------------------------

/// Apply a Hermite-mode matrix A (rows x modes) on the m index of `slot`.
/// A must be square here so that the layout is preserved.
template <typename Matrix>
void apply_mode_matrix(std::span<cplx> data, const SlotLayout& lay, int slot, const Matrix& a) {
  const int mc = lay.modes;
  if (a.rows() != mc || a.cols() != mc) throw std::invalid_argument("apply_mode_matrix: matrix must be modes x modes");
  const std::size_t inner = lay.stride(slot);
  const std::size_t d = lay.slot_dim();
  const std::size_t outer = data.size() / (d * inner);
  Eigen::VectorXcd v(mc), w(mc);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t s = 0; s < lay.site_count; ++s)
      for (std::size_t i = 0; i < inner; ++i) {
        const std::size_t base = (o * d + s * mc) * inner + i;
        for (int m = 0; m < mc; ++m) v(m) = data[base + m * inner];
        w = a * v;
        for (int m = 0; m < mc; ++m) data[base + m * inner] = w(m);
      }
}

/// Unitary 2D DFT pair acting on the x-index of one slot of a layout.
class SlotFft {
 public:
  SlotFft(const OneBodySpace& space, const SlotLayout& lay, int slot)
      : n_(space.grid.n),
        fwd_(axes(space, lay, slot), loops(lay, slot), FFTW_FORWARD),
        bwd_(axes(space, lay, slot), loops(lay, slot), FFTW_BACKWARD) {}

  /// Both directions scaled by 1/n so the pair is unitary.
  void forward(std::span<cplx> data) const { run(fwd_, data); }
  void backward(std::span<cplx> data) const { run(bwd_, data); }

 private:
  void run(const FftPlan& p, std::span<cplx> data) const {
    p.execute(data.data());
    const double s = 1.0 / n_;
    for (auto& a : data) a *= s;
  }
  static std::vector<FftAxis> axes(const OneBodySpace& space, const SlotLayout& lay, int slot) {
    const std::ptrdiff_t inner = static_cast<std::ptrdiff_t>(lay.stride(slot));
    const std::ptrdiff_t n = space.grid.n;
    return {{space.grid.n, n * lay.modes * inner}, {space.grid.n, lay.modes * inner}};
  }
  static std::vector<FftAxis> loops(const SlotLayout& lay, int slot) {
    const std::ptrdiff_t inner = static_cast<std::ptrdiff_t>(lay.stride(slot));
    std::vector<FftAxis> l{{static_cast<int>(lay.modes * inner), 1}};
    std::ptrdiff_t outer = 1;
    for (int j = 0; j < slot; ++j) outer *= static_cast<std::ptrdiff_t>(lay.slot_dim());
    if (outer > 1) l.push_back({static_cast<int>(outer), static_cast<std::ptrdiff_t>(lay.slot_dim()) * inner});
    return l;
  }
  int n_;
  FftPlan fwd_;
  FftPlan bwd_;
};

/// Apply per-wavevector mode blocks B[k] (modes x modes) on `slot`:
/// forward DFT, block multiply, inverse DFT.
inline void apply_fourier_blocks(std::span<cplx> data, const OneBodySpace& space, const SlotLayout& lay, int slot,
                                 const std::vector<Eigen::MatrixXcd>& blocks) {
  if (blocks.size() != space.grid.sites()) throw std::invalid_argument("apply_fourier_blocks: need one block per wavevector");
  SlotFft fft(space, lay, slot);
  fft.forward(data);
  const int mc = lay.modes;
  const std::size_t inner = lay.stride(slot);
  const std::size_t d = lay.slot_dim();
  const std::size_t outer = data.size() / (d * inner);
  Eigen::VectorXcd v(mc), w(mc);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t s = 0; s < lay.site_count; ++s)
      for (std::size_t i = 0; i < inner; ++i) {
        const std::size_t base = (o * d + s * mc) * inner + i;
        for (int m = 0; m < mc; ++m) v(m) = data[base + m * inner];
        w = blocks[s] * v;
        for (int m = 0; m < mc; ++m) data[base + m * inner] = w(m);
      }
  fft.backward(data);
}

}  // namespace becl
