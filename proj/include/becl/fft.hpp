#pragma once

// Thin RAII layer over FFTW's guru interface plus the periodic x-grid.
//
// All plans are in place, created with FFTW_ESTIMATE | FFTW_UNALIGNED on a
// private scratch buffer, so one plan can be executed on any array with the
// same strides. FFTW's planner is not thread safe; creation and destruction
// go through a process-wide mutex, execution does not.

#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace becl {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// One axis of a guru plan: length and element stride.
struct FftAxis {
  int n = 1;
  std::ptrdiff_t stride = 1;
};

class FftPlan {
 public:
  /// `dims` are transformed, `loops` are batched over. sign is FFTW_FORWARD
  /// or FFTW_BACKWARD. Transforms are unnormalized.
  FftPlan(const std::vector<FftAxis>& dims, const std::vector<FftAxis>& loops, int sign) {
    std::vector<fftw_iodim> d, l;
    std::ptrdiff_t extent = 1;
    for (const auto& a : dims) {
      if (a.n < 1) throw std::invalid_argument("FftPlan: axis length must be positive");
      d.push_back({a.n, static_cast<int>(a.stride), static_cast<int>(a.stride)});
      extent += static_cast<std::ptrdiff_t>(a.n - 1) * a.stride;
    }
    for (const auto& a : loops) {
      l.push_back({a.n, static_cast<int>(a.stride), static_cast<int>(a.stride)});
      extent += static_cast<std::ptrdiff_t>(a.n - 1) * a.stride;
    }
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    auto* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(extent)));
    if (!scratch) throw std::bad_alloc();
    plan_ = fftw_plan_guru_dft(static_cast<int>(d.size()), d.data(), static_cast<int>(l.size()), l.data(), scratch,
                               scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (!plan_) throw std::runtime_error("FftPlan: FFTW failed to create a plan");
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& o) noexcept : plan_(o.plan_) { o.plan_ = nullptr; }
  FftPlan& operator=(FftPlan&& o) noexcept {
    if (this != &o) {
      reset();
      plan_ = o.plan_;
      o.plan_ = nullptr;
    }
    return *this;
  }
  ~FftPlan() { reset(); }

  void execute(std::complex<double>* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan_, p, p);
  }

 private:
  void reset() {
    if (plan_) {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan_);
      plan_ = nullptr;
    }
  }
  fftw_plan plan_ = nullptr;
};

/// Uniform periodic grid on [-L, L)^2 with n points per axis.
struct PeriodicGrid2D {
  int n = 64;
  double half_length = 8.0;

  PeriodicGrid2D() = default;
  PeriodicGrid2D(int points, double L) : n(points), half_length(L) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("PeriodicGrid2D: n must be even and >= 2");
    if (!(L > 0.0)) throw std::invalid_argument("PeriodicGrid2D: L must be positive");
  }

  std::size_t sites() const { return static_cast<std::size_t>(n) * n; }
  double dx() const { return 2.0 * half_length / n; }
  double cell_area() const { return dx() * dx(); }
  double coord(int i) const { return -half_length + i * dx(); }
  /// Angular wavenumber of FFT bin i.
  double wavenumber(int i) const {
    const int j = i < n / 2 ? i : i - n;
    return std::numbers::pi / half_length * j;
  }
  double k2(int i, int j) const {
    const double a = wavenumber(i), b = wavenumber(j);
    return a * a + b * b;
  }
  /// Shortest periodic image of a coordinate difference.
  double wrap(double d) const {
    const double p = 2.0 * half_length;
    return d - p * std::round(d / p);
  }
  bool operator==(const PeriodicGrid2D& o) const { return n == o.n && half_length == o.half_length; }
};

}  // namespace becl
