#pragma once

#include <fftw3.h>

#include <complex>
#include <cstdlib>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <utility>
#include <vector>

#include "dsreg/grid.hpp"

namespace dsreg {

using cplx = std::complex<double>;

/// Allocator backed by fftw_malloc so every buffer meets FFTW's SIMD alignment.
template <typename T>
struct FftwAllocator {
  using value_type = T;

  FftwAllocator() = default;
  template <typename U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    if (n > std::numeric_limits<std::size_t>::max() / sizeof(T)) throw std::bad_array_new_length();
    void* p = fftw_malloc(n * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }

  template <typename U>
  bool operator==(const FftwAllocator<U>&) const noexcept {
    return true;
  }
};

template <typename T>
using aligned_vector = std::vector<T, FftwAllocator<T>>;

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Thread count comes from DSREG_THREADS; read once, before the first plan.
inline int fft_threads() {
  static const int n = [] {
    int threads = 1;
    if (const char* env = std::getenv("DSREG_THREADS")) {
      int v = std::atoi(env);
      if (v > 0) threads = v;
    }
    if (threads > 1) {
      fftw_init_threads();
    }
    return threads;
  }();
  return n;
}

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
inline fftw_complex* as_fftw(const cplx* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p));
}

}  // namespace detail

/// Unnormalized 2D transforms for one grid shape. Plans are created with
/// FFTW_ESTIMATE, so the plan (and therefore every rounding) is the same on
/// every run for a fixed shape and thread count.
class Fft2D {
 public:
  Fft2D(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny) {
    const int threads = detail::fft_threads();
    std::lock_guard lock(detail::planner_mutex());
    if (threads > 1) fftw_plan_with_nthreads(threads);
    aligned_vector<cplx> a(nx * ny), b(nx * ny), h(nx * (ny / 2 + 1));
    aligned_vector<double> r(nx * ny);
    const int inx = static_cast<int>(nx), iny = static_cast<int>(ny);
    forward_ = fftw_plan_dft_2d(inx, iny, detail::as_fftw(a.data()), detail::as_fftw(b.data()),
                                FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(inx, iny, detail::as_fftw(a.data()), detail::as_fftw(b.data()),
                                 FFTW_BACKWARD, FFTW_ESTIMATE);
    r2c_ = fftw_plan_dft_r2c_2d(inx, iny, r.data(), detail::as_fftw(h.data()), FFTW_ESTIMATE);
    c2r_ = fftw_plan_dft_c2r_2d(inx, iny, detail::as_fftw(h.data()), r.data(), FFTW_ESTIMATE);
    forward_inplace_ = fftw_plan_dft_2d(inx, iny, detail::as_fftw(a.data()),
                                        detail::as_fftw(a.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    backward_inplace_ = fftw_plan_dft_2d(inx, iny, detail::as_fftw(a.data()),
                                         detail::as_fftw(a.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;
  ~Fft2D() {
    std::lock_guard lock(detail::planner_mutex());
    for (fftw_plan p : {forward_, backward_, r2c_, c2r_, forward_inplace_, backward_inplace_}) {
      if (p != nullptr) fftw_destroy_plan(p);
    }
  }

  // All buffers must come from aligned_vector (or fftw_malloc).
  void forward(const cplx* in, cplx* out) const {
    if (in == out) {
      fftw_execute_dft(forward_inplace_, detail::as_fftw(in), detail::as_fftw(out));
    } else {
      fftw_execute_dft(forward_, detail::as_fftw(in), detail::as_fftw(out));
    }
  }
  void backward(const cplx* in, cplx* out) const {
    if (in == out) {
      fftw_execute_dft(backward_inplace_, detail::as_fftw(in), detail::as_fftw(out));
    } else {
      fftw_execute_dft(backward_, detail::as_fftw(in), detail::as_fftw(out));
    }
  }
  void forward_real(const double* in, cplx* out) const {
    fftw_execute_dft_r2c(r2c_, const_cast<double*>(in), detail::as_fftw(out));
  }
  /// Destroys `in`.
  void backward_real(cplx* in, double* out) const {
    fftw_execute_dft_c2r(c2r_, detail::as_fftw(in), out);
  }

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }

 private:
  std::size_t nx_, ny_;
  fftw_plan forward_{}, backward_{}, r2c_{}, c2r_{}, forward_inplace_{}, backward_inplace_{};
};

/// Shared transform for a grid shape; plans live for the lifetime of the process.
inline const Fft2D& fft_for(std::size_t nx, std::size_t ny) {
  static std::mutex m;
  static std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<Fft2D>> cache;
  std::lock_guard lock(m);
  auto& slot = cache[{nx, ny}];
  if (!slot) slot = std::make_unique<Fft2D>(nx, ny);
  return *slot;
}

inline const Fft2D& fft_for(const Grid2D& g) { return fft_for(g.nx(), g.ny()); }

}  // namespace dsreg
