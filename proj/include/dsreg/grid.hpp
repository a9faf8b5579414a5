#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "dsreg/error.hpp"

namespace dsreg {

/// Periodic box [-lx/2, lx/2) x [-ly/2, ly/2) sampled on nx x ny points.
///
/// Layout: sample (i, j) is stored at i * ny + j (x is the slow axis, y the
/// fast one) and sits at x_i = -lx/2 + i*dx, y_j = -ly/2 + j*dy, so the origin
/// is the grid point (nx/2, ny/2) and x -> -x maps i to (nx - i) mod nx.
///
/// Wavenumbers follow FFT order: kx[m] = 2 pi m / lx for m < nx/2 and
/// 2 pi (m - nx) / lx otherwise. The Nyquist mode (-nx/2) appears once.
class Grid2D {
 public:
  Grid2D(std::size_t nx, std::size_t ny, double lx, double ly)
      : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
    if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0) {
      throw ParameterError("grid sizes must be even and >= 8 (got " + std::to_string(nx) +
                           "x" + std::to_string(ny) + ")");
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
      throw ParameterError("box lengths must be positive and finite");
    }
    kx_ = wavenumbers(nx, lx);
    ky_ = wavenumbers(ny, ly);
  }

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return nx_ * ny_; }
  /// Length of the y axis of an r2c half spectrum.
  std::size_t ny_half() const noexcept { return ny_ / 2 + 1; }
  std::size_t half_size() const noexcept { return nx_ * ny_half(); }

  double lx() const noexcept { return lx_; }
  double ly() const noexcept { return ly_; }
  double dx() const noexcept { return lx_ / static_cast<double>(nx_); }
  double dy() const noexcept { return ly_ / static_cast<double>(ny_); }
  double cell_area() const noexcept { return dx() * dy(); }
  double area() const noexcept { return lx_ * ly_; }

  double x(std::size_t i) const noexcept { return -0.5 * lx_ + static_cast<double>(i) * dx(); }
  double y(std::size_t j) const noexcept { return -0.5 * ly_ + static_cast<double>(j) * dy(); }

  std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * ny_ + j; }

  const std::vector<double>& kx() const noexcept { return kx_; }
  const std::vector<double>& ky() const noexcept { return ky_; }

  /// Signed mode number of FFT index m on an axis with n points.
  static long mode(std::size_t m, std::size_t n) noexcept {
    return m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
  }
  long mode_x(std::size_t i) const noexcept { return mode(i, nx_); }
  long mode_y(std::size_t j) const noexcept { return mode(j, ny_); }
  bool nyquist_x(std::size_t i) const noexcept { return i == nx_ / 2; }
  bool nyquist_y(std::size_t j) const noexcept { return j == ny_ / 2; }

  bool operator==(const Grid2D& o) const noexcept {
    return nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_;
  }

 private:
  static std::vector<double> wavenumbers(std::size_t n, double l) {
    std::vector<double> k(n);
    for (std::size_t m = 0; m < n; ++m) {
      k[m] = 2.0 * std::numbers::pi * static_cast<double>(mode(m, n)) / l;
    }
    return k;
  }

  std::size_t nx_, ny_;
  double lx_, ly_;
  std::vector<double> kx_, ky_;
};

using GridPtr = std::shared_ptr<const Grid2D>;

inline GridPtr make_grid(std::size_t nx, std::size_t ny, double lx, double ly) {
  return std::make_shared<const Grid2D>(nx, ny, lx, ly);
}

inline GridPtr make_grid(std::size_t n, double l) { return make_grid(n, n, l, l); }

}  // namespace dsreg
