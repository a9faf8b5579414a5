#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <utility>

#include "dsreg/fft.hpp"
#include "dsreg/grid.hpp"

namespace dsreg {

enum class Space { physical, spectral };

inline const char* to_string(Space s) { return s == Space::physical ? "physical" : "spectral"; }

/// Gridded samples on a Grid2D. Value semantics: copies share the (immutable)
/// grid and own their samples.
///
/// A spectral ComplexField holds c_m = DFT(f)_m / (nx*ny), so that
/// f(x_i, y_j) = sum_m c_m exp(2 pi i (m_x i / nx + m_y j / ny)); the phase is
/// taken relative to the box corner (-lx/2, -ly/2). RealFields are always
/// physical.
template <typename T>
class Field {
 public:
  using value_type = T;

  Field() = default;
  explicit Field(GridPtr grid, Space space = Space::physical)
      : grid_(std::move(grid)), values_(grid_->size(), T{}), space_(space) {}
  Field(GridPtr grid, aligned_vector<T> values, Space space = Space::physical)
      : grid_(std::move(grid)), values_(std::move(values)), space_(space) {
    if (values_.size() != grid_->size()) {
      throw ContractError("field value count " + std::to_string(values_.size()) +
                          " does not match grid size " + std::to_string(grid_->size()));
    }
  }

  /// Samples f(x_i, y_j) on the grid.
  template <typename F>
  static Field sample(GridPtr grid, F&& f) {
    Field out(grid);
    const Grid2D& g = *grid;
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double x = g.x(i);
      for (std::size_t j = 0; j < g.ny(); ++j) {
        out.values_[g.index(i, j)] = static_cast<T>(f(x, g.y(j)));
      }
    }
    return out;
  }

  const Grid2D& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  Space space() const noexcept { return space_; }
  void set_space(Space s) noexcept { space_ = s; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }
  T* data() noexcept { return values_.data(); }
  const T* data() const noexcept { return values_.data(); }
  aligned_vector<T>& storage() noexcept { return values_; }
  const aligned_vector<T>& storage() const noexcept { return values_; }

  T& operator()(std::size_t i, std::size_t j) { return values_[grid_->index(i, j)]; }
  const T& operator()(std::size_t i, std::size_t j) const { return values_[grid_->index(i, j)]; }
  T& operator[](std::size_t k) { return values_[k]; }
  const T& operator[](std::size_t k) const { return values_[k]; }

  Field& operator+=(const Field& o) {
    check_compatible(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_compatible(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
  }
  template <typename S>
  Field& operator*=(S s) {
    for (auto& v : values_) v *= s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  template <typename S>
  friend Field operator*(S s, Field a) {
    return a *= s;
  }

  void check_compatible(const Field& o) const {
    if (!(*grid_ == *o.grid_)) throw ContractError("fields live on different grids");
    if (space_ != o.space_) throw ContractError("fields live in different spaces");
  }

 private:
  GridPtr grid_;
  aligned_vector<T> values_;
  Space space_ = Space::physical;
};

using ComplexField = Field<cplx>;
using RealField = Field<double>;

inline void require_space(Space actual, Space expected, const char* op) {
  if (actual != expected) {
    throw ContractError(std::string(op) + ": expected a " + to_string(expected) +
                        "-space field, got " + to_string(actual));
  }
}

inline void require_same_grid(const Grid2D& a, const Grid2D& b, const char* op) {
  if (!(a == b)) throw ContractError(std::string(op) + ": grid mismatch");
}

inline RealField real_part(const ComplexField& f) {
  RealField out(f.grid_ptr());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k].real();
  return out;
}

inline RealField abs_squared(const ComplexField& f) {
  RealField out(f.grid_ptr());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = std::norm(f[k]);
  return out;
}

inline ComplexField to_complex(const RealField& f) {
  ComplexField out(f.grid_ptr());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k];
  return out;
}

/// Largest |imag| / max |value|; used before coercing a complex result to real.
inline double imaginary_fraction(const ComplexField& f) {
  double im = 0.0, mx = 0.0;
  for (const auto& v : f.values()) {
    im = std::max(im, std::abs(v.imag()));
    mx = std::max(mx, std::abs(v));
  }
  return mx > 0.0 ? im / mx : 0.0;
}

template <typename T>
double max_abs(const Field<T>& f) {
  double m = 0.0;
  for (const auto& v : f.values()) m = std::max(m, static_cast<double>(std::abs(v)));
  return m;
}

template <typename T>
bool all_finite(const Field<T>& f) {
  for (const auto& v : f.values()) {
    if constexpr (std::is_same_v<T, double>) {
      if (!std::isfinite(v)) return false;
    } else {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  }
  return true;
}

/// Applies x -> -x and/or y -> -y on the grid.
template <typename T>
Field<T> reflect(const Field<T>& f, bool flip_x, bool flip_y) {
  require_space(f.space(), Space::physical, "reflect");
  const Grid2D& g = f.grid();
  Field<T> out(f.grid_ptr());
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const std::size_t ri = flip_x ? (g.nx() - i) % g.nx() : i;
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const std::size_t rj = flip_y ? (g.ny() - j) % g.ny() : j;
      out(ri, rj) = f(i, j);
    }
  }
  return out;
}

}  // namespace dsreg
