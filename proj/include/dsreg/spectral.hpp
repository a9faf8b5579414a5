#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <numeric>

#include "dsreg/field.hpp"

namespace dsreg {

/// One Fourier mode as seen by a multiplier. `nyquist` is set when either
/// wavenumber is the (unpaired) Nyquist mode; odd symbols return 0 there.
struct Mode {
  double kx;
  double ky;
  bool nyquist;
};

template <typename S>
concept Symbol = requires(const S& s, Mode m) {
  { s(m) };
};

// ---------------------------------------------------------------- transforms

inline ComplexField to_spectral(const ComplexField& f) {
  require_space(f.space(), Space::physical, "to_spectral");
  const Grid2D& g = f.grid();
  ComplexField out(f.grid_ptr(), Space::spectral);
  fft_for(g).forward(f.data(), out.data());
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : out.values()) c *= scale;
  return out;
}

inline ComplexField to_spectral(const RealField& f) { return to_spectral(to_complex(f)); }

inline ComplexField from_spectral(const ComplexField& f) {
  require_space(f.space(), Space::spectral, "from_spectral");
  ComplexField out(f.grid_ptr(), Space::physical);
  fft_for(f.grid()).backward(f.data(), out.data());
  return out;
}

/// Drops the imaginary part after checking it is round-off (< tol relative).
inline RealField to_real(const ComplexField& f, double tol = 1e-12) {
  require_space(f.space(), Space::physical, "to_real");
  const double frac = imaginary_fraction(f);
  if (frac > tol) {
    throw ContractError("to_real: imaginary content " + std::to_string(frac) +
                        " exceeds tolerance");
  }
  return real_part(f);
}

// ---------------------------------------------------------------- quadrature

/// Discrete L2 norm. Physical: sqrt(dA sum |f|^2); spectral: sqrt(A sum |c|^2).
/// The two agree by Parseval.
inline double l2_norm(const ComplexField& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::norm(v);
  const Grid2D& g = f.grid();
  return std::sqrt(s * (f.space() == Space::physical ? g.cell_area() : g.area()));
}

inline double l2_norm(const RealField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s * f.grid().cell_area());
}

inline double integral(const RealField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().cell_area();
}

inline double inner(const RealField& a, const RealField& b) {
  require_same_grid(a.grid(), b.grid(), "inner");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s * a.grid().cell_area();
}

/// Integral of conj(a) * b.
inline cplx inner(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a.grid(), b.grid(), "inner");
  require_space(a.space(), Space::physical, "inner");
  require_space(b.space(), Space::physical, "inner");
  cplx s{};
  for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
  return s * a.grid().cell_area();
}

// ---------------------------------------------------------------- multipliers

template <Symbol S>
void multiply_full_spectrum(const Grid2D& g, cplx* c, const S& sym) {
  const auto& kx = g.kx();
  const auto& ky = g.ky();
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const bool nx_q = g.nyquist_x(i);
    cplx* row = c + i * g.ny();
    for (std::size_t j = 0; j < g.ny(); ++j) {
      row[j] *= sym(Mode{kx[i], ky[j], nx_q || g.nyquist_y(j)});
    }
  }
}

template <Symbol S>
void multiply_half_spectrum(const Grid2D& g, cplx* c, const S& sym) {
  const auto& kx = g.kx();
  const auto& ky = g.ky();
  const std::size_t nh = g.ny_half();
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const bool nx_q = g.nyquist_x(i);
    cplx* row = c + i * nh;
    for (std::size_t j = 0; j < nh; ++j) {
      row[j] *= sym(Mode{kx[i], ky[j], nx_q || g.nyquist_y(j)});
    }
  }
}

/// Applies a diagonal Fourier multiplier; the result is in the input's space.
template <Symbol S>
ComplexField apply_symbol(const ComplexField& f, const S& sym) {
  const Grid2D& g = f.grid();
  if (f.space() == Space::spectral) {
    ComplexField out = f;
    multiply_full_spectrum(g, out.data(), sym);
    return out;
  }
  ComplexField out(f.grid_ptr(), Space::physical);
  const Fft2D& fft = fft_for(g);
  fft.forward(f.data(), out.data());
  multiply_full_spectrum(g, out.data(), sym);
  fft.backward(out.data(), out.data());
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& v : out.values()) v *= scale;
  return out;
}

/// Real-to-real multiplier; the symbol must be Hermitian (s(-k) = conj s(k)).
template <Symbol S>
RealField apply_symbol(const RealField& f, const S& sym) {
  const Grid2D& g = f.grid();
  aligned_vector<cplx> half(g.half_size());
  const Fft2D& fft = fft_for(g);
  fft.forward_real(f.data(), half.data());
  multiply_half_spectrum(g, half.data(), sym);
  RealField out(f.grid_ptr());
  fft.backward_real(half.data(), out.data());
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& v : out.values()) v *= scale;
  return out;
}

/// Symbol of B = (1 - alpha^2 Delta)^{-1}.
inline double helmholtz_symbol(double kx, double ky, double alpha) {
  return 1.0 / (1.0 + alpha * alpha * (kx * kx + ky * ky));
}

enum class EComponent { xx, xy };

/// Symbols of E: xi1^2 / (xi1^2 + nu xi2^2) (xx) and xi1 xi2 / (...) (xy).
/// Both are defined as 0 at xi = 0, which makes the outputs mean-free.
inline double e_symbol(const Mode& m, double nu, EComponent c) {
  const double den = m.kx * m.kx + nu * m.ky * m.ky;
  if (den == 0.0) return 0.0;
  if (c == EComponent::xx) return m.kx * m.kx / den;
  return m.nyquist ? 0.0 : m.kx * m.ky / den;
}

inline void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(name) + " must be positive and finite");
  }
}

template <typename T>
Field<T> helmholtz_inverse(const Field<T>& f, double alpha) {
  require_positive(alpha, "alpha");
  return apply_symbol(f, [alpha](const Mode& m) { return helmholtz_symbol(m.kx, m.ky, alpha); });
}

template <typename T>
Field<T> e_multiplier(const Field<T>& f, double nu, EComponent c = EComponent::xx) {
  require_positive(nu, "nu");
  return apply_symbol(f, [nu, c](const Mode& m) { return e_symbol(m, nu, c); });
}

template <typename T>
Field<T> laplacian(const Field<T>& f) {
  return apply_symbol(f, [](const Mode& m) { return -(m.kx * m.kx + m.ky * m.ky); });
}

/// Spectral d/dx (axis 0) or d/dy (axis 1); the Nyquist mode is dropped.
template <typename T>
Field<T> derivative(const Field<T>& f, int axis) {
  return apply_symbol(f, [axis](const Mode& m) {
    return m.nyquist ? cplx{} : cplx{0.0, axis == 0 ? m.kx : m.ky};
  });
}

// ---------------------------------------------------------------- dealiasing

/// 2/3 rule: keep a mode iff |mode| <= n/3 on both axes.
inline bool dealias_keep(long mode, std::size_t n) {
  return 3 * static_cast<std::size_t>(mode < 0 ? -mode : mode) <= n;
}

/// Per-axis 0/1 masks for the 2/3 rule in FFT order.
inline std::vector<double> dealias_axis_mask(std::size_t n) {
  std::vector<double> m(n);
  for (std::size_t k = 0; k < n; ++k) m[k] = dealias_keep(Grid2D::mode(k, n), n) ? 1.0 : 0.0;
  return m;
}

inline ComplexField dealias(const ComplexField& f) {
  require_space(f.space(), Space::spectral, "dealias");
  const Grid2D& g = f.grid();
  const auto mx = dealias_axis_mask(g.nx());
  const auto my = dealias_axis_mask(g.ny());
  ComplexField out = f;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    for (std::size_t j = 0; j < g.ny(); ++j) out(i, j) *= mx[i] * my[j];
  }
  return out;
}

/// |grad f|_2^2 = A sum |k|^2 |c_k|^2, consistent with the spectral Laplacian.
inline double gradient_norm_squared(const ComplexField& f) {
  const ComplexField c = f.space() == Space::spectral ? f : to_spectral(f);
  const Grid2D& g = c.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double kx2 = g.kx()[i] * g.kx()[i];
    for (std::size_t j = 0; j < g.ny(); ++j) {
      s += (kx2 + g.ky()[j] * g.ky()[j]) * std::norm(c(i, j));
    }
  }
  return s * g.area();
}

inline double gradient_norm_squared(const RealField& f) {
  return gradient_norm_squared(to_complex(f));
}

// ---------------------------------------------------------------- interpolation

/// Evaluates the trigonometric interpolant of a physical field on the tensor
/// product of target abscissae xs and ordinates ys. Returns values row-major
/// (xs slow). Cost is O(|xs| nx ny + |xs| ny |ys|).
inline std::vector<cplx> interpolate(const ComplexField& f, std::span<const double> xs,
                                     std::span<const double> ys) {
  const ComplexField c = f.space() == Space::spectral ? f : to_spectral(f);
  const Grid2D& g = c.grid();
  const std::size_t nx = g.nx(), ny = g.ny();
  // Nyquist modes are split evenly between +/- k so real data stays real.
  auto basis = [](const std::vector<double>& k, std::size_t n, double origin,
                  std::span<const double> pts) {
    std::vector<cplx> b(pts.size() * n);
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const double s = pts[p] - origin;
      for (std::size_t m = 0; m < n; ++m) {
        if (m == n / 2) {
          b[p * n + m] = std::cos(k[m] * s);
        } else {
          b[p * n + m] = std::polar(1.0, k[m] * s);
        }
      }
    }
    return b;
  };
  const auto bx = basis(g.kx(), nx, -0.5 * g.lx(), xs);
  const auto by = basis(g.ky(), ny, -0.5 * g.ly(), ys);
  // tmp[p, j] = sum_i bx[p, i] c[i, j]
  std::vector<cplx> tmp(xs.size() * ny, cplx{});
  for (std::size_t p = 0; p < xs.size(); ++p) {
    cplx* trow = tmp.data() + p * ny;
    for (std::size_t i = 0; i < nx; ++i) {
      const cplx w = bx[p * nx + i];
      const cplx* crow = c.data() + i * ny;
      for (std::size_t j = 0; j < ny; ++j) trow[j] += w * crow[j];
    }
  }
  std::vector<cplx> out(xs.size() * ys.size());
  for (std::size_t p = 0; p < xs.size(); ++p) {
    const cplx* trow = tmp.data() + p * ny;
    for (std::size_t q = 0; q < ys.size(); ++q) {
      const cplx* brow = by.data() + q * ny;
      cplx s{};
      for (std::size_t j = 0; j < ny; ++j) s += trow[j] * brow[j];
      out[p * ys.size() + q] = s;
    }
  }
  return out;
}

}  // namespace dsreg
