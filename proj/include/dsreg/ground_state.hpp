#pragma once

#include <cmath>
#include <string>

#include "dsreg/model.hpp"

namespace dsreg {

struct PetviashviliConfig {
  double gamma = 1.5;
  double tol = 1e-10;
  int max_iter = 2000;
  int continuation_steps = 8;

  void validate() const {
    if (!(gamma > 1.0 && gamma < 2.0)) throw ParameterError("petviashvili gamma must lie in (1, 2)");
    if (!(tol > 0.0)) throw ParameterError("petviashvili tol must be positive");
    if (max_iter < 1) throw ParameterError("petviashvili max_iter must be >= 1");
    if (continuation_steps < 1) throw ParameterError("continuation_steps must be >= 1");
  }
};

/// Converged solution of  Lap S - S + beta S^3 - rho S X = 0,  X = E(S^2).
struct GroundState {
  RealField S;
  RealField X;
  double lambda = 1.0;
  double residual = 0.0;
  double mass = 0.0;           // ||S||^2
  double grad_S2_sq = 0.0;     // int |grad S^2|^2
  double second_moment = 0.0;  // int |xi|^2 S^2
  double grad_norm = 0.0;      // ||grad S||
  double beta = 1.0;
  double rho = 0.0;
  double nu = 1.0;
  int iterations = 0;

  const Grid2D& grid() const { return S.grid(); }
};

inline RealField mean_flow(const RealField& S, double nu) {
  RealField s2 = S;
  for (auto& v : s2.values()) v *= v;
  return e_multiplier(s2, nu, EComponent::xx);
}

/// Average over the reflections x -> -x and y -> -y.
inline RealField symmetrize_even(const RealField& f) {
  const RealField fx = reflect(f, true, false);
  const RealField fy = reflect(f, false, true);
  const RealField fxy = reflect(f, true, true);
  RealField out(f.grid_ptr());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = 0.25 * ((f[k] + fxy[k]) + (fx[k] + fy[k]));
  return out;
}

/// Defect of the first equation, Lap S - S + beta S^3 - rho S X, as a field.
inline RealField ground_defect(const RealField& S, const RealField& X, double beta, double rho) {
  require_same_grid(S.grid(), X.grid(), "ground_defect");
  RealField r = laplacian(S);
  for (std::size_t k = 0; k < S.size(); ++k) {
    const double s = S[k];
    r[k] += -s + beta * s * s * s - rho * s * X[k];
  }
  return r;
}

/// ||Lap S - S + beta S^3 - rho S X|| + ||Lap_nu X - (S^2)_{x x}||.
inline double residual_norm(const RealField& S, const RealField& X, double beta, double rho, double nu) {
  require_same_grid(S.grid(), X.grid(), "residual_norm");
  require_positive(nu, "nu");
  const double r1 = l2_norm(ground_defect(S, X, beta, rho));
  RealField s2 = S;
  for (auto& v : s2.values()) v *= v;
  const Grid2D& g = S.grid();
  const Fft2D& fft = fft_for(g);
  aligned_vector<cplx> xh(g.half_size()), sh(g.half_size());
  fft.forward_real(X.data(), xh.data());
  fft.forward_real(s2.data(), sh.data());
  const std::size_t nh = g.ny_half();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double kx2 = g.kx()[i] * g.kx()[i];
    for (std::size_t j = 0; j < nh; ++j) {
      const double ky2 = g.ky()[j] * g.ky()[j];
      const cplx d = -(kx2 + nu * ky2) * xh[i * nh + j] + kx2 * sh[i * nh + j];
      // Interior columns stand for two conjugate modes.
      const double w = (j == 0 || j == g.ny() / 2) ? 1.0 : 2.0;
      acc += w * std::norm(d);
    }
  }
  const double n = static_cast<double>(g.size());
  const double r2 = std::sqrt(acc * g.area()) / n;
  return r1 + r2;
}

/// Fills X and the scalar metadata of a ground state from S.
inline GroundState make_ground_state(RealField S, double beta, double rho, double nu) {
  GroundState gs;
  gs.beta = beta;
  gs.rho = rho;
  gs.nu = nu;
  gs.X = mean_flow(S, nu);
  gs.residual = residual_norm(S, gs.X, beta, rho, nu);
  gs.mass = l2_norm(S) * l2_norm(S);
  gs.grad_norm = std::sqrt(gradient_norm_squared(S));
  RealField s2 = S;
  for (auto& v : s2.values()) v *= v;
  gs.grad_S2_sq = gradient_norm_squared(s2);
  const Grid2D& g = S.grid();
  double m2 = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    for (std::size_t j = 0; j < g.ny(); ++j) {
      m2 += (g.x(i) * g.x(i) + g.y(j) * g.y(j)) * s2(i, j);
    }
  }
  gs.second_moment = m2 * g.cell_area();
  gs.S = std::move(S);
  return gs;
}

namespace detail {

struct PetviashviliResult {
  RealField S;
  double residual;
  int iterations;
};

inline PetviashviliResult petviashvili(RealField S, double beta, double rho, double nu,
                                       const PetviashviliConfig& cfg) {
  const Grid2D& g = S.grid();
  const auto one_minus_lap = [](const Mode& m) { return 1.0 + m.kx * m.kx + m.ky * m.ky; };
  const auto inv_one_minus_lap = [](const Mode& m) { return 1.0 / (1.0 + m.kx * m.kx + m.ky * m.ky); };
  double res = 0.0;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const RealField X = mean_flow(S, nu);
    res = l2_norm(ground_defect(S, X, beta, rho));
    if (!std::isfinite(res)) throw ConvergenceError("petviashvili iterate is not finite", res, it);
    if (res < cfg.tol) return {std::move(S), res, it};

    RealField N(S.grid_ptr());
    for (std::size_t k = 0; k < S.size(); ++k) {
      const double s = S[k];
      N[k] = beta * s * s * s - rho * s * X[k];
    }
    const double num = inner(S, apply_symbol(S, one_minus_lap));
    const double den = inner(S, N);
    if (!(den > 0.0) || l2_norm(S) < 1e-12 * std::sqrt(g.area())) {
      throw DegenerateError("petviashvili iterate collapsed to zero (stabilizing ratio " +
                            std::to_string(num) + "/" + std::to_string(den) + ")");
    }
    const double factor = std::pow(num / den, cfg.gamma);
    RealField next = apply_symbol(N, inv_one_minus_lap);
    next *= factor;
    S = symmetrize_even(next);
  }
  throw ConvergenceError("petviashvili did not converge in " + std::to_string(cfg.max_iter) +
                             " iterations (residual " + std::to_string(res) + ")",
                         res, cfg.max_iter);
}

}  // namespace detail

/// Petviashvili iteration for the ground state, continued in rho from the
/// rho = 0 (Townes) profile when rho != 0.
inline GroundState solve_ground_state(double beta, double rho, double nu, const GridPtr& grid,
                                      const PetviashviliConfig& cfg = {}) {
  cfg.validate();
  require_positive(nu, "nu");
  if (!std::isfinite(beta) || !std::isfinite(rho)) throw ParameterError("beta, rho must be finite");
  if (!(beta > 0.0)) warn("ground-state iteration with beta <= 0 is not expected to converge");

  RealField S = RealField::sample(grid, [](double x, double y) {
    return 2.2 / std::cosh(std::sqrt(x * x + y * y));
  });
  const int steps = rho == 0.0 ? 1 : cfg.continuation_steps;
  int total = 0;
  for (int s = 1; s <= steps; ++s) {
    const double r = rho == 0.0 ? 0.0 : rho * static_cast<double>(s) / steps;
    PetviashviliConfig stage = cfg;
    if (s < steps) stage.tol = std::max(cfg.tol, 1e-8);
    auto res = detail::petviashvili(std::move(S), beta, r, nu, stage);
    S = std::move(res.S);
    total += res.iterations;
  }
  GroundState gs = make_ground_state(std::move(S), beta, rho, nu);
  gs.iterations = total;
  if (!(gs.S(grid->nx() / 2, grid->ny() / 2) > 0.0)) {
    throw DegenerateError("ground state is not positive at the origin");
  }
  return gs;
}

}  // namespace dsreg
