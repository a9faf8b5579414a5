#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "dsreg/ground_state.hpp"
#include "dsreg/krylov.hpp"
#include "dsreg/stepper.hpp"

namespace dsreg {

struct ModulationConstants {
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double C4 = 0.0;
  double S_mass = 0.0;
};

/// One sample of the reduced scale dynamics. a = -L L_t, b = -L^3 L_tt,
/// eps = alpha^2 / L^2, tau = int_0^t L^-2.
struct ReducedState {
  double L = 1.0;
  double L_t = 0.0;
  double t = 0.0;
  double a = 0.0;
  double b = 0.0;
  double eps = 0.0;
  double tau = 0.0;
  double p = 1.0;
};

inline ReducedState make_reduced_state(double L, double L_t, double b, double alpha) {
  if (!(L > 0.0) || !std::isfinite(L)) throw ParameterError("L must be positive and finite");
  ReducedState s;
  s.L = L;
  s.L_t = L_t;
  s.a = -L_t * L;
  s.b = b;
  s.eps = alpha * alpha / (L * L);
  return s;
}

/// Closed-form modulation constants. C1 = |xi|^2-moment / 16 and C2 is the
/// model's multiple of int |grad S^2|^2.
inline ModulationConstants compute_constants(const GroundState& ground, const ModelSpec& spec,
                                             const ReducedState& reduced0) {
  spec.validate();
  if (!spec.regularized()) {
    throw ParameterError("modulation constants are defined for the regularized models only");
  }
  const double g = ground.grad_S2_sq;
  const double beta = spec.beta, rho = spec.rho, nu = spec.nu;
  ModulationConstants c;
  c.S_mass = ground.mass;
  c.C1 = ground.second_moment / 16.0;
  switch (spec.kind) {
    case ModelKind::rds1: c.C2 = 0.25 * beta * g; break;
    case ModelKind::rds2: c.C2 = -rho / (2.0 * (1.0 + nu)) * g; break;
    case ModelKind::rds3: c.C2 = 0.25 * (beta - 2.0 * rho / (1.0 + nu)) * g; break;
    case ModelKind::dse: break;
  }
  if (!(c.C1 > 0.0)) throw RegimeError("C1 = " + std::to_string(c.C1) + " is not positive");
  if (!(c.C2 > 0.0)) {
    throw RegimeError("C2 = " + std::to_string(c.C2) + " is not positive for " +
                      to_string(spec.kind) + " with beta=" + std::to_string(beta) +
                      ", rho=" + std::to_string(rho));
  }
  c.C3 = c.C1 * reduced0.b + c.C2 * reduced0.eps;
  const double L0 = reduced0.L, a2 = spec.alpha * spec.alpha;
  c.C4 = reduced0.L_t * reduced0.L_t + c.C2 * a2 / (2.0 * c.C1) / std::pow(L0, 4) -
         c.C3 / c.C1 / (L0 * L0);
  return c;
}

// ------------------------------------------------------------ linearized solves

enum class LinearizedMode { GY, HZ };

inline const char* to_string(LinearizedMode m) { return m == LinearizedMode::GY ? "GY" : "HZ"; }

struct LinearizedSolution {
  RealField first;
  RealField second;
  LinearizedMode mode = LinearizedMode::GY;
  double residual = 0.0;
  double inner_with_S = 0.0;
  int iterations = 0;
};

struct LinearizedOptions {
  double krylov_rtol = 1e-12;
  int max_iter = 3000;
  double tol = 1e-8;
  double kernel_tol = 1e-8;
};

/// Lap G - G + 3 beta S^2 G - rho X G - 2 rho S E(S G), projected onto
/// fields even in both axes.
inline RealField linearized_operator(const GroundState& gs, const RealField& G) {
  RealField sg = G;
  for (std::size_t k = 0; k < sg.size(); ++k) sg[k] *= gs.S[k];
  const RealField esg = e_multiplier(sg, gs.nu, EComponent::xx);
  RealField out = laplacian(G);
  for (std::size_t k = 0; k < G.size(); ++k) {
    const double s = gs.S[k];
    out[k] += (-1.0 + 3.0 * gs.beta * s * s - gs.rho * gs.X[k]) * G[k] - 2.0 * gs.rho * s * esg[k];
  }
  return symmetrize_even(out);
}

inline RealField linearized_rhs(const GroundState& gs, LinearizedMode mode) {
  const Grid2D& g = gs.grid();
  RealField rhs(gs.S.grid_ptr());
  if (mode == LinearizedMode::GY) {
    for (std::size_t i = 0; i < g.nx(); ++i) {
      for (std::size_t j = 0; j < g.ny(); ++j) {
        const double r2 = g.x(i) * g.x(i) + g.y(j) * g.y(j);
        rhs(i, j) = -0.25 * r2 * gs.S(i, j);
      }
    }
    return rhs;
  }
  RealField s2 = gs.S;
  for (auto& v : s2.values()) v *= v;
  const RealField lap_s2 = laplacian(s2);
  const RealField lap_x = laplacian(gs.X);
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    rhs[k] = -gs.beta * gs.S[k] * lap_s2[k] + 2.0 * gs.rho * gs.S[k] * lap_x[k];
  }
  return rhs;
}

inline LinearizedSolution solve_linearized_with_rhs(const GroundState& gs, LinearizedMode mode,
                                                     const RealField& rhs,
                                                     const LinearizedOptions& opt = {}) {
  require_same_grid(gs.grid(), rhs.grid(), "solve_linearized");
  LinearizedSolution sol;
  sol.mode = mode;
  sol.first = RealField(gs.S.grid_ptr());
  const RealField b = symmetrize_even(rhs);
  const double bnorm = l2_norm(b);

  if (bnorm > 0.0) {
    const auto A = [&gs](const RealField& in, RealField& out) { out = linearized_operator(gs, in); };
    const auto M = [](const RealField& in, RealField& out) {
      out = apply_symbol(in, [](const Mode& m) { return 1.0 / (1.0 + m.kx * m.kx + m.ky * m.ky); });
    };
    const auto dot = [](const RealField& u, const RealField& v) { return inner(u, v); };
    MinresResult mr;
    try {
      mr = minres(A, M, dot, b, sol.first, MinresOptions{opt.krylov_rtol, opt.max_iter});
    } catch (const ConvergenceError& e) {
      RealField r = linearized_operator(gs, sol.first);
      r -= b;
      throw ConvergenceError(std::string("linearized ") + to_string(mode) + " solve: " + e.what(),
                             l2_norm(r) / bnorm, e.iterations());
    }
    sol.iterations = mr.iterations;
    RealField r = linearized_operator(gs, sol.first);
    r -= b;
    sol.residual = l2_norm(r) / bnorm;
    if (!(sol.residual < opt.tol)) {
      throw ConvergenceError(std::string("linearized ") + to_string(mode) +
                                 " solve stalled at relative residual " + std::to_string(sol.residual),
                             sol.residual, sol.iterations);
    }
  }

  const double gnorm = l2_norm(sol.first);
  if (gnorm > 0.0) {
    for (int axis : {0, 1}) {
      const RealField ds = derivative(gs.S, axis);
      const double c = std::abs(inner(sol.first, ds)) / (gnorm * l2_norm(ds));
      if (c > opt.kernel_tol) {
        throw SymmetryViolation("linearized solution overlaps the translation mode along axis " +
                                std::to_string(axis) + " (" + std::to_string(c) + ")");
      }
    }
  }

  RealField sg = sol.first;
  for (std::size_t k = 0; k < sg.size(); ++k) sg[k] *= gs.S[k];
  sol.second = e_multiplier(sg, gs.nu, EComponent::xx);
  sol.second *= 2.0;
  if (mode == LinearizedMode::HZ) sol.second += laplacian(gs.X);
  sol.inner_with_S = inner(gs.S, sol.first);
  return sol;
}

/// Solves the (G, Y) or (H, Z) system on the even-even subspace.
inline LinearizedSolution solve_linearized(const GroundState& gs, const ModelSpec& spec,
                                           LinearizedMode mode, const LinearizedOptions& opt = {}) {
  spec.validate();
  if (spec.beta != gs.beta || spec.rho != gs.rho || spec.nu != gs.nu) {
    throw ParameterError("model parameters do not match the ground state");
  }
  return solve_linearized_with_rhs(gs, mode, linearized_rhs(gs, mode), opt);
}

// ------------------------------------------------------------ reduced dynamics

struct ReducedOptions {
  double rtol = 1e-14;
  double atol = 1e-16;
  double max_dtau = std::numeric_limits<double>::infinity();
  double collapse_ratio = 1e-6;
  long max_steps = 5'000'000;
};

struct ReducedTrajectory {
  std::vector<ReducedState> states;
  double L_min = 0.0;
  double t_at_min = 0.0;
  bool collapsed = false;
  double q_drift = 0.0;
};

/// Q = L_t^2 + (C2 alpha^2 / 2 C1) L^-4 - (C3 / C1) L^-2.
inline double first_integral(const ModulationConstants& c, double alpha, double L, double L_t) {
  const double s = 1.0 / (L * L);
  return L_t * L_t + c.C2 * alpha * alpha / (2.0 * c.C1) * s * s - c.C3 / c.C1 * s;
}

namespace detail {

using Ode3 = std::array<double, 3>;  // ln L, a, t

struct ReducedRhs {
  double k2, k3;  // C2 alpha^2 / C1, C3 / C1
  Ode3 operator()(const Ode3& y) const {
    const double s = std::exp(-2.0 * y[0]);
    return {-y[1], (k3 - k2 * s) - y[1] * y[1], 1.0 / s};
  }
};

/// One Dormand-Prince 5(4) step; returns the 5th-order increment and the
/// embedded error estimate.
inline std::pair<Ode3, Ode3> dopri_step(const ReducedRhs& f, const Ode3& y, double h) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  auto comb = [&y, h](std::initializer_list<std::pair<double, const Ode3*>> terms) {
    Ode3 out = y;
    for (const auto& [c, k] : terms) {
      for (int i = 0; i < 3; ++i) out[i] += h * c * (*k)[i];
    }
    return out;
  };
  const Ode3 k1 = f(y);
  const Ode3 k2 = f(comb({{a21, &k1}}));
  const Ode3 k3 = f(comb({{a31, &k1}, {a32, &k2}}));
  const Ode3 k4 = f(comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const Ode3 k5 = f(comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const Ode3 k6 = f(comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  Ode3 dy, y5;
  for (int i = 0; i < 3; ++i) {
    dy[i] = h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    y5[i] = y[i] + dy[i];
  }
  const Ode3 k7 = f(y5);
  Ode3 err;
  for (int i = 0; i < 3; ++i) {
    err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }
  return {dy, err};
}

inline Ode3 plus(const Ode3& y, const Ode3& dy) { return {y[0] + dy[0], y[1] + dy[1], y[2] + dy[2]}; }

/// y + dy with Kahan compensation carried in comp.
inline Ode3 plus_compensated(const Ode3& y, const Ode3& dy, Ode3& comp) {
  Ode3 out;
  for (int i = 0; i < 3; ++i) {
    const double d = dy[i] - comp[i];
    out[i] = y[i] + d;
    comp[i] = (out[i] - y[i]) - d;
  }
  return out;
}

}  // namespace detail

/// Integrates L_tt = (C2 alpha^2 / C1) L^-5 - (C3 / C1) L^-3 in the rescaled
/// time tau, as (ln L)' = -a, a' = b - a^2, t' = L^2. Stops at t_end or, when
/// L falls below collapse_ratio * L0, with collapsed = true.
inline ReducedTrajectory integrate_reduced(const ModulationConstants& c, double alpha, double L0,
                                           double Lt0, double t_end, const ReducedOptions& opt = {}) {
  if (!(L0 > 0.0) || !std::isfinite(L0)) throw ParameterError("L0 must be positive and finite");
  if (!std::isfinite(Lt0)) throw ParameterError("Lt0 must be finite");
  if (!(t_end >= 0.0)) throw ParameterError("t_end must be non-negative");
  if (!(alpha >= 0.0)) throw ParameterError("alpha must be non-negative");
  if (!(c.C1 > 0.0)) throw RegimeError("C1 must be positive");

  const detail::ReducedRhs f{c.C2 * alpha * alpha / c.C1, c.C3 / c.C1};
  const double q0 = first_integral(c, alpha, L0, Lt0);

  ReducedTrajectory traj;
  double tau = 0.0;
  auto push = [&](const detail::Ode3& y) {
    ReducedState s;
    s.L = std::exp(y[0]);
    s.a = y[1];
    s.t = y[2];
    s.L_t = -s.a / s.L;
    s.eps = alpha * alpha / (s.L * s.L);
    s.b = f.k3 - f.k2 / (s.L * s.L);
    s.tau = tau;
    const double q = first_integral(c, alpha, s.L, s.L_t);
    const double scale = s.L_t * s.L_t + std::abs(f.k2) / (2.0 * std::pow(s.L, 4)) +
                         std::abs(f.k3) / (s.L * s.L);
    if (scale > 0.0) traj.q_drift = std::max(traj.q_drift, std::abs(q - q0) / scale);
    if (traj.states.empty() || s.L < traj.L_min) {
      traj.L_min = s.L;
      traj.t_at_min = s.t;
    }
    traj.states.push_back(s);
  };

  detail::Ode3 y{std::log(L0), -Lt0 * L0, 0.0};
  push(y);
  const double ln_collapse = std::log(opt.collapse_ratio * L0);
  double h = std::min(1e-3, opt.max_dtau);
  const double t_tol = 1e-14 * std::max(1.0, t_end);

  auto error_norm = [&opt](const detail::Ode3& y0, const detail::Ode3& y1, const detail::Ode3& e) {
    double m = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      m = std::max(m, std::abs(e[i]) / sc);
    }
    return m;
  };

  detail::Ode3 comp{0.0, 0.0, 0.0};
  for (long step = 0; step < opt.max_steps; ++step) {
    if (t_end - y[2] <= t_tol) return traj;
    auto [dy, err] = detail::dopri_step(f, y, h);
    detail::Ode3 yn = detail::plus(y, dy);
    double en = error_norm(y, yn, err);
    if (!std::isfinite(en)) en = 1e10;
    if (en > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      if (!(h > 1e-300)) {
        throw ConvergenceError("reduced ODE step size underflow at t=" + std::to_string(y[2]), en,
                               static_cast<int>(std::min<long>(step, 2147483647L)));
      }
      continue;
    }
    double used = h;
    bool landed = false;
    if (yn[2] > t_end) {
      double hl = 0.0, hr = h, th = h;
      for (int it = 0; it < 200; ++it) {
        th = 0.5 * (hl + hr);
        const auto trial = detail::plus(y, detail::dopri_step(f, y, th).first);
        if (std::abs(trial[2] - t_end) <= t_tol) break;
        (trial[2] > t_end ? hr : hl) = th;
      }
      used = th;
      dy = detail::dopri_step(f, y, used).first;
      landed = true;
    }
    yn = detail::plus_compensated(y, dy, comp);
    if (landed) {
      yn[2] = t_end;
      comp[2] = 0.0;
    }
    if (y[1] > 0.0 && yn[1] <= 0.0) {
      double hl = 0.0, hr = used;
      detail::Ode3 turn = yn;
      for (int it = 0; it < 200 && hr - hl > 1e-15 * used; ++it) {
        const double hm = 0.5 * (hl + hr);
        turn = detail::plus(y, detail::dopri_step(f, y, hm).first);
        (turn[1] > 0.0 ? hl : hr) = hm;
      }
      const double tau_save = tau;
      tau = tau_save + 0.5 * (hl + hr);
      push(turn);
      tau = tau_save;
    }
    y = yn;
    tau += used;
    push(y);
    if (y[0] < ln_collapse) {
      traj.collapsed = true;
      return traj;
    }
    h = std::min(opt.max_dtau, used * std::min(5.0, 0.9 * std::pow(std::max(en, 1e-10), -0.2)));
  }
  throw ConvergenceError("reduced ODE exceeded " + std::to_string(opt.max_steps) + " steps", 0.0,
                         static_cast<int>(std::min<long>(opt.max_steps, 2147483647L)));
}

// ------------------------------------------------------------ collapse fit

struct CollapseTableRow {
  double t;
  double tau;
  double L;
  double b;
};

struct CollapseFit {
  double t_star = 0.0;
  double exponent = 0.0;
  double prefactor = 0.0;
  double rms = 0.0;
  std::size_t window_begin = 0;
  std::size_t window_size = 0;
  std::vector<CollapseTableRow> table;
};

struct CollapseFitOptions {
  std::size_t min_records = 50;
  double decades = 1.0;
};

namespace detail {

struct LineFit {
  double slope, intercept, sse;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double sse = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (icpt + slope * x[k]);
    sse += r * r;
  }
  return {slope, icpt, sse};
}

/// Second derivative at x[c] of the least-squares quadratic through the
/// points in [lo, hi).
inline double quadratic_second_derivative(const std::vector<double>& x, const std::vector<double>& y,
                                          std::size_t lo, std::size_t hi, std::size_t c) {
  double m[3][4] = {};
  for (std::size_t k = lo; k < hi; ++k) {
    const double d = x[k] - x[c];
    const double p[3] = {1.0, d, d * d};
    for (int r = 0; r < 3; ++r) {
      for (int q = 0; q < 3; ++q) m[r][q] += p[r] * p[q];
      m[r][3] += p[r] * y[k];
    }
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    }
    for (int q = 0; q < 4; ++q) std::swap(m[col][q], m[piv][q]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double fct = m[r][col] / m[col][col];
      for (int q = col; q < 4; ++q) m[r][q] -= fct * m[col][q];
    }
  }
  return 2.0 * m[2][3] / m[2][2];
}

}  // namespace detail

/// Fits L_est ~ P (t* - t)^gamma on the trailing monotone decreasing segment
/// of the records, restricted to the last `decades` decades of L.
inline CollapseFit collapse_fit(const std::vector<DiagnosticsRecord>& records,
                                const CollapseFitOptions& opt = {}) {
  std::size_t end = records.size();
  while (end > 0 && !(records[end - 1].L_est > 0.0 && std::isfinite(records[end - 1].L_est))) --end;
  if (end == 0) throw InsufficientData("no records with a positive scale estimate");
  std::size_t begin = end - 1;
  while (begin > 0) {
    const auto& prev = records[begin - 1];
    const auto& cur = records[begin];
    if (!(prev.L_est > 0.0) || !(prev.t < cur.t) || prev.L_est < cur.L_est) break;
    --begin;
  }
  const double L_last = records[end - 1].L_est;
  const double L_cap = L_last * std::pow(10.0, opt.decades);
  while (begin < end && records[begin].L_est > L_cap) ++begin;
  const std::size_t n = end - begin;
  if (n < std::max<std::size_t>(opt.min_records, 5)) {
    throw InsufficientData("collapse fit needs " + std::to_string(opt.min_records) +
                           " focusing records, found " + std::to_string(n));
  }

  std::vector<double> t(n), L(n), logL(n);
  for (std::size_t k = 0; k < n; ++k) {
    t[k] = records[begin + k].t;
    L[k] = records[begin + k].L_est;
    logL[k] = std::log(L[k]);
  }
  const double t_last = t.back();
  const double span = t_last - t.front();
  if (!(span > 0.0)) throw InsufficientData("focusing records do not span a time interval");

  std::vector<double> x(n);
  auto sse_at = [&](double u) {
    const double ts = t_last + std::exp(u);
    for (std::size_t k = 0; k < n; ++k) x[k] = std::log(ts - t[k]);
    return detail::fit_line(x, logL).sse;
  };
  const double u_lo = std::log(1e-12 * span), u_hi = std::log(10.0 * span);
  const int scan = 400;
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= scan; ++k) {
    const double u = u_lo + (u_hi - u_lo) * k / scan;
    const double s = sse_at(u);
    if (s < best_sse) {
      best_sse = s;
      best = k;
    }
  }
  const double du = (u_hi - u_lo) / scan;
  double a = u_lo + du * std::max(best - 1, 0), b = u_lo + du * std::min(best + 1, scan);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c1 = b - invphi * (b - a), c2 = a + invphi * (b - a);
  double f1 = sse_at(c1), f2 = sse_at(c2);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - invphi * (b - a);
      f1 = sse_at(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + invphi * (b - a);
      f2 = sse_at(c2);
    }
  }
  const double u = 0.5 * (a + b);
  CollapseFit fit;
  fit.t_star = t_last + std::exp(u);
  for (std::size_t k = 0; k < n; ++k) x[k] = std::log(fit.t_star - t[k]);
  const auto line = detail::fit_line(x, logL);
  fit.exponent = line.slope;
  fit.prefactor = std::exp(line.intercept);
  fit.rms = std::sqrt(line.sse / static_cast<double>(n));
  fit.window_begin = begin;
  fit.window_size = n;

  double tau = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) tau += 0.5 * (t[k] - t[k - 1]) * (1.0 / (L[k] * L[k]) + 1.0 / (L[k - 1] * L[k - 1]));
    const std::size_t lo = k < 2 ? 0 : std::min(k - 2, n - 5);
    const double ltt = detail::quadratic_second_derivative(t, L, lo, lo + 5, k);
    fit.table.push_back({t[k], tau, L[k], -L[k] * L[k] * L[k] * ltt});
  }
  return fit;
}

}  // namespace dsreg
