#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dsreg/ground_state.hpp"
#include "dsreg/model.hpp"

namespace dsreg {

enum class StepperKind { strang, ifrk4 };

inline const char* to_string(StepperKind k) { return k == StepperKind::strang ? "strang" : "ifrk4"; }

inline StepperKind parse_stepper_kind(const std::string& s) {
  if (s == "strang") return StepperKind::strang;
  if (s == "ifrk4") return StepperKind::ifrk4;
  throw ParameterError("unknown stepper kind '" + s + "'");
}

struct StepControl {
  double dt = 1e-3;
  double dt_min = 1e-10;
  double dt_max = 1e-2;
  bool adaptive = true;
  double cfl_const = 0.1;
  double t_end = 1.0;
  /// Absolute amplitude threshold; 0 means amp_max_factor * ||v0||_inf.
  double amp_max = 0.0;
  double amp_max_factor = 1e6;
  /// Stop when ||grad v|| exceeds this multiple of its initial value; 0 disables.
  double grad_max_factor = 0.0;
  /// Record spacing in time (0: none) and in steps (0: none). The first and
  /// last states are always recorded.
  double record_interval = 0.0;
  std::size_t record_every = 0;
  StepperKind stepper = StepperKind::strang;

  void validate() const {
    auto pos = [](double x) { return x > 0.0 && std::isfinite(x); };
    if (!pos(dt) || !pos(dt_min) || !pos(dt_max)) throw ParameterError("dt, dt_min, dt_max must be positive");
    if (dt_min > dt_max) throw ParameterError("dt_min must not exceed dt_max");
    if (!adaptive && (dt < dt_min || dt > dt_max)) throw ParameterError("dt must lie in [dt_min, dt_max]");
    if (!pos(cfl_const)) throw ParameterError("cfl_const must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ParameterError("t_end must be nonnegative");
    if (!(amp_max >= 0.0) || !(amp_max_factor > 0.0)) throw ParameterError("amplitude thresholds must be positive");
    if (!(grad_max_factor >= 0.0)) throw ParameterError("grad_max_factor must be nonnegative");
    if (!(record_interval >= 0.0)) throw ParameterError("record_interval must be nonnegative");
  }
};

struct DiagnosticsRecord {
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double hamiltonian = 0.0;
  double grad_norm = 0.0;
  double max_amp = 0.0;
  double L_est = 0.0;
};

enum class RunStatus { reached_t_end, blow_up_detected, dt_underflow };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::reached_t_end: return "reached_t_end";
    case RunStatus::blow_up_detected: return "blow_up_detected";
    case RunStatus::dt_underflow: return "dt_underflow";
  }
  return "?";
}

struct RunOutcome {
  RunStatus status = RunStatus::reached_t_end;
  double t_final = 0.0;
  std::vector<DiagnosticsRecord> records;
  std::size_t steps = 0;
  /// max over every step of |mass(t) - mass(t0)| / mass(t0).
  double max_mass_drift = 0.0;
  std::string detail;
  ComplexField final_state;
};

/// One-step propagators for a fixed grid and model. Not thread-safe (owns scratch).
class Stepper {
 public:
  Stepper(GridPtr grid, const ModelSpec& spec)
      : ops_(std::move(grid), spec),
        intensity_(ops_.grid().size()),
        theta_(ops_.grid().size()),
        half_(ops_.grid().half_size()),
        mask_x_(dealias_axis_mask(ops_.grid().nx())),
        mask_y_(dealias_axis_mask(ops_.grid().ny())) {}

  const ModelOperators& operators() const { return ops_; }
  const Grid2D& grid() const { return ops_.grid(); }

  /// v <- exp(i h theta(|v|^2)) v. |v| is unchanged.
  void nonlinear_phase(ComplexField& v, double h) {
    if (h == 0.0) return;
    const std::size_t n = v.size();
    for (std::size_t k = 0; k < n; ++k) intensity_[k] = std::norm(v[k]);
    ops_.phase_potential(intensity_.data(), theta_.data(), half_.data());
    for (std::size_t k = 0; k < n; ++k) v[k] *= std::polar(1.0, h * theta_[k]);
  }

  /// v <- P exp(i h Lap) v, the free flow followed by the 2/3 projection.
  /// Returns ||grad v||^2 after the flow when `want_grad`, otherwise -1.
  double linear_flow(ComplexField& v, double h, bool want_grad = false) {
    const Grid2D& g = grid();
    prepare_phases(h);
    const Fft2D& fft = fft_for(g);
    fft.forward(v.data(), v.data());
    double g2 = 0.0;
    for (std::size_t i = 0; i < g.nx(); ++i) {
      cplx* row = v.data() + i * g.ny();
      const cplx px = phase_x_[i];
      for (std::size_t j = 0; j < g.ny(); ++j) row[j] *= px * phase_y_[j];
      if (want_grad && mask_x_[i] != 0.0) {
        const double kx2 = g.kx()[i] * g.kx()[i];
        for (std::size_t j = 0; j < g.ny(); ++j) g2 += (kx2 + g.ky()[j] * g.ky()[j]) * std::norm(row[j]);
      }
    }
    fft.backward(v.data(), v.data());
    return want_grad ? g2 * g.area() : -1.0;
  }

  /// N(h/2) L(h) N(h/2).
  void strang(ComplexField& v, double h) {
    nonlinear_phase(v, 0.5 * h);
    linear_flow(v, h);
    nonlinear_phase(v, 0.5 * h);
    check_finite(v);
  }

  /// Integrating-factor RK4 on the 2/3-projected spectral state.
  void ifrk4(ComplexField& v, double h) {
    const Grid2D& g = grid();
    const std::size_t n = g.size();
    const Fft2D& fft = fft_for(g);
    const double inv_n = 1.0 / static_cast<double>(n);
    aligned_vector<cplx> vh(n), k1(n), k2(n), k3(n), k4(n), tmp(n), e_half(n);
    fft.forward(v.data(), vh.data());
    for (std::size_t i = 0; i < g.nx(); ++i) {
      for (std::size_t j = 0; j < g.ny(); ++j) {
        const double k2v = g.kx()[i] * g.kx()[i] + g.ky()[j] * g.ky()[j];
        const std::size_t k = i * g.ny() + j;
        e_half[k] = std::polar(mask_x_[i] * mask_y_[j], -0.5 * h * k2v);
        vh[k] *= inv_n * mask_x_[i] * mask_y_[j];
      }
    }
    // i * P F(v) in spectral space from a spectral state.
    auto rhs = [&](const aligned_vector<cplx>& state, aligned_vector<cplx>& out) {
      fft.backward(state.data(), out.data());
      for (std::size_t k = 0; k < n; ++k) intensity_[k] = std::norm(out[k]);
      ops_.phase_potential(intensity_.data(), theta_.data(), half_.data());
      for (std::size_t k = 0; k < n; ++k) out[k] *= cplx(0.0, theta_[k]);
      fft.forward(out.data(), out.data());
      for (std::size_t k = 0; k < n; ++k) out[k] *= inv_n * std::abs(e_half[k]);
    };
    rhs(vh, k1);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = e_half[k] * (vh[k] + 0.5 * h * k1[k]);
    rhs(tmp, k2);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = e_half[k] * vh[k] + 0.5 * h * k2[k];
    rhs(tmp, k3);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = e_half[k] * e_half[k] * vh[k] + h * e_half[k] * k3[k];
    rhs(tmp, k4);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx e = e_half[k];
      vh[k] = e * e * vh[k] + h / 6.0 * (e * e * k1[k] + 2.0 * e * (k2[k] + k3[k]) + k4[k]);
    }
    fft.backward(vh.data(), v.data());
    check_finite(v);
  }

  static void check_finite(const ComplexField& v) {
    if (!all_finite(v)) throw NumericalOverflow("step produced non-finite values");
  }

 private:
  void prepare_phases(double h) {
    if (h == phase_h_ && !phase_x_.empty()) return;
    const Grid2D& g = grid();
    const double inv_n = 1.0 / static_cast<double>(g.size());
    phase_x_.resize(g.nx());
    phase_y_.resize(g.ny());
    for (std::size_t i = 0; i < g.nx(); ++i) {
      phase_x_[i] = std::polar(mask_x_[i] * inv_n, -h * g.kx()[i] * g.kx()[i]);
    }
    for (std::size_t j = 0; j < g.ny(); ++j) {
      phase_y_[j] = std::polar(mask_y_[j], -h * g.ky()[j] * g.ky()[j]);
    }
    phase_h_ = h;
  }

  ModelOperators ops_;
  aligned_vector<double> intensity_, theta_;
  aligned_vector<cplx> half_;
  std::vector<double> mask_x_, mask_y_;
  std::vector<cplx> phase_x_, phase_y_;
  double phase_h_ = std::numeric_limits<double>::quiet_NaN();
};

/// One Strang step N(dt/2) L(dt) N(dt/2). dt may be negative.
inline ComplexField strang_step(const ComplexField& v, const ModelSpec& spec, double dt) {
  require_space(v.space(), Space::physical, "strang_step");
  if (!std::isfinite(dt) || dt == 0.0) throw ParameterError("strang_step needs a nonzero finite dt");
  Stepper s(v.grid_ptr(), spec);
  ComplexField out = v;
  s.strang(out, dt);
  return out;
}

inline ComplexField ifrk4_step(const ComplexField& v, const ModelSpec& spec, double dt) {
  require_space(v.space(), Space::physical, "ifrk4_step");
  if (!std::isfinite(dt) || dt == 0.0) throw ParameterError("ifrk4_step needs a nonzero finite dt");
  Stepper s(v.grid_ptr(), spec);
  ComplexField out = v;
  s.ifrk4(out, dt);
  return out;
}

/// Optional callbacks and references for integrate().
struct IntegrateOptions {
  std::function<void(const DiagnosticsRecord&)> on_record;
  /// Called with the state at t0 and at every multiple of snapshot_interval.
  std::function<void(const ComplexField&, double)> on_snapshot;
  double snapshot_interval = 0.0;
  double t0 = 0.0;
  /// Scale reference for L_est = grad_ref / ||grad v||; 0 uses the initial gradient.
  double grad_ref = 0.0;
  /// Initial amplitude and gradient used for the relative thresholds; 0 uses v0's.
  double amp_ref = 0.0;
  double grad0_ref = 0.0;
  double mass_ref = 0.0;
  /// Project v0 onto the 2/3 band before stepping. Disabled when resuming.
  bool project_initial = true;
};

namespace detail {

struct PointStats {
  double mass;
  double max_amp;
};

inline PointStats point_stats(const ComplexField& v) {
  double s = 0.0, m = 0.0;
  for (const auto& z : v.values()) {
    const double a = std::norm(z);
    s += a;
    m = std::max(m, a);
  }
  return {s * v.grid().cell_area(), std::sqrt(m)};
}

// Next multiple of `interval` strictly after t (with a relative guard).
inline double next_multiple(double t, double interval) {
  if (interval <= 0.0) return std::numeric_limits<double>::infinity();
  double k = std::floor(t / interval + 1e-9) + 1.0;
  return k * interval;
}

}  // namespace detail

/// Evolves i v_t + Lap v + F(v) = 0 from v0 at options.t0 to control.t_end.
inline RunOutcome integrate(const ComplexField& v0, const ModelSpec& spec, const StepControl& control,
                            const IntegrateOptions& options = {}) {
  require_space(v0.space(), Space::physical, "integrate");
  control.validate();
  if (!all_finite(v0)) throw ParameterError("initial field is not finite");
  if (options.snapshot_interval < 0.0) throw ParameterError("snapshot_interval must be nonnegative");
  spec.validate();

  Stepper stepper(v0.grid_ptr(), spec);
  ComplexField v = options.project_initial ? from_spectral(dealias(to_spectral(v0))) : v0;

  const auto stats0 = detail::point_stats(v);
  const double grad0 = std::sqrt(gradient_norm_squared(v));
  const double mass_ref = options.mass_ref > 0.0 ? options.mass_ref : stats0.mass;
  const double amp_ref = options.amp_ref > 0.0 ? options.amp_ref : stats0.max_amp;
  const double grad0_ref = options.grad0_ref > 0.0 ? options.grad0_ref : grad0;
  const double grad_ref = options.grad_ref > 0.0 ? options.grad_ref : grad0_ref;
  const double amp_max = control.amp_max > 0.0 ? control.amp_max : control.amp_max_factor * amp_ref;
  const double grad_max = control.grad_max_factor > 0.0 ? control.grad_max_factor * grad0_ref
                                                        : std::numeric_limits<double>::infinity();

  RunOutcome out;
  double t = options.t0;
  double last_dt = 0.0;
  // Pending nonlinear half step of the previous Strang step (merged with the next one).
  double pending = 0.0;

  auto flush = [&] {
    if (pending != 0.0) {
      stepper.nonlinear_phase(v, pending);
      pending = 0.0;
    }
  };
  auto record = [&] {
    flush();
    const auto st = detail::point_stats(v);
    DiagnosticsRecord r;
    r.t = t;
    r.dt = last_dt;
    r.mass = st.mass;
    r.max_amp = st.max_amp;
    r.grad_norm = std::sqrt(gradient_norm_squared(v));
    r.hamiltonian = hamiltonian(stepper.operators(), v);
    r.L_est = r.grad_norm > 0.0 ? grad_ref / r.grad_norm : 0.0;
    out.records.push_back(r);
    if (options.on_record) options.on_record(r);
  };

  record();
  if (options.on_snapshot) options.on_snapshot(v, t);
  double next_rec = detail::next_multiple(t, control.record_interval);
  double next_snap = detail::next_multiple(t, options.snapshot_interval);
  if (!options.on_snapshot) next_snap = std::numeric_limits<double>::infinity();

  out.status = RunStatus::reached_t_end;
  const double t_end = control.t_end;
  const double eps_t = 1e-12 * std::max(1.0, std::abs(t_end));
  double amp = stats0.max_amp;
  bool recorded_last = true;

  try {
    while (t < t_end - eps_t) {
      double dt = control.dt;
      if (control.adaptive) {
        dt = amp > 0.0 ? std::min(control.dt_max, control.cfl_const / (amp * amp)) : control.dt_max;
        if (dt < control.dt_min) {
          out.status = RunStatus::dt_underflow;
          out.detail = "adaptive dt " + std::to_string(dt) + " fell below dt_min";
          break;
        }
      }
      // Land exactly on the next observation time.
      double target = t + dt;
      bool observe_rec = false, observe_snap = false;
      const double stop = std::min({t_end, next_rec, next_snap});
      if (target >= stop - eps_t) {
        target = stop;
        observe_rec = stop == next_rec;
        observe_snap = stop == next_snap;
      }
      const double h = target - t;

      double g2 = -1.0;
      if (control.stepper == StepperKind::strang) {
        stepper.nonlinear_phase(v, pending + 0.5 * h);
        g2 = stepper.linear_flow(v, h, control.grad_max_factor > 0.0);
        pending = 0.5 * h;
        Stepper::check_finite(v);
      } else {
        stepper.ifrk4(v, h);
        if (control.grad_max_factor > 0.0) g2 = gradient_norm_squared(v);
      }
      t = target;
      last_dt = h;
      ++out.steps;
      recorded_last = false;

      const auto st = detail::point_stats(v);
      amp = st.max_amp;
      if (mass_ref > 0.0) out.max_mass_drift = std::max(out.max_mass_drift, std::abs(st.mass - mass_ref) / mass_ref);
      if (!(amp <= amp_max)) {
        out.status = RunStatus::blow_up_detected;
        out.detail = "amplitude exceeded threshold";
        break;
      }
      if (g2 >= 0.0 && std::sqrt(g2) > grad_max) {
        out.status = RunStatus::blow_up_detected;
        out.detail = "gradient norm exceeded threshold";
        break;
      }

      const bool by_count = control.record_every > 0 && out.steps % control.record_every == 0;
      if (observe_rec || by_count) {
        record();
        recorded_last = true;
      }
      if (observe_rec) next_rec = detail::next_multiple(t, control.record_interval);
      if (observe_snap) {
        flush();
        options.on_snapshot(v, t);
        next_snap = detail::next_multiple(t, options.snapshot_interval);
      }
    }
  } catch (const NumericalOverflow& e) {
    out.status = RunStatus::blow_up_detected;
    out.detail = e.what();
    out.t_final = t;
    out.final_state = std::move(v);
    return out;
  }
  if (!recorded_last) record();
  flush();
  out.t_final = t;
  out.final_state = std::move(v);
  return out;
}

/// Scale and shape diagnostics of v against a ground state.
struct ProfileDiagnostics {
  double L_est;
  double profile_err;
};

/// L_est = ||grad S|| / ||grad v||; profile_err is the relative L2 distance
/// between L_est |v(x_c + L_est xi)| and S(xi), with x_c the grid point of
/// largest |v| and v evaluated by trigonometric interpolation.
inline ProfileDiagnostics profile_diagnostics(const ComplexField& v, const GroundState& ground) {
  require_space(v.space(), Space::physical, "profile_diagnostics");
  const double gv = std::sqrt(gradient_norm_squared(v));
  if (!(gv > 0.0)) throw UndefinedScale("profile_diagnostics: field has zero gradient");
  const double L = ground.grad_norm / gv;

  const Grid2D& gv_grid = v.grid();
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double a = std::norm(v[k]);
    if (a > best) {
      best = a;
      arg = k;
    }
  }
  const double xc = gv_grid.x(arg / gv_grid.ny()), yc = gv_grid.y(arg % gv_grid.ny());
  const Grid2D& gs = ground.grid();
  std::vector<double> xs(gs.nx()), ys(gs.ny());
  for (std::size_t i = 0; i < gs.nx(); ++i) xs[i] = xc + L * gs.x(i);
  for (std::size_t j = 0; j < gs.ny(); ++j) ys[j] = yc + L * gs.y(j);
  const auto vals = interpolate(v, xs, ys);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < gs.size(); ++k) {
    const double d = L * std::abs(vals[k]) - ground.S[k];
    num += d * d;
    den += ground.S[k] * ground.S[k];
  }
  return {L, std::sqrt(num / den)};
}

}  // namespace dsreg
