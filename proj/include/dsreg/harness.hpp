#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dsreg/config.hpp"
#include "dsreg/io.hpp"
#include "dsreg/modulation.hpp"

namespace dsreg {

enum class InitialKind { gaussian, file };

/// v0 = A exp(-((x-cx)^2/wx^2 + (y-cy)^2/wy^2)/2) exp(-i chirp r^2), plus
/// optional seeded Gaussian noise of relative size `noise`. chirp > 0
/// focuses. When mass_ratio > 0, A is chosen so that ||v0||^2 equals
/// mass_ratio times the ground-state mass for (beta, rho, nu).
struct InitialCondition {
  InitialKind kind = InitialKind::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  double width_y = 0.0;
  double center_x = 0.0;
  double center_y = 0.0;
  double chirp = 0.0;
  double mass_ratio = 0.0;
  double noise = 0.0;
  std::string path;
};

struct ModulationSettings {
  double L0 = 1.0;
  double Lt0 = -1.0;
  double b0 = 1.0;
  double t_end = 2.0;
  bool linearized = false;
};

struct RunConfig {
  ModelSpec model;
  std::size_t nx = 128, ny = 128;
  double lx = 24.0, ly = 24.0;
  StepControl control;
  InitialCondition initial;
  std::string output_dir = "out";
  double snapshot_interval = 0.0;
  std::uint64_t seed = 1;
  PetviashviliConfig ground;
  ModulationSettings modulation;

  GridPtr grid() const { return make_grid(nx, ny, lx, ly); }

  void validate() const {
    model.validate();
    control.validate();
    ground.validate();
    if (!(snapshot_interval >= 0.0)) throw ParameterError("output.snapshot_interval must be nonnegative");
    if (initial.kind == InitialKind::gaussian) {
      if (!(initial.width > 0.0)) throw ParameterError("initial.width must be positive");
      if (!(initial.width_y >= 0.0)) throw ParameterError("initial.width_y must be nonnegative");
      if (!(initial.mass_ratio >= 0.0)) throw ParameterError("initial.mass_ratio must be nonnegative");
      if (!(initial.noise >= 0.0)) throw ParameterError("initial.noise must be nonnegative");
    } else if (!std::filesystem::exists(initial.path)) {
      throw ConfigError("initial.path '" + initial.path + "' does not exist");
    }
    if (!(modulation.L0 > 0.0)) throw ParameterError("modulation.L0 must be positive");
  }
};

/// Reads a RunConfig; unknown keys are rejected so typos do not pass silently.
inline RunConfig parse_run_config(const Config& c) {
  RunConfig r;
  r.model.kind = parse_model_kind(c.get_string("model.kind", "dse"));
  r.model.beta = c.get_double("model.beta", 1.0);
  r.model.rho = c.get_double("model.rho", -1.0);
  r.model.nu = c.get_double("model.nu", 1.0);
  r.model.alpha = c.get_double("model.alpha", 0.0);

  const long n = c.get_long("grid.n", 128);
  r.nx = static_cast<std::size_t>(c.get_long("grid.nx", n));
  r.ny = static_cast<std::size_t>(c.get_long("grid.ny", n));
  if (c.get_long("grid.nx", n) <= 0 || c.get_long("grid.ny", n) <= 0) throw ConfigError("grid sizes must be positive");
  const double l = c.get_double("grid.l", 24.0);
  r.lx = c.get_double("grid.lx", l);
  r.ly = c.get_double("grid.ly", l);

  auto& s = r.control;
  s.stepper = parse_stepper_kind(c.get_string("time.stepper", "strang"));
  s.dt = c.get_double("time.dt", s.dt);
  s.dt_min = c.get_double("time.dt_min", s.dt_min);
  s.dt_max = c.get_double("time.dt_max", s.dt_max);
  s.adaptive = c.get_bool("time.adaptive", s.adaptive);
  s.cfl_const = c.get_double("time.cfl", s.cfl_const);
  s.t_end = c.get_double("time.t_end", s.t_end);
  s.amp_max = c.get_double("time.amp_max", s.amp_max);
  s.amp_max_factor = c.get_double("time.amp_max_factor", s.amp_max_factor);
  s.grad_max_factor = c.get_double("time.grad_max_factor", s.grad_max_factor);
  s.record_interval = c.get_double("output.record_interval", s.record_interval);
  const long every = c.get_long("output.record_every", 0);
  if (every < 0) throw ConfigError("output.record_every must be nonnegative");
  s.record_every = static_cast<std::size_t>(every);

  auto& ic = r.initial;
  const std::string kind = c.get_string("initial.type", "gaussian");
  if (kind == "gaussian") {
    ic.kind = InitialKind::gaussian;
  } else if (kind == "file") {
    ic.kind = InitialKind::file;
    ic.path = c.require_string("initial.path");
  } else {
    throw ConfigError("initial.type must be gaussian or file, got '" + kind + "'");
  }
  ic.amplitude = c.get_double("initial.amplitude", ic.amplitude);
  ic.width = c.get_double("initial.width", ic.width);
  ic.width_y = c.get_double("initial.width_y", ic.width_y);
  ic.center_x = c.get_double("initial.center_x", ic.center_x);
  ic.center_y = c.get_double("initial.center_y", ic.center_y);
  ic.chirp = c.get_double("initial.chirp", ic.chirp);
  ic.mass_ratio = c.get_double("initial.mass_ratio", ic.mass_ratio);
  ic.noise = c.get_double("initial.noise", ic.noise);

  r.output_dir = c.get_string("output.dir", r.output_dir);
  r.snapshot_interval = c.get_double("output.snapshot_interval", r.snapshot_interval);
  const long seed = c.get_long("seed", 1);
  r.seed = static_cast<std::uint64_t>(seed);

  r.ground.gamma = c.get_double("ground.gamma", r.ground.gamma);
  r.ground.tol = c.get_double("ground.tol", r.ground.tol);
  r.ground.max_iter = static_cast<int>(c.get_long("ground.max_iter", r.ground.max_iter));
  r.ground.continuation_steps = static_cast<int>(c.get_long("ground.continuation_steps", r.ground.continuation_steps));

  auto& m = r.modulation;
  m.L0 = c.get_double("modulation.L0", m.L0);
  m.Lt0 = c.get_double("modulation.Lt0", m.Lt0);
  m.b0 = c.get_double("modulation.b0", m.b0);
  m.t_end = c.get_double("modulation.t_end", m.t_end);
  m.linearized = c.get_bool("modulation.linearized", m.linearized);

  if (auto extra = c.unused_keys(); !extra.empty()) {
    std::string list;
    for (const auto& k : extra) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError(c.origin() + ": unknown keys: " + list);
  }
  try {
    r.grid();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  r.validate();
  return r;
}

inline RunConfig load_run_config(const std::string& path) { return parse_run_config(Config::load(path)); }

inline GroundState ground_state_for(const RunConfig& cfg) {
  return solve_ground_state(cfg.model.beta, cfg.model.rho, cfg.model.nu, cfg.grid(), cfg.ground);
}

inline ComplexField make_initial_field(const RunConfig& cfg) {
  const InitialCondition& ic = cfg.initial;
  if (ic.kind == InitialKind::file) {
    Snapshot s = read_snapshot(ic.path);
    if (!(s.field.grid() == *cfg.grid())) throw ConfigError("initial.path grid does not match grid.*");
    if (s.is_ground_state()) {
      ComplexField f(s.field.grid_ptr());
      for (std::size_t k = 0; k < f.size(); ++k) f[k] = s.field[k].real();
      return f;
    }
    return std::move(s.field);
  }
  const double wx = ic.width, wy = ic.width_y > 0.0 ? ic.width_y : ic.width;
  ComplexField v = ComplexField::sample(cfg.grid(), [&](double x, double y) {
    const double dx = x - ic.center_x, dy = y - ic.center_y;
    const double env = std::exp(-0.5 * (dx * dx / (wx * wx) + dy * dy / (wy * wy)));
    return std::polar(env, -ic.chirp * (dx * dx + dy * dy));
  });
  if (ic.noise > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd;
    for (auto& z : v.values()) z += ic.noise * cplx(nd(rng), nd(rng)) * std::abs(z);
  }
  double a = ic.amplitude;
  if (ic.mass_ratio > 0.0) {
    const double m_ground = ground_state_for(cfg).mass;
    const double m1 = std::pow(l2_norm(v), 2);
    a = std::sqrt(ic.mass_ratio * m_ground / m1);
  }
  v *= a;
  return v;
}

// ---------------------------------------------------------------- simulate

struct SimulationResult {
  RunOutcome outcome;
  std::string diagnostics_path;
  std::vector<std::string> snapshots;
};

inline std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.dsa", index);
  return buf;
}

inline void ensure_output_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  const auto probe = std::filesystem::path(dir) / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw IoError("output directory '" + dir + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
}

/// Keeps the header and the rows with t <= t0 of an existing diagnostics file.
inline void truncate_diagnostics_after(const std::string& path, double t0) {
  if (!std::filesystem::exists(path)) return;
  std::vector<DiagnosticsRecord> keep;
  for (const auto& r : read_diagnostics(path)) {
    if (r.t <= t0) keep.push_back(r);
  }
  write_diagnostics(path, keep);
}

/// Runs the configured simulation, writing diagnostics.csv and snapshots
/// into cfg.output_dir. With resume_path, continues from that snapshot:
/// rows after its time are replaced and snapshot numbering continues.
inline SimulationResult run_simulation(const RunConfig& cfg, const std::string& resume_path = "") {
  cfg.validate();
  ensure_output_dir(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);
  SimulationResult res;
  res.diagnostics_path = (dir / "diagnostics.csv").string();

  const ComplexField v_init = make_initial_field(cfg);
  IntegrateOptions opt;
  opt.snapshot_interval = cfg.snapshot_interval;
  ComplexField start = v_init;
  std::size_t snap_index = 0;
  bool skip_first_record = false;

  if (!resume_path.empty()) {
    Snapshot s = read_snapshot(resume_path);
    if (s.is_ground_state()) throw ConfigError("cannot resume from a ground-state file");
    if (!(s.field.grid() == *cfg.grid())) throw ConfigError("resume snapshot grid does not match the config");
    if (s.spec.kind != cfg.model.kind || s.spec.beta != cfg.model.beta || s.spec.rho != cfg.model.rho ||
        s.spec.nu != cfg.model.nu || s.spec.alpha != cfg.model.alpha) {
      throw ConfigError("resume snapshot model does not match the config");
    }
    // References come from the projected initial state so thresholds and L_est match the original run.
    const ComplexField p0 = from_spectral(dealias(to_spectral(v_init)));
    const auto st = detail::point_stats(p0);
    opt.amp_ref = st.max_amp;
    opt.mass_ref = st.mass;
    opt.grad0_ref = std::sqrt(gradient_norm_squared(p0));
    opt.t0 = s.t;
    opt.project_initial = false;
    start = std::move(s.field);
    truncate_diagnostics_after(res.diagnostics_path, s.t);
    skip_first_record = std::filesystem::exists(res.diagnostics_path);
    if (cfg.snapshot_interval > 0.0) {
      snap_index = static_cast<std::size_t>(std::llround(s.t / cfg.snapshot_interval)) + 1;
    }
  }

  DiagnosticsWriter writer(res.diagnostics_path, !resume_path.empty());
  bool first = true;
  opt.on_record = [&](const DiagnosticsRecord& r) {
    if (first && skip_first_record) {
      first = false;
      return;
    }
    first = false;
    writer.write(r);
  };
  bool first_snap = true;
  opt.on_snapshot = [&](const ComplexField& v, double t) {
    if (first_snap && !resume_path.empty()) {
      first_snap = false;
      return;
    }
    first_snap = false;
    const auto path = (dir / snapshot_name(snap_index++)).string();
    write_snapshot(path, v, t, cfg.model);
    res.snapshots.push_back(path);
  };
  res.outcome = integrate(start, cfg.model, cfg.control, opt);
  return res;
}

inline std::string status_line(const RunOutcome& o) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "status=%s t_final=%.17g steps=%zu max_mass_drift=%.3e", to_string(o.status),
                o.t_final, o.steps, o.max_mass_drift);
  std::string s = buf;
  if (!o.detail.empty()) s += " detail=\"" + o.detail + "\"";
  return s;
}

// ---------------------------------------------------------------- modulation driver

struct ModulationReport {
  GroundState ground;
  ModulationConstants constants;
  ReducedTrajectory trajectory;
  std::optional<LinearizedSolution> gy, hz;
};

inline ModulationConstants constants_for(const GroundState& gs, const ModelSpec& spec, const ModulationSettings& m) {
  const ReducedState r0 = make_reduced_state(m.L0, m.Lt0, m.b0, spec.alpha);
  return compute_constants(gs, spec, r0);
}

inline ModulationReport run_modulation(const RunConfig& cfg) {
  cfg.validate();
  ModulationReport rep{ground_state_for(cfg), {}, {}, {}, {}};
  rep.constants = constants_for(rep.ground, cfg.model, cfg.modulation);
  rep.trajectory = integrate_reduced(rep.constants, cfg.model.alpha, cfg.modulation.L0, cfg.modulation.Lt0,
                                     cfg.modulation.t_end);
  if (cfg.modulation.linearized) {
    rep.gy = solve_linearized(rep.ground, cfg.model, LinearizedMode::GY);
    rep.hz = solve_linearized(rep.ground, cfg.model, LinearizedMode::HZ);
  }
  return rep;
}

inline void write_trajectory(const std::string& path, const ModulationConstants& c, double alpha,
                             const ReducedTrajectory& tr) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << "t,tau,L,L_t,a,b,eps,Q\n";
  for (const auto& s : tr.states) {
    f << format_g17(s.t) << ',' << format_g17(s.tau) << ',' << format_g17(s.L) << ',' << format_g17(s.L_t) << ','
      << format_g17(s.a) << ',' << format_g17(s.b) << ',' << format_g17(s.eps) << ','
      << format_g17(first_integral(c, alpha, s.L, s.L_t)) << '\n';
  }
  if (!f) throw IoError("write to '" + path + "' failed");
}

// ---------------------------------------------------------------- alpha sweep

struct SweepRow {
  double alpha;
  double L_min_pde;
  double L_min_reduced;
  double C1;
  double C2;
  std::string status;
};

inline constexpr const char* kSweepHeader = "alpha,L_min_pde,L_min_reduced,C1,C2";

inline void write_sweep(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << kSweepHeader << '\n';
  for (const auto& r : rows) {
    f << format_g17(r.alpha) << ',' << format_g17(r.L_min_pde) << ',' << format_g17(r.L_min_reduced) << ','
      << format_g17(r.C1) << ',' << format_g17(r.C2) << '\n';
  }
  if (!f) throw IoError("write to '" + path + "' failed");
}

/// For each alpha (sorted ascending, duplicates kept), runs the PDE with the
/// base config's model at that alpha and the reduced ODE with constants from
/// the base ground state. Writes sweep.csv into base.output_dir; on a
/// failing sub-run the completed rows are written before rethrowing.
inline std::vector<SweepRow> sweep_alpha(const RunConfig& base, std::vector<double> alphas) {
  if (alphas.size() < 2) throw ConfigError("sweep needs at least two alphas");
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("sweep alphas must be positive");
  }
  if (!base.model.regularized()) throw ConfigError("sweep needs a regularized model (rds1, rds2, rds3)");
  std::stable_sort(alphas.begin(), alphas.end());
  ensure_output_dir(base.output_dir);
  const std::filesystem::path dir(base.output_dir);
  const GroundState gs = ground_state_for(base);

  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    try {
      RunConfig cfg = base;
      cfg.model.alpha = alphas[k];
      char sub[64];
      std::snprintf(sub, sizeof sub, "alpha_%02zu", k);
      cfg.output_dir = (dir / sub).string();
      const auto sim = run_simulation(cfg);
      double lmin = std::numeric_limits<double>::infinity();
      for (const auto& r : sim.outcome.records) {
        if (r.L_est > 0.0) lmin = std::min(lmin, r.L_est);
      }
      const auto c = constants_for(gs, cfg.model, cfg.modulation);
      const auto tr = integrate_reduced(c, cfg.model.alpha, cfg.modulation.L0, cfg.modulation.Lt0,
                                        cfg.modulation.t_end);
      rows.push_back({alphas[k], lmin, tr.L_min, c.C1, c.C2, to_string(sim.outcome.status)});
    } catch (const Error& e) {
      write_sweep((dir / "sweep.csv").string(), rows);
      throw ConfigError("sweep aborted at alpha=" + format_g17(alphas[k]) + " after " + std::to_string(rows.size()) +
                        " completed rows: " + e.what());
    }
  }
  write_sweep((dir / "sweep.csv").string(), rows);
  return rows;
}

}  // namespace dsreg
