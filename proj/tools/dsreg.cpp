// Command-line front end: simulate, ground-state, modulation, sweep, fit.
//
// Exit codes: 0 success (including blow-up and dt underflow, which are
// reported in the status line), 1 usage error, 2 configuration or input
// format error, 3 I/O error, 4 numerical failure or insufficient data.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "dsreg/dsreg.hpp"

namespace fs = std::filesystem;
using namespace dsreg;

namespace {

void print_kv(const char* key, double v) { std::printf("%s=%.17g\n", key, v); }

int cmd_simulate(const std::string& config, const std::string& resume) {
  const RunConfig cfg = load_run_config(config);
  const auto res = run_simulation(cfg, resume);
  std::printf("%s\n", status_line(res.outcome).c_str());
  std::printf("diagnostics=%s snapshots=%zu\n", res.diagnostics_path.c_str(), res.snapshots.size());
  return 0;
}

int cmd_ground_state(const std::string& config) {
  const RunConfig cfg = load_run_config(config);
  ensure_output_dir(cfg.output_dir);
  const GroundState gs = ground_state_for(cfg);
  const auto path = (fs::path(cfg.output_dir) / "ground_state.dsa").string();
  write_ground_state(path, gs);
  print_kv("mass", gs.mass);
  print_kv("residual", gs.residual);
  std::printf("iterations=%d\n", gs.iterations);
  print_kv("grad_norm", gs.grad_norm);
  print_kv("grad_S2_sq", gs.grad_S2_sq);
  print_kv("second_moment", gs.second_moment);
  std::printf("file=%s\n", path.c_str());
  return 0;
}

int cmd_modulation(const std::string& config) {
  const RunConfig cfg = load_run_config(config);
  ensure_output_dir(cfg.output_dir);
  const auto rep = run_modulation(cfg);
  const auto& c = rep.constants;
  print_kv("C1", c.C1);
  print_kv("C2", c.C2);
  print_kv("C3", c.C3);
  print_kv("C4", c.C4);
  print_kv("S_mass", c.S_mass);
  print_kv("L_min", rep.trajectory.L_min);
  print_kv("t_at_min", rep.trajectory.t_at_min);
  std::printf("collapsed=%s\n", rep.trajectory.collapsed ? "true" : "false");
  print_kv("q_drift", rep.trajectory.q_drift);
  if (rep.gy) {
    print_kv("int_SG", rep.gy->inner_with_S);
    print_kv("int_SG_closed_form", c.C1);
    print_kv("int_SH", rep.hz->inner_with_S);
    print_kv("int_SH_closed_form", c.C2);
  }
  const fs::path dir(cfg.output_dir);
  {
    std::ofstream f(dir / "constants.csv");
    if (!f) throw IoError("cannot write constants.csv");
    f << "C1,C2,C3,C4,S_mass\n"
      << format_g17(c.C1) << ',' << format_g17(c.C2) << ',' << format_g17(c.C3) << ',' << format_g17(c.C4) << ','
      << format_g17(c.S_mass) << '\n';
  }
  write_trajectory((dir / "trajectory.csv").string(), c, cfg.model.alpha, rep.trajectory);
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& alphas_csv) {
  const RunConfig cfg = load_run_config(config);
  std::vector<double> alphas;
  std::stringstream ss(alphas_csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      alphas.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--alphas: cannot parse '" + item + "'");
    }
  }
  const auto rows = sweep_alpha(cfg, alphas);
  std::printf("%s,status\n", kSweepHeader);
  for (const auto& r : rows) {
    std::printf("%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", r.alpha, r.L_min_pde, r.L_min_reduced, r.C1, r.C2,
                r.status.c_str());
  }
  return 0;
}

int cmd_fit(const std::string& csv, const std::string& table, double decades, std::size_t min_records) {
  const auto records = read_diagnostics(csv);
  CollapseFitOptions opt;
  opt.decades = decades;
  opt.min_records = min_records;
  const auto fit = collapse_fit(records, opt);
  print_kv("t_star", fit.t_star);
  print_kv("exponent", fit.exponent);
  print_kv("prefactor", fit.prefactor);
  print_kv("rms", fit.rms);
  std::printf("window_begin=%zu window_size=%zu\n", fit.window_begin, fit.window_size);
  if (!table.empty()) {
    std::ofstream f(table);
    if (!f) throw IoError("cannot write '" + table + "'");
    f << "t,tau,L,b\n";
    for (const auto& r : fit.table) {
      f << format_g17(r.t) << ',' << format_g17(r.tau) << ',' << format_g17(r.L) << ',' << format_g17(r.b) << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral Davey-Stewartson / alpha-regularization toolkit"};
  app.require_subcommand(1);

  std::string config, resume, alphas, csv, table;
  double decades = 1.0;
  std::size_t min_records = 50;

  auto* sim = app.add_subcommand("simulate", "run a simulation from a config file");
  sim->add_option("config", config, "config file")->required();
  sim->add_option("--resume", resume, "continue from this snapshot");

  auto* gs = app.add_subcommand("ground-state", "compute the ground state for the configured parameters");
  gs->add_option("config", config, "config file")->required();

  auto* mod = app.add_subcommand("modulation", "modulation constants and reduced scale dynamics");
  mod->add_option("config", config, "config file")->required();

  auto* sw = app.add_subcommand("sweep", "alpha sweep of the minimal scale");
  sw->add_option("config", config, "config file")->required();
  sw->add_option("--alphas", alphas, "comma-separated alpha values")->required();

  auto* fit = app.add_subcommand("fit", "collapse-law fit of a diagnostics CSV");
  fit->add_option("csv", csv, "diagnostics.csv")->required();
  fit->add_option("--table", table, "write the (t, tau, L, b) table here");
  fit->add_option("--decades", decades, "fit window in decades of L");
  fit->add_option("--min-records", min_records, "minimum records in the window");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config, resume);
    if (gs->parsed()) return cmd_ground_state(config);
    if (mod->parsed()) return cmd_modulation(config);
    if (sw->parsed()) return cmd_sweep(config, alphas);
    if (fit->parsed()) return cmd_fit(csv, table, decades, min_records);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return 1;
}
