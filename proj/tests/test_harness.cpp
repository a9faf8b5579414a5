#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

#include "dsreg/harness.hpp"
#include "oracles.hpp"

using namespace dsreg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dsreg_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ComplexField random_field(std::size_t nx, std::size_t ny, std::uint64_t seed) {
  auto g = make_grid(nx, ny, 10.0, 7.0);
  ComplexField f(g);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  for (auto& z : f.values()) z = cplx(n(rng), n(rng));
  return f;
}

RunConfig small_config(const fs::path& out) {
  RunConfig c = parse_run_config(Config::parse(
      "model.kind = rds3\n"
      "model.alpha = 0.1\n"
      "grid.n = 64\n"
      "grid.l = 20\n"
      "time.t_end = 0.2\n"
      "output.record_interval = 0.05\n"
      "output.snapshot_interval = 0.1\n"
      "initial.amplitude = 1.5\n"
      "initial.width = 1.5\n"
      "initial.chirp = 0.1\n"));
  c.output_dir = out.string();
  return c;
}

int run_cli(const std::string& args, std::string* out = nullptr) {
  const char* cli = std::getenv("DSREG_CLI");
  if (!cli) return -1;
  const fs::path log = fs::temp_directory_path() / ("dsreg_cli_" + std::to_string(::getpid()) + ".log");
  const std::string cmd = std::string(cli) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  if (out) *out = slurp(log);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

// ---------------------------------------------------------------- config

TEST(Config, ParsesCommentsAndWhitespace) {
  const Config c = Config::parse("# header\n  grid.nx = 32   # trailing\n\nmodel.kind=rds1\n");
  EXPECT_EQ(c.get_long("grid.nx", 0), 32);
  EXPECT_EQ(c.get_string("model.kind", ""), "rds1");
  EXPECT_EQ(c.get_double("absent", 2.5), 2.5);
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(Config::parse("grid.nx 32\n"), ConfigError);
  EXPECT_THROW(Config::parse("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(Config::parse("a = x\n").get_double("a", 0.0), ConfigError);
  EXPECT_THROW(Config::parse("a = 1.5\n").get_long("a", 0), ConfigError);
  EXPECT_THROW(Config::parse("a = maybe\n").get_bool("a", false), ConfigError);
  EXPECT_THROW(Config::load("/nonexistent/dsreg.cfg"), ConfigError);
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_run_config(Config::parse("grid.nz = 4\n")), ConfigError);
  EXPECT_THROW(parse_run_config(Config::parse("grid.n = 63\n")), ConfigError);
  EXPECT_THROW(parse_run_config(Config::parse("model.kind = rds4\n")), ParameterError);
  EXPECT_THROW(parse_run_config(Config::parse("model.kind = rds1\nmodel.alpha = 0\n")), ParameterError);
  EXPECT_THROW(parse_run_config(Config::parse("initial.type = file\ninitial.path = /nonexistent\n")), ConfigError);
}

TEST(RunConfig, Defaults) {
  const RunConfig c = parse_run_config(Config::parse(""));
  EXPECT_EQ(c.model.kind, ModelKind::dse);
  EXPECT_EQ(c.nx, 128u);
  EXPECT_EQ(c.control.stepper, StepperKind::strang);
}

// ---------------------------------------------------------------- snapshots

TEST(Snapshot, RoundTripIsBitExact) {
  const auto dir = scratch("snap");
  const ComplexField f = random_field(16, 24, 5);
  const ModelSpec spec{ModelKind::rds2, -0.5, -1.0, 0.7, 0.3};
  const auto path = (dir / "a.dsa").string();
  write_snapshot(path, f, 1.25, spec);
  EXPECT_EQ(fs::file_size(path), kSnapshotHeaderBytes + 16u * 16u * 24u);
  const Snapshot s = read_snapshot(path);
  EXPECT_TRUE(s.field.grid() == f.grid());
  EXPECT_EQ(s.t, 1.25);
  EXPECT_EQ(s.spec.kind, ModelKind::rds2);
  EXPECT_EQ(s.spec.nu, 0.7);
  EXPECT_EQ(s.spec.alpha, 0.3);
  EXPECT_EQ(std::memcmp(s.field.data(), f.data(), f.size() * sizeof(cplx)), 0);
}

TEST(Snapshot, HeaderLayout) {
  const auto dir = scratch("layout");
  const auto path = (dir / "a.dsa").string();
  write_snapshot(path, random_field(8, 8, 1), 0.5, {ModelKind::rds3, 1.0, -1.0, 1.0, 0.1});
  const std::string b = slurp(path);
  EXPECT_EQ(b.substr(0, 4), "DSA1");
  EXPECT_EQ(static_cast<unsigned char>(b[4]), 1);
  EXPECT_EQ(static_cast<unsigned char>(b[5]), 0);
  EXPECT_EQ(static_cast<unsigned char>(b[6]), 8);
  EXPECT_EQ(static_cast<unsigned char>(b[46]), 3);
}

TEST(Snapshot, TruncatedFileNamesByteCounts) {
  const auto dir = scratch("trunc");
  const auto path = (dir / "a.dsa").string();
  write_snapshot(path, random_field(8, 8, 2), 0.0, {});
  const auto full = fs::file_size(path);
  fs::resize_file(path, full - 10);
  try {
    read_snapshot(path);
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_EQ(e.expected(), full);
    EXPECT_EQ(e.actual(), full - 10);
    EXPECT_NE(std::string(e.what()).find(std::to_string(full)), std::string::npos);
  }
  fs::resize_file(path, 30);
  EXPECT_THROW(read_snapshot(path), TruncationError);
}

TEST(Snapshot, BadMagicVersionAndTrailingBytes) {
  const auto dir = scratch("bad");
  const auto path = (dir / "a.dsa").string();
  write_snapshot(path, random_field(8, 8, 3), 0.0, {});
  std::string b = slurp(path);

  std::string bad = b;
  bad[0] = 'X';
  std::ofstream(path, std::ios::binary | std::ios::trunc) << bad;
  EXPECT_THROW(read_snapshot(path), FormatError);

  bad = b;
  bad[4] = 2;
  std::ofstream(path, std::ios::binary | std::ios::trunc) << bad;
  EXPECT_THROW(read_snapshot(path), VersionError);

  std::ofstream(path, std::ios::binary | std::ios::trunc) << b << "xx";
  EXPECT_THROW(read_snapshot(path), FormatError);

  EXPECT_THROW(read_snapshot((dir / "missing.dsa").string()), IoError);
}

TEST(Snapshot, GroundStateRoundTrip) {
  const auto dir = scratch("gs");
  const GroundState gs = solve_ground_state(1.0, -0.5, 1.0, make_grid(64, 24.0));
  const auto path = (dir / "g.dsa").string();
  write_ground_state(path, gs);
  EXPECT_TRUE(read_snapshot(path).is_ground_state());
  const GroundState back = read_ground_state(path);
  for (std::size_t k = 0; k < gs.S.size(); ++k) {
    ASSERT_EQ(back.S[k], gs.S[k]);
    ASSERT_EQ(back.X[k], gs.X[k]);
  }
  EXPECT_EQ(back.rho, -0.5);
  EXPECT_EQ(back.mass, gs.mass);
}

// ---------------------------------------------------------------- diagnostics CSV

TEST(Diagnostics, CsvRoundTripIsLossless) {
  const auto dir = scratch("csv");
  std::vector<DiagnosticsRecord> recs{{0.1, 1e-3, 11.700896523, -3.0 / 7.0, 1e300, 5e-324, 1.0 / 3.0},
                                      {0.2, 0.0, 0.0, -0.0, 1.0, 2.0, 0.0}};
  const auto path = (dir / "d.csv").string();
  write_diagnostics(path, recs);
  EXPECT_EQ(slurp(path).substr(0, std::string(kDiagnosticsHeader).size()), kDiagnosticsHeader);
  const auto back = read_diagnostics(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].hamiltonian, recs[0].hamiltonian);
  EXPECT_EQ(back[0].grad_norm, recs[0].grad_norm);
  EXPECT_EQ(back[0].max_amp, recs[0].max_amp);
  EXPECT_EQ(back[0].L_est, recs[0].L_est);
  std::ofstream(path, std::ios::app) << "1,2,3\n";
  EXPECT_THROW(read_diagnostics(path), FormatError);
}

// ---------------------------------------------------------------- simulation

TEST(Simulation, ZeroDurationWritesOneRecordAndSnapshot) {
  const auto dir = scratch("zero");
  RunConfig c = small_config(dir);
  c.control.t_end = 0.0;
  const auto res = run_simulation(c);
  EXPECT_EQ(res.outcome.status, RunStatus::reached_t_end);
  EXPECT_EQ(res.snapshots.size(), 1u);
  const auto recs = read_diagnostics(res.diagnostics_path);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].t, 0.0);
}

TEST(Simulation, RerunsAreByteIdentical) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  run_simulation(small_config(a));
  run_simulation(small_config(b));
  EXPECT_EQ(slurp(a / "diagnostics.csv"), slurp(b / "diagnostics.csv"));
  EXPECT_EQ(slurp(a / "snapshot_000002.dsa"), slurp(b / "snapshot_000002.dsa"));
}

TEST(Simulation, ResumeMatchesUninterruptedRun) {
  const auto full = scratch("res_full"), part = scratch("res_part");
  run_simulation(small_config(full));
  RunConfig half = small_config(part);
  half.control.t_end = 0.1;
  run_simulation(half);
  const auto resumed = run_simulation(small_config(part), (part / "snapshot_000001.dsa").string());
  EXPECT_EQ(resumed.outcome.status, RunStatus::reached_t_end);
  const auto rf = read_diagnostics((full / "diagnostics.csv").string());
  const auto rp = read_diagnostics((part / "diagnostics.csv").string());
  ASSERT_EQ(rf.size(), rp.size());
  const auto& a = rf.back();
  const auto& b = rp.back();
  EXPECT_NEAR(b.mass, a.mass, 1e-12 * a.mass);
  EXPECT_NEAR(b.hamiltonian, a.hamiltonian, 1e-12 * std::abs(a.hamiltonian));
  EXPECT_NEAR(b.grad_norm, a.grad_norm, 1e-12 * a.grad_norm);
  EXPECT_EQ(slurp(full / "diagnostics.csv"), slurp(part / "diagnostics.csv"));
  EXPECT_EQ(slurp(full / "snapshot_000002.dsa"), slurp(part / "snapshot_000002.dsa"));
}

TEST(Simulation, ResumeRejectsMismatchedModel) {
  const auto dir = scratch("res_bad");
  run_simulation(small_config(dir));
  RunConfig other = small_config(dir);
  other.model.alpha = 0.2;
  EXPECT_THROW(run_simulation(other, (dir / "snapshot_000001.dsa").string()), ConfigError);
}

TEST(Simulation, MassRatioScalesAmplitude) {
  RunConfig c = small_config(scratch("ratio"));
  c.initial.mass_ratio = 2.0;
  c.initial.chirp = 0.0;
  const double m = std::pow(l2_norm(make_initial_field(c)), 2);
  EXPECT_NEAR(m, 2.0 * ground_state_for(c).mass, 1e-10 * m);
}

TEST(Simulation, FileInitialConditionUsesSnapshot) {
  const auto dir = scratch("file_ic");
  run_simulation(small_config(dir));
  RunConfig c = small_config(dir);
  c.initial.kind = InitialKind::file;
  c.initial.path = (dir / "snapshot_000001.dsa").string();
  const ComplexField v = make_initial_field(c);
  const Snapshot s = read_snapshot(c.initial.path);
  EXPECT_EQ(std::memcmp(v.data(), s.field.data(), v.size() * sizeof(cplx)), 0);
  RunConfig wrong = c;
  wrong.nx = 32;
  wrong.ny = 32;
  EXPECT_THROW(make_initial_field(wrong), ConfigError);
}

TEST(Simulation, UnwritableOutputIsIoError) {
  RunConfig c = small_config(scratch("io"));
  c.output_dir = "/proc/dsreg_cannot_write";
  EXPECT_THROW(run_simulation(c), IoError);
}

// ---------------------------------------------------------------- sweep

TEST(Sweep, DuplicateAlphaGivesIdenticalRows) {
  const auto dir = scratch("sweep");
  RunConfig c = small_config(dir);
  c.control.t_end = 0.1;
  const auto rows = sweep_alpha(c, {0.1, 0.1});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].L_min_pde, rows[1].L_min_pde);
  EXPECT_EQ(rows[0].L_min_reduced, rows[1].L_min_reduced);
  EXPECT_EQ(rows[0].C1, rows[1].C1);
  std::stringstream ss(slurp(dir / "sweep.csv"));
  std::string header, l1, l2;
  std::getline(ss, header);
  std::getline(ss, l1);
  std::getline(ss, l2);
  EXPECT_EQ(header, kSweepHeader);
  EXPECT_EQ(l1, l2);
}

TEST(Sweep, RowsAreOrderedByAlpha) {
  RunConfig c = small_config(scratch("sweep_order"));
  c.control.t_end = 0.05;
  const auto rows = sweep_alpha(c, {0.4, 0.1, 0.2});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].alpha, 0.1);
  EXPECT_EQ(rows[2].alpha, 0.4);
  for (const auto& r : rows) EXPECT_GT(r.L_min_pde, 0.0);
}

TEST(Sweep, SupercriticalSweepAgainstTurningPoint) {
  const auto dir = scratch("sweep_super");
  RunConfig c = parse_run_config(Config::parse(
      "model.kind = rds3\nmodel.alpha = 0.1\ngrid.n = 128\ngrid.l = 12\ntime.t_end = 0.6\n"
      "output.record_interval = 0.005\ninitial.mass_ratio = 2\n"));
  c.output_dir = dir.string();
  const auto rows = sweep_alpha(c, {0.4, 0.2, 0.1, 0.05});
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    EXPECT_EQ(r.status, "reached_t_end");
    EXPECT_GT(r.L_min_pde, 0.0);
    if (k > 0) EXPECT_LT(rows[k - 1].L_min_pde, r.L_min_pde);
    // eps0 = alpha^2 / L0^2 enters C3, so each row has its own first integral.
    const double c3 = r.C1 * c.modulation.b0 + r.C2 * r.alpha * r.alpha;
    const double k2 = r.C2 * r.alpha * r.alpha / (2.0 * r.C1), k3 = c3 / r.C1;
    const double q = c.modulation.Lt0 * c.modulation.Lt0 + k2 - k3;
    EXPECT_NEAR(r.L_min_reduced, oracle::reduced_turning_point(k2, k3, q), 1e-9);
  }
}

TEST(Sweep, RejectsBadAlphaLists) {
  RunConfig c = small_config(scratch("sweep_bad"));
  EXPECT_THROW(sweep_alpha(c, {0.1}), ConfigError);
  EXPECT_THROW(sweep_alpha(c, {0.1, -0.2}), ConfigError);
  RunConfig d = c;
  d.model = {ModelKind::dse, 1.0, -1.0, 1.0, 0.0};
  EXPECT_THROW(sweep_alpha(d, {0.1, 0.2}), ConfigError);
}

TEST(Sweep, FailingSubRunStillWritesCsv) {
  const auto dir = scratch("sweep_fail");
  RunConfig c = small_config(dir);
  c.control.t_end = 0.05;
  c.modulation.t_end = -1.0;
  EXPECT_THROW(sweep_alpha(c, {0.1, 0.2}), ConfigError);
  EXPECT_EQ(slurp(dir / "sweep.csv"), std::string(kSweepHeader) + "\n");
}

// ---------------------------------------------------------------- CLI

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!std::getenv("DSREG_CLI")) GTEST_SKIP() << "DSREG_CLI not set";
  }
};

TEST_F(Cli, SimulateSucceedsAndPrintsStatus) {
  const auto dir = scratch("cli_sim");
  std::ofstream(dir / "a.cfg") << "model.kind = rds3\nmodel.alpha = 0.1\ngrid.n = 32\ngrid.l = 16\n"
                                  "time.t_end = 0.05\noutput.dir = "
                               << (dir / "out").string() << "\n";
  std::string out;
  EXPECT_EQ(run_cli("simulate " + (dir / "a.cfg").string(), &out), 0);
  EXPECT_NE(out.find("status=reached_t_end"), std::string::npos) << out;
}

TEST_F(Cli, BlowUpIsASuccessfulOutcome) {
  const auto dir = scratch("cli_blow");
  std::ofstream(dir / "a.cfg") << "model.kind = dse\nmodel.rho = -1\ngrid.n = 64\ngrid.l = 16\n"
                                  "initial.amplitude = 4\ninitial.width = 1\ntime.t_end = 5\n"
                                  "time.amp_max_factor = 3\noutput.dir = "
                               << (dir / "out").string() << "\n";
  std::string out;
  EXPECT_EQ(run_cli("simulate " + (dir / "a.cfg").string(), &out), 0);
  EXPECT_NE(out.find("status=blow_up_detected"), std::string::npos) << out;
}

TEST_F(Cli, ConfigAndUsageErrorsAreNonzero) {
  const auto dir = scratch("cli_err");
  std::ofstream(dir / "bad.cfg") << "grid.n = 7\n";
  EXPECT_EQ(run_cli("simulate " + (dir / "bad.cfg").string()), 2);
  EXPECT_EQ(run_cli("simulate " + (dir / "missing.cfg").string()), 2);
  EXPECT_NE(run_cli("frobnicate"), 0);
  std::ofstream(dir / "io.cfg") << "grid.n = 16\noutput.dir = /proc/dsreg_no\n";
  EXPECT_EQ(run_cli("simulate " + (dir / "io.cfg").string()), 3);
}

TEST_F(Cli, FitReportsInsufficientData) {
  const auto dir = scratch("cli_fit");
  write_diagnostics((dir / "d.csv").string(), {{0.0, 0.0, 1, 1, 1, 1, 1}, {0.1, 0.1, 1, 1, 2, 1, 0.5}});
  std::string out;
  EXPECT_EQ(run_cli("fit " + (dir / "d.csv").string(), &out), 4);
  EXPECT_NE(out.find("50"), std::string::npos) << out;
}

TEST_F(Cli, GroundStateAndModulationWriteFiles) {
  const auto dir = scratch("cli_gs");
  std::ofstream(dir / "a.cfg") << "model.kind = rds3\nmodel.alpha = 0.1\nmodel.rho = -0.5\ngrid.n = 64\n"
                                  "grid.l = 24\noutput.dir = "
                               << (dir / "out").string() << "\n";
  std::string out;
  EXPECT_EQ(run_cli("ground-state " + (dir / "a.cfg").string(), &out), 0) << out;
  EXPECT_TRUE(read_snapshot((dir / "out" / "ground_state.dsa").string()).is_ground_state());
  EXPECT_EQ(run_cli("modulation " + (dir / "a.cfg").string(), &out), 0) << out;
  EXPECT_NE(out.find("C1="), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "out" / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "constants.csv"));
}
