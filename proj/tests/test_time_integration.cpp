#include <gtest/gtest.h>

#include "dsreg/stepper.hpp"

using namespace dsreg;

namespace {

ComplexField gaussian(const GridPtr& g, double amp, double w, double chirp = 0.0) {
  return ComplexField::sample(g, [=](double x, double y) {
    return amp * std::exp(-(x * x + y * y) / (2 * w * w)) * std::polar(1.0, chirp * x);
  });
}

double rel_l2(const ComplexField& a, const ComplexField& b) {
  ComplexField d = a;
  d -= b;
  return l2_norm(d) / l2_norm(b);
}

ComplexField project(const ComplexField& v) { return from_spectral(dealias(to_spectral(v))); }

StepControl fixed(double dt, double t_end) {
  StepControl c;
  c.adaptive = false;
  c.dt = dt;
  c.dt_min = std::min(1e-10, dt);
  c.dt_max = std::max(1e-2, dt);
  c.t_end = t_end;
  return c;
}

}  // namespace

TEST(StrangStep, PlaneWaveIsExact) {
  auto g = make_grid(32, 2.0 * std::numbers::pi);
  const cplx c(0.8, 0.3);
  const double beta = 1.4, dt = 0.05;
  const ModelSpec spec{ModelKind::rds3, beta, -1.0, 1.0, 0.2};
  const ComplexField v = ComplexField::sample(g, [&](double x, double y) { return c * std::polar(1.0, 3 * x - 2 * y); });
  const ComplexField out = strang_step(v, spec, dt);
  const double k2 = 13.0;
  ComplexField expect = v;
  expect *= std::polar(1.0, (-k2 + beta * std::norm(c)) * dt);
  EXPECT_LT(rel_l2(out, expect), 1e-12);
}

TEST(StrangStep, LinearFlowIsUnitary) {
  auto g = make_grid(64, 20.0);
  const ComplexField v = gaussian(g, 1.0, 1.5, 0.8);
  const ComplexField out = strang_step(v, ModelSpec{ModelKind::dse, 0.0, 0.0, 1.0, 0.0}, 0.1);
  EXPECT_NEAR(l2_norm(out), l2_norm(v), 1e-13 * l2_norm(v));
}

TEST(StrangStep, RejectsZeroDt) {
  auto g = make_grid(16, 4.0);
  EXPECT_THROW(strang_step(ComplexField(g), ModelSpec{}, 0.0), ParameterError);
}

TEST(StrangStep, LocalErrorIsThirdOrder) {
  auto g = make_grid(64, 16.0);
  const ModelSpec spec{ModelKind::dse, 1.0, -1.0, 1.0, 0.0};
  const ComplexField v = project(gaussian(g, 1.0, 1.0, 0.5));
  auto reference = [&](double h) {
    ComplexField r = v;
    const int sub = 64;
    for (int i = 0; i < sub; ++i) r = ifrk4_step(r, spec, h / sub);
    return r;
  };
  const double h = 0.04;
  auto err = [&](double step) {
    ComplexField d = strang_step(v, spec, step);
    d -= reference(step);
    return l2_norm(d);
  };
  const double ratio = err(h) / err(0.5 * h);
  EXPECT_NEAR(ratio, 8.0, 0.6) << ratio;
}

TEST(StrangStep, TimeReversal) {
  auto g = make_grid(128, 16.0);
  const ComplexField v = project(gaussian(g, 1.2, 1.1, 0.3));
  for (ModelKind k : {ModelKind::dse, ModelKind::rds1, ModelKind::rds2, ModelKind::rds3}) {
    const ModelSpec spec{k, 1.0, -1.0, 1.0, 0.1};
    ComplexField w = v;
    for (int i = 0; i < 10; ++i) w = strang_step(w, spec, 0.01);
    for (int i = 0; i < 10; ++i) w = strang_step(w, spec, -0.01);
    EXPECT_LT(rel_l2(w, v), 1e-10) << to_string(k);
  }
}

TEST(IfRk4, AgreesWithStrangAtSecondOrder) {
  auto g = make_grid(64, 16.0);
  const ModelSpec spec{ModelKind::rds3, 1.0, -1.0, 1.0, 0.2};
  const ComplexField v = project(gaussian(g, 1.0, 1.0));
  ComplexField a = v, b = v;
  for (int i = 0; i < 50; ++i) {
    a = strang_step(a, spec, 0.01);
    b = ifrk4_step(b, spec, 0.01);
  }
  EXPECT_LT(rel_l2(a, b), 1e-3);
}

TEST(Integrate, ZeroFieldReachesEnd) {
  auto g = make_grid(16, 4.0);
  StepControl c;
  c.t_end = 0.1;
  c.record_interval = 0.05;
  const RunOutcome out = integrate(ComplexField(g), ModelSpec{}, c);
  EXPECT_EQ(out.status, RunStatus::reached_t_end);
  EXPECT_NEAR(out.t_final, 0.1, 1e-15);
  ASSERT_GE(out.records.size(), 2u);
  for (const auto& r : out.records) {
    EXPECT_EQ(r.mass, 0.0);
    EXPECT_EQ(r.hamiltonian, 0.0);
    EXPECT_EQ(r.grad_norm, 0.0);
    EXPECT_EQ(r.max_amp, 0.0);
    EXPECT_EQ(r.L_est, 0.0);
  }
}

TEST(Integrate, ZeroEndTimeGivesSingleRecord) {
  auto g = make_grid(32, 10.0);
  StepControl c;
  c.t_end = 0.0;
  int snaps = 0;
  IntegrateOptions o;
  o.on_snapshot = [&](const ComplexField&, double) { ++snaps; };
  o.snapshot_interval = 1.0;
  const RunOutcome out = integrate(gaussian(g, 1.0, 1.0), ModelSpec{}, c, o);
  EXPECT_EQ(out.status, RunStatus::reached_t_end);
  EXPECT_EQ(out.records.size(), 1u);
  EXPECT_EQ(snaps, 1);
}

TEST(Integrate, MassDriftAndRecordTimes) {
  auto g = make_grid(128, 24.0);
  const ModelSpec spec{ModelKind::rds3, 1.0, -1.0, 1.0, 0.1};
  StepControl c;
  c.t_end = 0.5;
  c.record_interval = 0.1;
  const RunOutcome out = integrate(gaussian(g, 1.0, 1.0), spec, c);
  EXPECT_EQ(out.status, RunStatus::reached_t_end);
  EXPECT_LT(out.max_mass_drift, 1e-11);
  ASSERT_EQ(out.records.size(), 6u);
  for (std::size_t i = 0; i < out.records.size(); ++i) EXPECT_NEAR(out.records[i].t, 0.1 * i, 1e-12);
}

TEST(Integrate, MergedHalfStepsMatchPlainSteps) {
  auto g = make_grid(64, 16.0);
  const ModelSpec spec{ModelKind::rds1, 1.0, 1.0, 1.0, 0.1};
  const ComplexField v = project(gaussian(g, 1.3, 1.0, 0.2));
  const RunOutcome out = integrate(v, spec, fixed(0.01, 0.2));
  ComplexField w = v;
  for (int i = 0; i < 20; ++i) w = strang_step(w, spec, 0.01);
  EXPECT_LT(rel_l2(out.final_state, w), 1e-12);
}

TEST(Integrate, HamiltonianDriftIsSecondOrder) {
  auto g = make_grid(64, 24.0);
  const ModelSpec spec{ModelKind::rds3, 1.0, -1.0, 1.0, 0.2};
  const ComplexField v = gaussian(g, 1.0, 1.0, 0.3);
  auto drift = [&](double dt) {
    const RunOutcome out = integrate(v, spec, fixed(dt, 1.0));
    return std::abs(out.records.back().hamiltonian - out.records.front().hamiltonian);
  };
  const double ratio = drift(0.02) / drift(0.01);
  EXPECT_GE(ratio, 3.5);
  EXPECT_LE(ratio, 4.5);
}

TEST(Integrate, AmplitudeThresholdStopsRun) {
  auto g = make_grid(64, 16.0);
  StepControl c;
  c.t_end = 5.0;
  c.amp_max_factor = 1.5;
  const ModelSpec spec{ModelKind::dse, 1.0, -1.0, 1.0, 0.0};
  const RunOutcome out = integrate(gaussian(g, 3.0, 1.0), spec, c);
  EXPECT_EQ(out.status, RunStatus::blow_up_detected);
  EXPECT_LT(out.t_final, 5.0);
  EXPECT_GT(out.records.back().max_amp, 1.5 * 3.0 * 0.99);
}

TEST(Integrate, DtUnderflowIsAnOutcome) {
  auto g = make_grid(32, 8.0);
  StepControl c;
  c.dt_min = 1e-3;
  c.cfl_const = 0.1;
  c.t_end = 1.0;
  const RunOutcome out = integrate(gaussian(g, 20.0, 1.0), ModelSpec{ModelKind::dse, 1.0, 0.0, 1.0, 0.0}, c);
  EXPECT_EQ(out.status, RunStatus::dt_underflow);
  EXPECT_EQ(out.steps, 0u);
}

TEST(Integrate, DeterministicRecords) {
  auto g = make_grid(64, 16.0);
  const ModelSpec spec{ModelKind::rds2, -0.5, -1.0, 1.0, 0.1};
  StepControl c;
  c.t_end = 0.3;
  c.record_every = 3;
  const RunOutcome a = integrate(gaussian(g, 1.5, 1.0), spec, c);
  const RunOutcome b = integrate(gaussian(g, 1.5, 1.0), spec, c);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].t, b.records[i].t);
    EXPECT_EQ(a.records[i].hamiltonian, b.records[i].hamiltonian);
    EXPECT_EQ(a.records[i].grad_norm, b.records[i].grad_norm);
  }
}

TEST(Integrate, ResumeFromSnapshotMatches) {
  auto g = make_grid(64, 16.0);
  const ModelSpec spec{ModelKind::rds3, 1.0, -1.0, 1.0, 0.1};
  const ComplexField v0 = gaussian(g, 1.5, 1.0, 0.4);
  StepControl c;
  c.t_end = 0.4;
  c.record_interval = 0.05;
  std::optional<ComplexField> mid;
  IntegrateOptions o;
  o.snapshot_interval = 0.2;
  o.on_snapshot = [&](const ComplexField& v, double t) {
    if (std::abs(t - 0.2) < 1e-12) mid = v;
  };
  const RunOutcome full = integrate(v0, spec, c, o);
  ASSERT_TRUE(mid.has_value());

  IntegrateOptions r;
  r.t0 = 0.2;
  r.project_initial = false;
  r.grad0_ref = full.records.front().grad_norm;
  r.amp_ref = full.records.front().max_amp;
  r.mass_ref = full.records.front().mass;
  const RunOutcome resumed = integrate(*mid, spec, c, r);
  const auto& a = full.records.back();
  const auto& b = resumed.records.back();
  EXPECT_EQ(a.t, b.t);
  EXPECT_NEAR(b.hamiltonian, a.hamiltonian, 1e-12 * std::abs(a.hamiltonian));
  EXPECT_NEAR(b.grad_norm, a.grad_norm, 1e-12 * a.grad_norm);
  EXPECT_NEAR(b.L_est, a.L_est, 1e-12 * a.L_est);
}

TEST(StepControl, Validation) {
  StepControl c;
  c.dt_min = 1.0;
  c.dt_max = 0.1;
  EXPECT_THROW(c.validate(), ParameterError);
  StepControl d;
  d.adaptive = false;
  d.dt = 1.0;
  EXPECT_THROW(d.validate(), ParameterError);
  StepControl e;
  e.t_end = -1.0;
  EXPECT_THROW(e.validate(), ParameterError);
}

TEST(ProfileDiagnostics, IdentityAndScaling) {
  auto g = make_grid(256, 32.0);
  const GroundState gs = solve_ground_state(1.0, 0.0, 1.0, g);
  const ComplexField s = to_complex(gs.S);
  const auto id = profile_diagnostics(s, gs);
  EXPECT_NEAR(id.L_est, 1.0, 1e-12);
  EXPECT_LT(id.profile_err, 1e-10);

  const double lambda = 0.5;
  std::vector<double> xs(g->nx()), ys(g->ny());
  for (std::size_t i = 0; i < g->nx(); ++i) xs[i] = g->x(i) / lambda;
  for (std::size_t j = 0; j < g->ny(); ++j) ys[j] = g->y(j) / lambda;
  const auto vals = interpolate(s, xs, ys);
  ComplexField scaled(g);
  const double half = 0.5 * g->lx();
  for (std::size_t i = 0; i < g->nx(); ++i) {
    for (std::size_t j = 0; j < g->ny(); ++j) {
      const bool inside = std::abs(xs[i]) < half && std::abs(ys[j]) < half;
      scaled(i, j) = inside ? vals[i * g->ny() + j] / lambda : cplx{};
    }
  }
  const auto sc = profile_diagnostics(scaled, gs);
  EXPECT_NEAR(sc.L_est, lambda, 1e-6);
  EXPECT_LT(sc.profile_err, 1e-4);

  EXPECT_THROW(profile_diagnostics(ComplexField(g), gs), UndefinedScale);
}
