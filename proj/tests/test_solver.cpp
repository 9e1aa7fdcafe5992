#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "msdiff/diagnostics.hpp"
#include "msdiff/solver.hpp"

using namespace msdiff;

namespace {

MixtureSpec fick_spec() {
  return make_mixture({1.0, 1.0}, {0.0, 1.0 / M_PI, 1.0 / M_PI, 0.0}, 1.0);
}

// Binary mixture with uniform n = 1, T = 1 and a sine perturbation of rho_1.
Field1D fick_field(int cells, double eps, BoundaryKind boundary = BoundaryKind::Periodic) {
  Field1D f;
  f.dx = 1.0 / cells;
  f.boundary = boundary;
  f.P0 = 1.0;
  f.cells.assign(cells, CellState{});
  for (int c = 0; c < cells; ++c) {
    const double x = (c + 0.5) * f.dx;
    CellState& cell = f.cells[c];
    cell.rho = {0.5 + eps * std::sin(2.0 * M_PI * x), 0.5 - eps * std::sin(2.0 * M_PI * x)};
    cell.vel = {Vec3{0, 0, 0}, Vec3{0, 0, 0}};
    cell.T = 1.0;
  }
  return f;
}

Field1D uniform_field(int cells, double T = 1.0) {
  Field1D f;
  f.dx = 1.0 / cells;
  f.P0 = T;
  f.cells.assign(cells, CellState{});
  for (CellState& cell : f.cells) {
    cell.rho = {0.5, 0.5};
    cell.vel = {Vec3{0, 0, 0}, Vec3{0, 0, 0}};
    cell.T = T;
  }
  return f;
}

double total_mass(const Field1D& f, int i) {
  double m = 0.0;
  for (const CellState& c : f.cells) m += c.rho[i];
  return m * f.dx;
}

// Amplitude of the first sine mode of rho_1 - mean.
double mode_amplitude(const Field1D& f) {
  double as = 0.0, ac = 0.0;
  const int n = f.size();
  for (int c = 0; c < n; ++c) {
    const double x = (c + 0.5) * f.dx;
    as += f.cells[c].rho[0] * std::sin(2.0 * M_PI * x);
    ac += f.cells[c].rho[0] * std::cos(2.0 * M_PI * x);
  }
  return 2.0 * std::hypot(as, ac) / n;
}

}  // namespace

TEST_CASE("spatially uniform fields are fixed points of both steppers") {
  const MixtureSpec spec = fick_spec();
  SolverConfig cfg;
  cfg.t_end = 1.0;

  Field1D f = uniform_field(16);
  const Field1D next = step_limit(f, spec, cfg, 1e-4);
  for (int c = 0; c < f.size(); ++c) {
    for (int i = 0; i < 2; ++i) {
      REQUIRE(next.cells[c].rho[i] == f.cells[c].rho[i]);
      REQUIRE(std::fabs(next.cells[c].vel[i][0]) <= 1e-15);
    }
    REQUIRE(next.cells[c].T == Catch::Approx(f.cells[c].T).epsilon(1e-14));
  }

  // Scaled stepper: uniform field with a common drift velocity stays put.
  Field1D g = uniform_field(16);
  for (CellState& cell : g.cells) cell.vel = {Vec3{0.2, 0.1, 0.0}, Vec3{0.2, 0.1, 0.0}};
  cfg.alpha = 0.5;
  const Field1D gnext = step_scaled(g, spec, cfg, 1e-5, 0.5);
  for (int c = 0; c < g.size(); ++c) {
    for (int i = 0; i < 2; ++i) {
      REQUIRE(gnext.cells[c].rho[i] == Catch::Approx(g.cells[c].rho[i]).epsilon(1e-13));
      REQUIRE(gnext.cells[c].vel[i][0] == Catch::Approx(0.2).margin(1e-13));
      REQUIRE(gnext.cells[c].vel[i][1] == Catch::Approx(0.1).margin(1e-13));
    }
    REQUIRE(gnext.cells[c].T == Catch::Approx(g.cells[c].T).epsilon(1e-12));
  }
}

TEST_CASE("limit step conserves per-species mass") {
  const MixtureSpec spec = fick_spec();
  SolverConfig cfg;

  for (const BoundaryKind b : {BoundaryKind::Periodic, BoundaryKind::NoFlux}) {
    Field1D f = fick_field(64, 0.1, b);
    const double m0 = total_mass(f, 0);
    const double m1 = total_mass(f, 1);
    Field1D g = step_limit(f, spec, cfg, stable_dt_limit(f, spec, cfg));
    REQUIRE(total_mass(g, 0) == Catch::Approx(m0).epsilon(1e-14));
    REQUIRE(total_mass(g, 1) == Catch::Approx(m1).epsilon(1e-14));
  }
}

TEST_CASE("limit stability bound follows the weakest-channel diffusion estimate") {
  const MixtureSpec spec = fick_spec();
  SolverConfig cfg;
  Field1D f = uniform_field(32);
  // D_max = (3 T/5) / (2 pi ||b|| (1/2) rho_j) = 0.6 / 0.5 = 1.2.
  REQUIRE(diffusion_scale_bound(f, spec) == Catch::Approx(1.2).epsilon(1e-12));
  REQUIRE(stable_dt_limit(f, spec, cfg) ==
          Catch::Approx(0.4 * f.dx * f.dx / (2.0 * 1.2)).epsilon(1e-12));
}

TEST_CASE("Fick reduction: sine mode decays at the effective diffusion rate") {
  const MixtureSpec spec = fick_spec();
  SolverConfig cfg;
  cfg.t_end = 0.02;

  Field1D f = fick_field(64, 0.01);
  const double a0 = mode_amplitude(f);
  const SimulationResult run = run_simulation(f, spec, cfg, 0.0);
  const double a1 = mode_amplitude(run.frames.back().field);
  const double rate = std::log(a0 / a1) / cfg.t_end;

  const double k = 2.0 * M_PI;
  const double d_eff = 3.0 * 1.0 / (5.0 * M_PI * (1.0 / M_PI) * 1.0);  // 3T/(5 pi ||b|| n)
  REQUIRE(rate == Catch::Approx(d_eff * k * k).epsilon(0.05));
}

TEST_CASE("implicit friction relaxes velocity differences and keeps the mass-weighted mean") {
  const MixtureSpec spec = make_mixture({1.0, 2.0}, {0.0, 0.5, 0.5, 0.0});
  SolverConfig cfg;
  cfg.alpha = 0.3;
  Field1D f;
  f.dx = 0.1;
  f.P0 = 1.5;
  f.cells.assign(8, CellState{});
  for (CellState& cell : f.cells) {
    cell.rho = {1.0, 0.5};
    cell.vel = {Vec3{0.4, 0.0, 0.1}, Vec3{-0.2, 0.3, 0.0}};
    cell.T = 1.0;
  }

  const double diff_before = norm(f.cells[0].vel[0] - f.cells[0].vel[1]);
  double p_before = 0.0;
  for (int i = 0; i < 2; ++i) p_before += spec.mass[i] * f.cells[0].rho[i] * f.cells[0].vel[i][0];

  const Field1D g = step_scaled(f, spec, cfg, 1e-4, cfg.alpha);
  const double diff_after = norm(g.cells[0].vel[0] - g.cells[0].vel[1]);
  double p_after = 0.0;
  for (int i = 0; i < 2; ++i) p_after += spec.mass[i] * g.cells[0].rho[i] * g.cells[0].vel[i][0];

  REQUIRE(diff_after < diff_before);
  REQUIRE(p_after == Catch::Approx(p_before).epsilon(1e-12));
}

TEST_CASE("density floor clips and reports") {
  const MixtureSpec spec = fick_spec();
  SolverConfig cfg;
  cfg.alpha = 1.0;
  Field1D f;
  f.dx = 0.25;
  f.P0 = 1.0;
  f.cells.assign(4, CellState{});
  for (int c = 0; c < 4; ++c) {
    f.cells[c].rho = {1.0, 1.0};
    f.cells[c].vel = {Vec3{0, 0, 0}, Vec3{0, 0, 0}};
    f.cells[c].T = 1.0;
  }
  // Species 1 nearly empty with a diverging velocity pattern around cell 1;
  // its mass is 1e-12-scale so the energy bookkeeping is unaffected.
  for (int c = 0; c < 4; ++c) f.cells[c].rho[0] = 1.5e-12;
  f.cells[0].vel[0] = Vec3{-0.4, 0, 0};
  f.cells[1].vel[0] = Vec3{0.0, 0, 0};
  f.cells[2].vel[0] = Vec3{0.4, 0, 0};

  StepDiagnostics diag;
  const Field1D g = step_scaled(f, spec, cfg, 0.25, cfg.alpha, &diag);
  REQUIRE(diag.floored_cells > 0);
  REQUIRE(g.cells[1].rho[0] == kDensityFloor);
}

TEST_CASE("negative temperature aborts with a state dump") {
  const MixtureSpec spec = make_mixture({1.0, 1.0}, {1e-12, 1e-12, 1e-12, 1e-12}, 1.0);
  SolverConfig cfg;
  cfg.alpha = 1.0;
  Field1D f;
  f.dx = 0.25;
  f.P0 = 1.0;
  f.cells.assign(4, CellState{});
  for (int c = 0; c < 4; ++c) {
    f.cells[c].rho = {1.0, 1.0};
    f.cells[c].vel = {Vec3{(c % 2) ? 2.0 : -2.0, 0, 0}, Vec3{(c % 2) ? 2.0 : -2.0, 0, 0}};
    f.cells[c].T = 1e-9;
  }
  // A deliberately unstable step drains a cell's energy below its kinetic part.
  REQUIRE_THROWS_AS(step_scaled(f, spec, cfg, 0.5, cfg.alpha), numerical_error);
}

TEST_CASE("run_simulation respects t_end = 0 and is deterministic") {
  const MixtureSpec spec = fick_spec();
  SolverConfig cfg;
  cfg.t_end = 0.0;
  Field1D f = fick_field(32, 0.01);
  const SimulationResult r = run_simulation(f, spec, cfg, 0.0);
  REQUIRE(r.frames.size() == 1);
  REQUIRE(r.steps == 0);

  cfg.t_end = 0.005;
  const SimulationResult a = run_simulation(f, spec, cfg, 0.001);
  const SimulationResult b = run_simulation(f, spec, cfg, 0.001);
  REQUIRE(a.frames.size() == b.frames.size());
  const Field1D& fa = a.frames.back().field;
  const Field1D& fb = b.frames.back().field;
  for (int c = 0; c < fa.size(); ++c) {
    REQUIRE(fa.cells[c].rho[0] == fb.cells[c].rho[0]);
    REQUIRE(fa.cells[c].T == fb.cells[c].T);
  }
}

TEST_CASE("scaled solver with common velocities and uniform data is an equilibrium") {
  const MixtureSpec spec = fick_spec();
  SolverConfig cfg;
  cfg.alpha = 0.2;
  cfg.t_end = 0.002;
  Field1D f = uniform_field(16);
  const SimulationResult run = run_simulation(f, spec, cfg, 0.0);
  const Field1D& g = run.frames.back().field;
  for (int c = 0; c < g.size(); ++c) {
    REQUIRE(g.cells[c].rho[0] == Catch::Approx(0.5).epsilon(1e-12));
    REQUIRE(std::fabs(g.cells[c].vel[0][0]) <= 1e-12);
    REQUIRE(g.cells[c].T == Catch::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("no-flux runs conserve mass with zero boundary fluxes") {
  const MixtureSpec spec = fick_spec();
  SolverConfig cfg;
  cfg.t_end = 0.01;
  Field1D f = fick_field(48, 0.05, BoundaryKind::NoFlux);
  const double m0 = total_mass(f, 0);
  const SimulationResult run = run_simulation(f, spec, cfg, 0.0);
  REQUIRE(total_mass(run.frames.back().field, 0) == Catch::Approx(m0).epsilon(1e-13));
}
