#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "msdiff/collision.hpp"
#include "msdiff/common.hpp"
#include "msdiff/friction.hpp"
#include "msdiff/linalg.hpp"
#include "msdiff/mep.hpp"
#include "msdiff/mixture.hpp"

namespace msdiff {

constexpr double kVelocityTieTol = 1e-14;

struct SolverConfig {
  Closure closure = Closure::Equimolar;
  double cfl_safety = 0.4;
  double t_end = 1.0;
  bool energy_mass_factors = true;  // keep the 3 m0/(5 m_i) factors in the energy law
  double alpha = 0.0;               // 0 selects the diffusion-limit system

  void validate() const {
    require(cfl_safety > 0.0 && cfl_safety <= 1.0, "cfl_safety must lie in (0,1]");
    require(t_end >= 0.0, "t_end must be nonnegative");
    require(alpha >= 0.0, "alpha must be nonnegative");
  }
};

// Energy-law coefficient of species i; 1 when the per-species mass factors
// are disabled.
inline double energy_factor(const MixtureSpec& spec, const SolverConfig& cfg, int i) {
  return cfg.energy_mass_factors ? 3.0 * spec.m0 / (5.0 * spec.mass[i]) : 1.0;
}

struct StepDiagnostics {
  double pre_projection_pressure_residual = 0.0;  // max |sum rho T* - P0| / P0 before projection
  int floored_cells = 0;
};

namespace detail {

inline int wrap(int c, int n) { return (c % n + n) % n; }

// Neighbor index for central differences; mirror ghosts for no-flux walls.
inline int neighbor(int c, int off, int n, BoundaryKind b) {
  const int idx = c + off;
  if (b == BoundaryKind::Periodic) return wrap(idx, n);
  return std::clamp(idx, 0, n - 1);
}

inline double upwind_value(double left, double right, double uhat) {
  if (uhat > kVelocityTieTol) return left;
  if (uhat < -kVelocityTieTol) return right;
  return 0.5 * (left + right);
}

inline std::string dump_cell(const CellState& cell, int c) {
  std::string s = "cell " + std::to_string(c) + ": T=" + std::to_string(cell.T);
  for (std::size_t i = 0; i < cell.rho.size(); ++i)
    s += " rho_" + std::to_string(i + 1) + "=" + std::to_string(cell.rho[i]) + " u_" +
         std::to_string(i + 1) + "=" + std::to_string(cell.vel[i][0]);
  return s;
}

// Interface pairs (cl, cr) for faces 0..N of a 1-D grid; face f sits left of
// cell f. Valid flux faces are all of them for periodic grids and the
// interior ones for no-flux grids (boundary faces carry zero flux).
inline void face_cells(int face, int n, BoundaryKind b, int& cl, int& cr, bool& active) {
  if (b == BoundaryKind::Periodic) {
    cl = wrap(face - 1, n);
    cr = wrap(face, n);
    active = true;
  } else {
    active = (face > 0 && face < n);
    cl = active ? face - 1 : 0;
    cr = active ? face : 0;
  }
}

}  // namespace detail

// Fills every cell's velocities with the diffusion-limit friction solve
// driven by the central-difference pressure gradients (x components; the
// transverse components are zero in the limit system).
inline void diagnose_limit_velocities(Field1D& field, const MixtureSpec& spec,
                                      const SolverConfig& cfg) {
  const int N = field.size();
  const int S = spec.species();
  double min_mass = spec.mass[0];
  for (double m : spec.mass) min_mass = std::min(min_mass, m);
  const double grad_floor =
      (3.0 * spec.m0 / (5.0 * min_mass)) * field.P0 / std::max(field.length(), field.dx);

  std::vector<double> grad(S);
  for (int c = 0; c < N; ++c) {
    const int cl = detail::neighbor(c, -1, N, field.boundary);
    const int cr = detail::neighbor(c, +1, N, field.boundary);
    for (int i = 0; i < S; ++i)
      grad[i] = (field.cells[cr].rho[i] * field.cells[cr].T - field.cells[cl].rho[i] * field.cells[cl].T) /
                (2.0 * field.dx);
    FrictionSystem sys = build_friction_system(spec, field.cells[c], grad);
    std::vector<double> u = solve_velocities(sys, spec, field.cells[c], cfg.closure, 1e-8, grad_floor);
    for (int i = 0; i < S; ++i) field.cells[c].vel[i] = Vec3{u[i], 0.0, 0.0};
  }
}

// One forward-Euler step of the diffusion-limit system:
// central pressure gradients, per-cell singular friction solve with closure,
// conservative upwind transport of the densities, explicit energy update and
// the uniform-pressure projection T <- P0 / sum_i rho_i.
inline Field1D step_limit(const Field1D& field, const MixtureSpec& spec, const SolverConfig& cfg,
                          double dt, StepDiagnostics* diag_out = nullptr) {
  require(dt > 0.0, "time step must be positive");
  const int N = field.size();
  const int S = spec.species();

  Field1D next = field;
  StepDiagnostics diag;

  // (1)+(2) pressure gradients and limit velocities at the current state.
  Field1D work = field;
  diagnose_limit_velocities(work, spec, cfg);

  // (3) per-species interface fluxes, upwinded by the face velocity.
  std::vector<std::vector<double>> mass_flux(S, std::vector<double>(N + 1, 0.0));
  std::vector<double> energy_flux(N + 1, 0.0);
  for (int f = 0; f <= N; ++f) {
    int cl, cr;
    bool active;
    detail::face_cells(f, N, field.boundary, cl, cr, active);
    if (!active) continue;
    double eflux = 0.0;
    for (int i = 0; i < S; ++i) {
      const double uhat = 0.5 * (work.cells[cl].vel[i][0] + work.cells[cr].vel[i][0]);
      const double rho_up = detail::upwind_value(field.cells[cl].rho[i], field.cells[cr].rho[i], uhat);
      mass_flux[i][f] = rho_up * uhat;
      const double p_up = detail::upwind_value(field.cells[cl].rho[i] * field.cells[cl].T,
                                               field.cells[cr].rho[i] * field.cells[cr].T, uhat);
      eflux += energy_factor(spec, cfg, i) * 2.5 * p_up * uhat;
    }
    energy_flux[f] = eflux;
  }

  // (4) conservative density update.
  const double lambda = dt / field.dx;
  for (int c = 0; c < N; ++c)
    for (int i = 0; i < S; ++i) {
      double r = field.cells[c].rho[i] - lambda * (mass_flux[i][c + 1] - mass_flux[i][c]);
      if (r < kDensityFloor) {
        r = kDensityFloor;
        ++diag.floored_cells;
      }
      next.cells[c].rho[i] = r;
    }

  // (5) explicit energy update, then (6) pressure projection. The projected
  // temperature is fully determined by P0; the energy-law prediction only
  // feeds the projection-magnitude diagnostic.
  double max_residual = 0.0;
  for (int c = 0; c < N; ++c) {
    double e_old = 0.0, heat_capacity = 0.0, rho_sum = 0.0;
    for (int i = 0; i < S; ++i) {
      e_old += energy_factor(spec, cfg, i) * 1.5 * field.cells[c].rho[i] * field.cells[c].T;
      heat_capacity += energy_factor(spec, cfg, i) * 1.5 * next.cells[c].rho[i];
      rho_sum += next.cells[c].rho[i];
    }
    const double e_star = e_old - lambda * (energy_flux[c + 1] - energy_flux[c]);
    const double T_star = e_star / heat_capacity;
    max_residual = std::max(max_residual, std::fabs(rho_sum * T_star - field.P0) / field.P0);
    const double T_new = field.P0 / rho_sum;
    if (!(T_new > 0.0))
      throw numerical_error("negative temperature after limit step; " +
                            detail::dump_cell(next.cells[c], c));
    next.cells[c].T = T_new;
    next.cells[c].vel = work.cells[c].vel;  // velocities used for this step's fluxes
  }
  diag.pre_projection_pressure_residual = max_residual;
  if (diag_out) *diag_out = diag;
  return next;
}

// One IMEX step of the alpha-scaled moment system: explicit conservative
// transport of density, momentum (convective + pressure parts, with a
// Rusanov dissipation sized by the acoustic speed applied to the momentum
// only) and total energy, followed by a per-cell implicit solve of the stiff
// friction term and temperature extraction from the energy variable.
inline Field1D step_scaled(const Field1D& field, const MixtureSpec& spec, const SolverConfig& cfg,
                           double dt, double alpha, StepDiagnostics* diag_out = nullptr) {
  require(dt > 0.0, "time step must be positive");
  require(alpha > 0.0, "scaled stepper needs alpha > 0");
  const int N = field.size();
  const int S = spec.species();
  const double a2 = alpha * alpha;

  Field1D next = field;
  StepDiagnostics diag;

  auto sound_speed_i = [&](int i, double T) {
    return std::sqrt((5.0 / 3.0) * energy_factor(spec, cfg, i) * T);
  };

  // Interface fluxes.
  std::vector<std::vector<double>> mass_flux(S, std::vector<double>(N + 1, 0.0));
  std::vector<std::vector<Vec3>> mom_flux(S, std::vector<Vec3>(N + 1, kZeroVec));
  std::vector<double> energy_flux(N + 1, 0.0);
  for (int f = 0; f <= N; ++f) {
    int cl, cr;
    bool active;
    detail::face_cells(f, N, field.boundary, cl, cr, active);
    if (!active) continue;
    const CellState& L = field.cells[cl];
    const CellState& R = field.cells[cr];

    double a_face = 0.0;
    for (int i = 0; i < S; ++i) {
      a_face = std::max(a_face, std::fabs(L.vel[i][0]) + sound_speed_i(i, L.T) / alpha);
      a_face = std::max(a_face, std::fabs(R.vel[i][0]) + sound_speed_i(i, R.T) / alpha);
    }

    double eflux = 0.0;
    for (int i = 0; i < S; ++i) {
      const double uhat = 0.5 * (L.vel[i][0] + R.vel[i][0]);
      const double rho_up = detail::upwind_value(L.rho[i], R.rho[i], uhat);
      mass_flux[i][f] = rho_up * uhat;

      const double p_face = 0.5 * (L.rho[i] * L.T + R.rho[i] * R.T);
      for (int k = 0; k < 3; ++k) {
        const double q_up =
            detail::upwind_value(L.rho[i] * L.vel[i][k], R.rho[i] * R.vel[i][k], uhat);
        double flux = q_up * uhat;
        if (k == 0) flux += (energy_factor(spec, cfg, i) / a2) * p_face;
        flux -= 0.5 * a_face * (R.rho[i] * R.vel[i][k] - L.rho[i] * L.vel[i][k]);
        mom_flux[i][f][k] = flux;
      }

      const double eL = a2 * 0.5 * L.rho[i] * norm2(L.vel[i]) +
                        energy_factor(spec, cfg, i) * 2.5 * L.rho[i] * L.T;
      const double eR = a2 * 0.5 * R.rho[i] * norm2(R.vel[i]) +
                        energy_factor(spec, cfg, i) * 2.5 * R.rho[i] * R.T;
      eflux += detail::upwind_value(eL, eR, uhat) * uhat;
    }
    energy_flux[f] = eflux;
  }

  // Explicit update of rho, momentum and total energy, then the implicit
  // friction solve (diag(rho) - dt/alpha^2 B) u = q per cell and component.
  const double lambda = dt / field.dx;
  std::vector<Vec3> q_star(S);
  std::vector<double> rhs(S);
  for (int c = 0; c < N; ++c) {
    const CellState& cell = field.cells[c];
    CellState& out = next.cells[c];

    double e_old = 0.0;
    for (int i = 0; i < S; ++i)
      e_old += a2 * 0.5 * cell.rho[i] * norm2(cell.vel[i]) +
               energy_factor(spec, cfg, i) * 1.5 * cell.rho[i] * cell.T;
    const double e_new = e_old - lambda * (energy_flux[c + 1] - energy_flux[c]);

    for (int i = 0; i < S; ++i) {
      double r = cell.rho[i] - lambda * (mass_flux[i][c + 1] - mass_flux[i][c]);
      if (r < kDensityFloor) {
        r = kDensityFloor;
        ++diag.floored_cells;
      }
      out.rho[i] = r;
      for (int k = 0; k < 3; ++k)
        q_star[i][k] = cell.rho[i] * cell.vel[i][k] - lambda * (mom_flux[i][c + 1][k] - mom_flux[i][c][k]);
    }

    const DenseMatrix B = friction_matrix(spec, out);
    for (int k = 0; k < 3; ++k) {
      DenseMatrix M(S);
      for (int i = 0; i < S; ++i) {
        for (int j = 0; j < S; ++j) M(i, j) = -(dt / a2) * B(i, j);
        M(i, i) += out.rho[i];
        rhs[i] = q_star[i][k];
      }
      solve_in_place(M, rhs);
      for (int i = 0; i < S; ++i) out.vel[i][k] = rhs[i];
    }

    double kinetic = 0.0, heat_capacity = 0.0;
    for (int i = 0; i < S; ++i) {
      kinetic += a2 * 0.5 * out.rho[i] * norm2(out.vel[i]);
      heat_capacity += energy_factor(spec, cfg, i) * 1.5 * out.rho[i];
    }
    const double T_new = (e_new - kinetic) / heat_capacity;
    if (!(T_new > 0.0))
      throw numerical_error("negative temperature after scaled step; " +
                            detail::dump_cell(out, c));
    out.T = T_new;
  }

  if (diag_out) *diag_out = diag;
  return next;
}

// Parabolic stability bound of the limit system: an upper estimate of the
// effective diffusion scale from the weakest friction channel.
inline double diffusion_scale_bound(const Field1D& field, const MixtureSpec& spec) {
  const int S = spec.species();
  double dmax = 0.0;
  for (const CellState& cell : field.cells)
    for (int i = 0; i < S; ++i) {
      double weakest = std::numeric_limits<double>::infinity();
      for (int j = 0; j < S; ++j) {
        if (j == i) continue;
        weakest = std::min(weakest, 2.0 * M_PI * spec.kernel_norm(i, j) *
                                        (spec.mass[j] / (spec.mass[i] + spec.mass[j])) * cell.rho[j]);
      }
      dmax = std::max(dmax, 3.0 * spec.m0 * cell.T / (5.0 * spec.mass[i] * weakest));
    }
  return dmax;
}

inline double stable_dt_limit(const Field1D& field, const MixtureSpec& spec, const SolverConfig& cfg) {
  const double dmax = diffusion_scale_bound(field, spec);
  return cfg.cfl_safety * field.dx * field.dx / (2.0 * dmax);
}

inline double stable_dt_scaled(const Field1D& field, const MixtureSpec& spec, const SolverConfig& cfg,
                               double alpha) {
  const int S = spec.species();
  double a_max = 0.0;
  for (const CellState& cell : field.cells)
    for (int i = 0; i < S; ++i)
      a_max = std::max(a_max, std::fabs(cell.vel[i][0]) +
                                  std::sqrt((5.0 / 3.0) * energy_factor(spec, cfg, i) * cell.T) / alpha);
  const double acoustic = field.dx / (2.0 * a_max);
  const double parabolic = field.dx * field.dx / (2.0 * diffusion_scale_bound(field, spec));
  return cfg.cfl_safety * std::min(acoustic, parabolic);
}

struct Frame {
  double t = 0.0;
  Field1D field;
  double pressure_residual = 0.0;  // pre-projection residual of the latest step
};

struct SimulationResult {
  std::vector<Frame> frames;
  long long steps = 0;
  double max_pressure_residual = 0.0;
  // Discrete H-theorem bookkeeping: smallest per-step increment of the
  // entropy integral and the largest |integral H| seen, for tolerance scaling.
  double min_entropy_increment = 0.0;
  double entropy_magnitude = 0.0;
  int floored_cells = 0;
};

inline double entropy_integral(const Field1D& field, const MixtureSpec& spec) {
  double h = 0.0;
  for (const CellState& cell : field.cells)
    for (int i = 0; i < spec.species(); ++i) h += entropy_density(spec, cell, i);
  return h * field.dx;
}

// Advances the field to t_end with the stability-bound adaptive step,
// storing frames every frame_interval (plus the initial and final states).
// frame_interval <= 0 stores only those two. Deterministic for identical
// inputs.
inline SimulationResult run_simulation(const Field1D& initial, const MixtureSpec& spec,
                                       const SolverConfig& cfg, double frame_interval) {
  spec.validate();
  cfg.validate();
  initial.validate();

  const bool limit = (cfg.alpha == 0.0);
  Field1D current = initial;
  if (limit) diagnose_limit_velocities(current, spec, cfg);

  SimulationResult result;
  result.frames.push_back(Frame{0.0, current, 0.0});

  double t = 0.0;
  double h_prev = entropy_integral(current, spec);
  result.entropy_magnitude = std::fabs(h_prev);
  result.min_entropy_increment = std::numeric_limits<double>::infinity();
  double next_frame = (frame_interval > 0.0) ? frame_interval : std::numeric_limits<double>::infinity();

  while (t < cfg.t_end - 1e-14 * std::max(1.0, cfg.t_end)) {
    double dt = limit ? stable_dt_limit(current, spec, cfg)
                      : stable_dt_scaled(current, spec, cfg, cfg.alpha);
    bool at_frame = false;
    if (t + dt >= cfg.t_end) dt = cfg.t_end - t;
    if (t + dt >= next_frame - 1e-14 * std::max(1.0, next_frame)) {
      dt = next_frame - t;
      at_frame = true;
    }

    StepDiagnostics diag;
    current = limit ? step_limit(current, spec, cfg, dt, &diag)
                    : step_scaled(current, spec, cfg, dt, cfg.alpha, &diag);
    t += dt;
    ++result.steps;
    result.floored_cells += diag.floored_cells;
    result.max_pressure_residual = std::max(result.max_pressure_residual,
                                            diag.pre_projection_pressure_residual);

    const double h_now = entropy_integral(current, spec);
    result.min_entropy_increment = std::min(result.min_entropy_increment, h_now - h_prev);
    result.entropy_magnitude = std::max(result.entropy_magnitude, std::fabs(h_now));
    h_prev = h_now;

    const bool at_end = t >= cfg.t_end - 1e-14 * std::max(1.0, cfg.t_end);
    if (at_frame || at_end) {
      Field1D snapshot = current;
      if (limit) diagnose_limit_velocities(snapshot, spec, cfg);
      result.frames.push_back(Frame{t, snapshot, diag.pre_projection_pressure_residual});
      if (at_frame) next_frame += frame_interval;
    }
  }
  if (result.steps == 0) result.min_entropy_increment = 0.0;
  return result;
}

}  // namespace msdiff
